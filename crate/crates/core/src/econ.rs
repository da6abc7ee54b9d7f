//! Demand correspondences and the gross-substitutes family of conditions.
//!
//! (GS), (SI), (NC) and (NCsim) quantify over all real price vectors, so they
//! can only be refuted by sampling. A reported violation is exact; the absence
//! of one means "no violation found at the sampled prices" and nothing more.
//! Positive certification goes through the exact exchange checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::exchange::{check_local, check_multiple_exchange, check_single_exchange, scan_first};
use crate::setfn::{PriceVector, Priced, SetFamily, SetFunction};
use crate::subset::Subset;
use crate::value::{ExtValue, Rational, NEG_INF};
use crate::verdict::{Verdict, Violation, Witness};

/// `D(p|f)`: the maximizers of `f[−p]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandSet {
    pub price: PriceVector,
    pub members: SetFamily,
    /// The common value of `f[−p]` on every member.
    pub value: ExtValue,
}

/// Exact argmax of `f(X) − p(X)` over all subsets.
pub fn demand(f: &SetFunction, p: &PriceVector) -> Result<DemandSet> {
    let priced = Priced::new(f, p)?;
    let best = priced.max();
    let members = SetFamily::from_predicate(f.n(), |s| priced.values[s.index()] == best);
    Ok(DemandSet {
        price: p.clone(),
        members,
        value: ExtValue::from_scaled(best, priced.den),
    })
}

/// Deterministic source of price vectors for the sampled conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceSampler {
    pub seed: u64,
    pub grid_step: Rational,
    /// Coordinates lie in `[−radius, radius]`; defaults to `2·(max f − min f) + 1`.
    pub radius: Option<Rational>,
    /// Number of random grid points.
    pub count: usize,
    /// Also sweep every integer vector in the box when `n ≤ 4` and the box
    /// holds at most `INTEGER_GRID_LIMIT` points.
    pub integer_grid: bool,
    /// Prices checked before any generated ones.
    pub explicit: Vec<PriceVector>,
    /// `(p, q)` pairs checked for (GS) before any generated ones.
    pub explicit_pairs: Vec<(PriceVector, PriceVector)>,
}

/// Size limit for the exhaustive integer price sweep.
pub const INTEGER_GRID_LIMIT: u128 = 100_000;

impl PriceSampler {
    pub fn new(seed: u64, count: usize) -> PriceSampler {
        PriceSampler {
            seed,
            grid_step: Rational::new(1, 2),
            radius: None,
            count,
            integer_grid: true,
            explicit: Vec::new(),
            explicit_pairs: Vec::new(),
        }
    }

    /// A sampler that checks only the given prices.
    pub fn explicit(prices: Vec<PriceVector>) -> PriceSampler {
        PriceSampler { integer_grid: false, explicit: prices, ..PriceSampler::new(0, 0) }
    }

    /// A sampler that checks only the given (GS) pairs (and their lower prices).
    pub fn explicit_pairs(pairs: Vec<(PriceVector, PriceVector)>) -> PriceSampler {
        PriceSampler { integer_grid: false, explicit_pairs: pairs, ..PriceSampler::new(0, 0) }
    }

    pub fn radius_for(&self, f: &SetFunction) -> Rational {
        self.radius
            .unwrap_or_else(|| Rational::from_integer(2) * f.value_range() + Rational::from_integer(1))
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn grid_steps(&self, f: &SetFunction) -> i128 {
        (self.radius_for(f) / self.grid_step).floor().to_integer().max(0)
    }

    /// The price sequence for `f`: explicit prices, then the integer sweep
    /// (when enabled and small enough), then `count` random grid points.
    pub fn prices(&self, f: &SetFunction) -> Vec<PriceVector> {
        let n = f.n();
        let mut out = self.explicit.clone();
        out.extend(self.explicit_pairs.iter().map(|(p, _)| p.clone()));
        let r_int = self.radius_for(f).floor().to_integer().max(0);
        if self.integer_grid && n <= 4 {
            let points = (2 * r_int as u128 + 1).pow(n as u32);
            if points <= INTEGER_GRID_LIMIT {
                let mut v = vec![-r_int; n];
                loop {
                    out.push(PriceVector::from_ints(&v.iter().map(|&x| x as i64).collect::<Vec<_>>()));
                    let mut pos = n;
                    loop {
                        if pos == 0 {
                            return self.append_random(out, f);
                        }
                        pos -= 1;
                        if v[pos] < r_int {
                            v[pos] += 1;
                            break;
                        }
                        v[pos] = -r_int;
                    }
                }
            }
        }
        self.append_random(out, f)
    }

    fn append_random(&self, mut out: Vec<PriceVector>, f: &SetFunction) -> Vec<PriceVector> {
        let k = self.grid_steps(f);
        let mut rng = self.rng();
        for _ in 0..self.count {
            out.push(self.random_price(&mut rng, f.n(), k));
        }
        out
    }

    fn random_price(&self, rng: &mut ChaCha8Rng, n: usize, k: i128) -> PriceVector {
        PriceVector::new(
            (0..n)
                .map(|_| self.grid_step * Rational::from_integer(rng.gen_range(-k..=k)))
                .collect(),
        )
    }

    /// `(p, q)` pairs with `p ≤ q` for the (GS) check: explicit pairs first,
    /// then each price of [`PriceSampler::prices`] raised on a random
    /// nonempty coordinate subset by positive grid multiples.
    pub fn price_pairs(&self, f: &SetFunction) -> Vec<(PriceVector, PriceVector)> {
        let mut out = self.explicit_pairs.clone();
        let n = f.n();
        if n == 0 {
            return out;
        }
        let k = self.grid_steps(f).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let skip = self.explicit_pairs.len();
        for p in self.prices(f).into_iter().skip(self.explicit.len() + skip) {
            let raised: u32 = loop {
                let m = rng.gen_range(0..1u32 << n);
                if m != 0 {
                    break m;
                }
            };
            let q = PriceVector::new(
                p.entries()
                    .iter()
                    .enumerate()
                    .map(|(e, v)| {
                        if raised >> e & 1 == 1 {
                            v + self.grid_step * Rational::from_integer(rng.gen_range(1..=2 * k))
                        } else {
                            *v
                        }
                    })
                    .collect(),
            );
            out.push((p, q));
        }
        for p in &self.explicit {
            out.push((p.clone(), p.clone()));
        }
        out
    }
}

/// (GS) at one price pair: for every `X ∈ D(p)` some `Y ∈ D(q)` contains the
/// goods of `X` whose price did not change. Requires `p ≤ q`.
pub fn check_gs_at(f: &SetFunction, p: &PriceVector, q: &PriceVector) -> Result<Verdict> {
    p.check_len(f.n())?;
    q.check_len(f.n())?;
    if p.entries().iter().zip(q.entries()).any(|(a, b)| a > b) {
        return Err(CoreError::Precondition("gross substitutes needs p <= q".into()));
    }
    let dp = demand(f, p)?;
    let dq = demand(f, q)?;
    let unchanged = Subset::full(f.n()).difference(Subset(
        p.entries().iter().zip(q.entries()).enumerate().filter(|(_, (a, b))| a != b).fold(0, |m, (e, _)| m | 1 << e),
    ));
    for &x in dp.members.members() {
        let keep = x.intersection(unchanged);
        if !dq.members.members().iter().any(|&y| keep.is_subset_of(y)) {
            return Ok(Verdict::fail_bare(Violation::GrossSubstitutes { p: p.clone(), q: q.clone(), x }));
        }
    }
    Ok(Verdict::Pass)
}

/// (SI) at one price: every `X ∈ dom f` outside `D(p)` has a neighbour `Y`
/// (`|X \ Y| ≤ 1`, `|Y \ X| ≤ 1`) with `f[−p](X) < f[−p](Y)`.
pub fn check_si_at(f: &SetFunction, p: &PriceVector) -> Result<Verdict> {
    let priced = Priced::new(f, p)?;
    let v = &priced.values;
    let best = priced.max();
    let full = Subset::full(f.n());
    for xb in 0..1u32 << f.n() {
        let x = Subset(xb);
        let vx = v[x.index()];
        if vx == NEG_INF || vx == best {
            continue;
        }
        let outside = full.difference(x);
        let improves = x.iter().any(|i| {
            v[x.without(i).index()] > vx || outside.iter().any(|j| v[x.without(i).with(j).index()] > vx)
        }) || outside.iter().any(|j| v[x.with(j).index()] > vx);
        if !improves {
            let best_neighbour = x
                .iter()
                .flat_map(|i| std::iter::once(x.without(i)).chain(outside.iter().map(move |j| x.without(i).with(j))))
                .chain(outside.iter().map(|j| x.with(j)))
                .map(|y| v[y.index()])
                .max()
                .unwrap_or(NEG_INF);
            return Ok(Verdict::fail(
                Violation::SingleImprovement { p: p.clone(), x },
                ExtValue::from_scaled(vx, priced.den),
                ExtValue::from_scaled(best_neighbour, priced.den),
            ));
        }
    }
    Ok(Verdict::Pass)
}

/// (NC) at one price, or (NCsim) when `simultaneous`: for `X, Y ∈ D(p)` and
/// `I ⊆ X \ Y` some `J ⊆ Y \ X` gives `(X \ I) ∪ J ∈ D(p)` (and
/// `(Y \ J) ∪ I ∈ D(p)` for the simultaneous version).
pub fn check_nc_at(f: &SetFunction, p: &PriceVector, simultaneous: bool) -> Result<Verdict> {
    let d = demand(f, p)?;
    let fam = &d.members;
    for &x in fam.members() {
        for &y in fam.members() {
            for i in x.difference(y).subsets() {
                let ok = y.difference(x).subsets().any(|j| {
                    fam.contains(x.difference(i).union(j))
                        && (!simultaneous || fam.contains(y.difference(j).union(i)))
                });
                if !ok {
                    return Ok(Verdict::fail_bare(Violation::NoComplementarities {
                        p: p.clone(),
                        x,
                        y,
                        i_set: i,
                        simultaneous,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// First failing verdict over a list of inputs, lowest index wins.
fn first_failure<T, F>(items: &[T], check: F) -> Result<Verdict>
where
    T: Sync,
    F: Fn(&T) -> Result<Verdict> + Sync + Send,
{
    let found = scan_first(items.len() as u32, |k| match check(&items[k as usize]) {
        Ok(Verdict::Pass) => None,
        Ok(Verdict::Fail(w)) => Some(Ok(w)),
        Err(e) => Some(Err(e)),
    });
    match found {
        None => Ok(Verdict::Pass),
        Some(Ok(w)) => Ok(Verdict::Fail(w)),
        Some(Err(e)) => Err(e),
    }
}

/// Sampled refutation of (GS).
pub fn check_gs_sampled(f: &SetFunction, sampler: &PriceSampler) -> Result<Verdict> {
    first_failure(&sampler.price_pairs(f), |(p, q)| check_gs_at(f, p, q))
}

/// Sampled refutation of (SI).
pub fn check_si_sampled(f: &SetFunction, sampler: &PriceSampler) -> Result<Verdict> {
    first_failure(&sampler.prices(f), |p| check_si_at(f, p))
}

/// Sampled refutation of (NC) or (NCsim).
pub fn check_nc_sampled(f: &SetFunction, sampler: &PriceSampler, simultaneous: bool) -> Result<Verdict> {
    first_failure(&sampler.prices(f), |p| check_nc_at(f, p, simultaneous))
}

/// Strong no complementarities; the same condition as the multiple exchange property.
pub fn check_snc(f: &SetFunction) -> Verdict {
    check_multiple_exchange(f)
}

/// Property names in the equivalence table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Property {
    #[serde(rename = "mnat-exc")]
    SingleExchange,
    #[serde(rename = "snc")]
    StrongNoComplementarities,
    #[serde(rename = "local")]
    Local,
    #[serde(rename = "gs")]
    GrossSubstitutes,
    #[serde(rename = "si")]
    SingleImprovement,
    #[serde(rename = "nc")]
    NoComplementarities,
    #[serde(rename = "nc-sim")]
    NoComplementaritiesSimultaneous,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::SingleExchange => "mnat-exc",
            Property::StrongNoComplementarities => "snc",
            Property::Local => "local",
            Property::GrossSubstitutes => "gs",
            Property::SingleImprovement => "si",
            Property::NoComplementarities => "nc",
            Property::NoComplementaritiesSimultaneous => "nc-sim",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub property: Property,
    /// Exact entries decide the property; sampled ones can only refute it.
    pub exact: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub entries: Vec<ReportEntry>,
}

impl EquivalenceReport {
    pub fn get(&self, p: Property) -> &ReportEntry {
        self.entries.iter().find(|e| e.property == p).expect("every property is reported")
    }

    /// True when every exact check passes (sampled ones then never refute).
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.is_pass())
    }

    pub fn exact_pass(&self) -> bool {
        self.entries.iter().filter(|e| e.exact).all(|e| e.verdict.is_pass())
    }
}

/// Runs the three exact and four sampled checks. The exact verdicts must
/// agree, and a sampled refutation while the exact checks pass is impossible;
/// either situation is reported as [`CoreError::Invariant`].
pub fn equivalence_report(f: &SetFunction, sampler: &PriceSampler) -> Result<EquivalenceReport> {
    let single = check_single_exchange(f);
    let snc = check_snc(f);
    let local = check_local(f);
    if single.is_pass() != snc.is_pass() || single.is_pass() != local.is_pass() {
        return Err(CoreError::Invariant(format!(
            "exact verdicts disagree: mnat-exc {}, snc {}, local {}",
            single.is_pass(),
            snc.is_pass(),
            local.is_pass()
        )));
    }
    let n_prices = sampler.prices(f).len();
    let n_pairs = sampler.price_pairs(f).len();
    let gs = check_gs_sampled(f, sampler)?;
    let si = check_si_sampled(f, sampler)?;
    let nc = check_nc_sampled(f, sampler, false)?;
    let ncsim = check_nc_sampled(f, sampler, true)?;
    let exact = |property, verdict| ReportEntry { property, exact: true, verdict, samples: None };
    let sampled = |property, verdict, n| ReportEntry { property, exact: false, verdict, samples: Some(n) };
    let report = EquivalenceReport {
        entries: vec![
            exact(Property::SingleExchange, single),
            exact(Property::StrongNoComplementarities, snc),
            exact(Property::Local, local),
            sampled(Property::GrossSubstitutes, gs, n_pairs),
            sampled(Property::SingleImprovement, si, n_prices),
            sampled(Property::NoComplementarities, nc, n_prices),
            sampled(Property::NoComplementaritiesSimultaneous, ncsim, n_prices),
        ],
    };
    if report.exact_pass() {
        if let Some(e) = report.entries.iter().find(|e| !e.verdict.is_pass()) {
            return Err(CoreError::Invariant(format!(
                "{} refuted although the exact checks pass: {:?}",
                e.property.name(),
                e.verdict.witness().map(|w: &Witness| &w.violation)
            )));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{comp, rank2, s, wmat};

    fn half(v: &[i128]) -> PriceVector {
        PriceVector::new(v.iter().map(|&x| Rational::new(x, 2)).collect())
    }

    #[test]
    fn demand_examples() {
        let d = demand(&rank2(), &PriceVector::zeros(3)).unwrap();
        assert_eq!(d.members.members(), &[s(&[1, 2]), s(&[1, 3]), s(&[2, 3]), s(&[1, 2, 3])]);
        assert_eq!(d.value, ExtValue::int(2));
        let d = demand(&comp(), &half(&[3, 3])).unwrap();
        assert_eq!(d.members.members(), &[s(&[]), s(&[1, 2])]);
        assert_eq!(d.value, ExtValue::int(0));
        let d = demand(&comp(), &PriceVector::from_ints(&[-100, -100])).unwrap();
        assert_eq!(d.members.members(), &[s(&[1, 2])]);
        assert!(demand(&comp(), &PriceVector::zeros(1)).is_err());
    }

    #[test]
    fn gs_comp_refuted_at_documented_pair() {
        let v = check_gs_at(&comp(), &half(&[3, 3]), &half(&[3, 5])).unwrap();
        assert_eq!(
            v.witness().unwrap().violation,
            Violation::GrossSubstitutes { p: half(&[3, 3]), q: half(&[3, 5]), x: s(&[1, 2]) }
        );
        assert!(check_gs_at(&comp(), &half(&[3, 5]), &half(&[3, 3])).is_err());
    }

    #[test]
    fn si_comp_refuted_at_two_two() {
        let v = check_si_at(&comp(), &PriceVector::from_ints(&[2, 2])).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.violation, Violation::SingleImprovement { p: PriceVector::from_ints(&[2, 2]), x: s(&[1, 2]) });
        assert_eq!(w.lhs, Some(ExtValue::int(-1)));
        assert_eq!(w.rhs, Some(ExtValue::int(-1)));
    }

    #[test]
    fn nc_examples() {
        let v = check_nc_at(&comp(), &half(&[3, 3]), false).unwrap();
        assert_eq!(
            v.witness().unwrap().violation,
            Violation::NoComplementarities { p: half(&[3, 3]), x: s(&[1, 2]), y: s(&[]), i_set: s(&[1]), simultaneous: false }
        );
        assert!(check_nc_at(&rank2(), &PriceVector::zeros(3), true).unwrap().is_pass());
        // a single demanded bundle can never fail
        assert!(check_nc_at(&comp(), &PriceVector::zeros(2), true).unwrap().is_pass());
    }

    #[test]
    fn sampled_checks_on_known_instances() {
        let sampler = PriceSampler::new(7, 300);
        for f in [rank2(), wmat()] {
            assert!(check_gs_sampled(&f, &sampler).unwrap().is_pass());
            assert!(check_si_sampled(&f, &sampler).unwrap().is_pass());
        }
        let one = SetFunction::new(1, vec![ExtValue::int(0), ExtValue::int(5)]).unwrap();
        assert!(check_gs_sampled(&one, &sampler).unwrap().is_pass());
    }

    #[test]
    fn sampler_is_deterministic() {
        let f = comp();
        let a = PriceSampler::new(11, 50);
        assert_eq!(a.prices(&f), a.prices(&f));
        assert_eq!(a.price_pairs(&f), a.price_pairs(&f));
        assert_ne!(a.prices(&f), PriceSampler::new(12, 50).prices(&f));
        assert!(a.price_pairs(&f).iter().all(|(p, q)| p.entries().iter().zip(q.entries()).all(|(x, y)| x <= y)));
        // integer sweep: radius 7, n = 2 → 225 points
        assert_eq!(a.prices(&f).len(), 225 + 50);
    }

    #[test]
    fn equivalence_examples() {
        let sampler = PriceSampler::new(1, 200);
        assert!(equivalence_report(&rank2(), &sampler).unwrap().all_pass());
        assert!(equivalence_report(&wmat(), &sampler).unwrap().all_pass());
        let rep = equivalence_report(&comp(), &sampler).unwrap();
        for p in [
            Property::SingleExchange,
            Property::StrongNoComplementarities,
            Property::Local,
            Property::GrossSubstitutes,
            Property::SingleImprovement,
            Property::NoComplementarities,
        ] {
            assert!(!rep.get(p).verdict.is_pass(), "{p:?}");
        }
    }
}
