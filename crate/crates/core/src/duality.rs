//! Conjugate functions and the duality argument behind the multiple exchange.
//!
//! For `X, Y ∈ dom f` and `I ⊆ X \ Y` the multiple exchange inequality is a
//! statement about `max_J f₁(J) + f₂(J)` for the slice functions on
//! `Y₀ = Y \ X`. Its dual is `min_q g₁(q) + g₂(−q)` where `g₁`, `g₂` are the
//! convex conjugates of the slices. This module computes both sides exactly
//! and rebuilds the big-M reduction of `g₁`, `g₂` to the global conjugate `g`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::setfn::{subset_sums, PriceVector, Priced, SetFunction};
use crate::subset::Subset;
use crate::value::{ext_add, format_rational, rational_serde, ExtValue, Rational, NEG_INF};
use crate::verdict::{Verdict, Violation};

/// Practical cap on `|Y₀|` for the dual box search.
pub const PRACTICAL_MAX_Y0: usize = 10;

/// `g(p) = max_Z f(Z) − p(Z)`. Returns −∞ only when `dom f` is empty.
pub fn conjugate(f: &SetFunction, p: &PriceVector) -> Result<ExtValue> {
    conjugate_with_maximizer(f, p).map(|(v, _)| v)
}

/// The conjugate value together with the smallest maximizing `Z`.
pub fn conjugate_with_maximizer(f: &SetFunction, p: &PriceVector) -> Result<(ExtValue, Subset)> {
    let priced = Priced::new(f, p)?;
    let best = priced.max();
    let arg = priced.values.iter().position(|&v| v == best).unwrap_or(0);
    Ok((ExtValue::from_scaled(best, priced.den), Subset(arg as u32)))
}

/// Checks `g(p) + g(p') ≥ g(p ∨ p') + g(p ∧ p')` for the conjugate `g` of `f`.
///
/// This holds everywhere when `f` is M♮-concave. It is not automatic for
/// other functions: the conjugate of the complementary pair
/// `(0, 1, 1, 3)` fails it at `p = (9/2, −8)`, `p' = (−9, 11)`.
pub fn check_submodular_pair(f: &SetFunction, p: &PriceVector, p2: &PriceVector) -> Result<Verdict> {
    p.check_len(f.n())?;
    p2.check_len(f.n())?;
    let lhs = conjugate(f, p)? + conjugate(f, p2)?;
    let rhs = conjugate(f, &p.join(p2))? + conjugate(f, &p.meet(p2))?;
    Ok(if lhs >= rhs {
        Verdict::Pass
    } else {
        Verdict::fail(Violation::Submodularity { p: p.clone(), p2: p2.clone() }, lhs, rhs)
    })
}

/// Result of the primal/dual comparison for one `(X, Y, I)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub y0: Subset,
    /// `max_{J ⊆ Y₀} f₁(J) + f₂(J)`.
    pub primal: ExtValue,
    /// Smallest `g₁(q) + g₂(−q)` found in the search box.
    pub dual: ExtValue,
    /// A minimizing price vector on `Y₀` (entries in increasing element order),
    /// present when the gap is zero.
    pub q_star: Option<PriceVector>,
    /// `dual − primal`; `None` when the primal is −∞ but the dual is finite.
    #[serde(serialize_with = "serialize_gap")]
    pub gap: Option<Rational>,
    /// Radius `R` of the box `[−R, R]^{Y₀}` that was searched.
    #[serde(with = "rational_serde")]
    pub box_radius: Rational,
    /// Number of price vectors evaluated.
    pub visited: u64,
}

fn serialize_gap<S: serde::Serializer>(gap: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match gap {
        Some(r) => ExtValue::Finite(*r).serialize(s),
        None => s.serialize_str("inf"),
    }
}

impl DualityReport {
    pub fn has_zero_gap(&self) -> bool {
        self.gap == Some(Rational::from_integer(0))
    }
}

/// The default dual search radius `2·(max f − min f) + 1`, measured in units of
/// the common denominator of `f`.
pub fn default_box_radius(f: &SetFunction) -> Rational {
    Rational::new(2 * f.raw_range() + 1, f.denominator())
}

/// Number of lattice points in the dual box for a given radius and `|Y₀|`.
pub fn dual_box_points(f: &SetFunction, radius: Rational, y0_len: usize) -> u128 {
    let r = scaled_radius(f, radius) as u128;
    (2 * r + 1).checked_pow(y0_len as u32).unwrap_or(u128::MAX)
}

fn scaled_radius(f: &SetFunction, radius: Rational) -> i128 {
    let scaled = radius * Rational::from_integer(f.denominator());
    scaled.floor().to_integer().max(0)
}

/// Evaluator of `h(q) = g₁(q) + g₂(−q)` for integer `q` in scaled units.
struct DualObjective {
    d: usize,
    t1: Vec<i128>,
    t2: Vec<i128>,
}

impl DualObjective {
    fn eval(&self, q: &[i128]) -> i128 {
        let sums = subset_sums(q);
        let mut g1 = NEG_INF;
        let mut g2 = NEG_INF;
        for (j, &qj) in sums.iter().enumerate() {
            if self.t1[j] != NEG_INF {
                g1 = g1.max(self.t1[j] - qj);
            }
            if self.t2[j] != NEG_INF {
                g2 = g2.max(self.t2[j] + qj);
            }
        }
        if g1 == NEG_INF || g2 == NEG_INF {
            NEG_INF
        } else {
            g1 + g2
        }
    }
}

/// Best point of a lexicographically ordered slab; ties keep the earliest.
#[derive(Clone, Debug)]
struct SlabBest {
    value: i128,
    q: Vec<i128>,
    visited: u64,
}

/// Advances `v` to the next vector of `[−k, k]^len` in lexicographic order.
fn next_in_cube(v: &mut [i128], k: i128) -> bool {
    for pos in (0..v.len()).rev() {
        if v[pos] < k {
            v[pos] += 1;
            return true;
        }
        v[pos] = -k;
    }
    false
}

/// Scans the points of shell `‖q‖∞ = k` whose first coordinate is `first`.
/// Stops at the first point attaining `target`.
fn scan_slab(obj: &DualObjective, k: i128, first: i128, target: i128) -> Result<Option<SlabBest>> {
    let mut rest = vec![-k; obj.d - 1];
    let mut q = vec![0i128; obj.d];
    let need_hit = first.abs() != k;
    let mut best: Option<SlabBest> = None;
    let mut visited = 0u64;
    loop {
        if !need_hit || rest.iter().any(|v| v.abs() == k) {
            q[0] = first;
            q[1..].copy_from_slice(&rest);
            let h = obj.eval(&q);
            visited += 1;
            if h < target {
                return Err(CoreError::Invariant(format!(
                    "weak duality violated at q = {q:?}: dual {h} < primal {target}"
                )));
            }
            if best.as_ref().map_or(true, |b| h < b.value) {
                best = Some(SlabBest { value: h, q: q.clone(), visited: 0 });
            }
            if h == target {
                break;
            }
        }
        if !next_in_cube(&mut rest, k) {
            break;
        }
    }
    Ok(best.map(|mut b| {
        b.visited = visited;
        b
    }))
}

/// Steepest descent on `h` over moves `q ± χ_S` inside the box, started at
/// the origin. Returns the first point whose value equals `target`; `None`
/// when the descent stalls above it. When both slices are M♮-concave, `h` is
/// L♮-convex and a stall can only happen at a global minimum, so the caller
/// falls back to the exhaustive sweep exactly when `f` misbehaves.
fn descend(obj: &DualObjective, r: i128, target: i128) -> Result<(Option<SlabBest>, u64)> {
    let d = obj.d;
    let mut q = vec![0i128; d];
    let mut h = obj.eval(&q);
    let mut visited = 1u64;
    let check = |h: i128, q: &[i128]| {
        if h < target {
            Err(CoreError::Invariant(format!("weak duality violated at q = {q:?}: dual {h} < primal {target}")))
        } else {
            Ok(())
        }
    };
    check(h, &q)?;
    let mut trial = vec![0i128; d];
    loop {
        if h == target {
            return Ok((Some(SlabBest { value: h, q, visited }), visited));
        }
        let mut step: Option<(i128, u32, i128)> = None;
        for sign in [-1i128, 1] {
            for s in 1u32..1 << d {
                let mut inside = true;
                for (e, t) in trial.iter_mut().enumerate() {
                    *t = q[e] + if s >> e & 1 == 1 { sign } else { 0 };
                    inside &= t.abs() <= r;
                }
                if !inside {
                    continue;
                }
                let v = obj.eval(&trial);
                visited += 1;
                check(v, &trial)?;
                if v < step.map_or(h, |(best, _, _)| best) {
                    step = Some((v, s, sign));
                }
            }
        }
        match step {
            Some((v, s, sign)) => {
                for (e, x) in q.iter_mut().enumerate() {
                    if s >> e & 1 == 1 {
                        *x += sign;
                    }
                }
                h = v;
            }
            None => return Ok((None, visited)),
        }
    }
}

/// Compares the primal maximum with the smallest dual value over the integer
/// box `[−R, R]^{Y₀}` (after scaling to the common denominator of `f`).
///
/// A steepest descent from the origin is tried first; if it reaches the
/// primal value, that point is `q_star`. Otherwise the box is swept shell by
/// shell in increasing `‖q‖∞`, and lexicographically within a shell. Since `g₁(q) + g₂(−q) ≥ primal` for every `q`, the sweep
/// stops as soon as a point attains the primal value; that point is `q_star`.
/// The weak-duality inequality is asserted at every visited point.
pub fn fenchel_gap(
    f: &SetFunction,
    x: Subset,
    y: Subset,
    i: Subset,
    box_radius: Option<Rational>,
) -> Result<DualityReport> {
    let (y0, t1, t2) = f.slice_tables(x, y, i)?;
    let d = y0.len();
    let den = f.denominator();
    let primal = t1.iter().zip(&t2).map(|(&a, &b)| ext_add(a, b)).max().unwrap_or(NEG_INF);
    let radius = box_radius.unwrap_or_else(|| default_box_radius(f));
    if radius < Rational::from_integer(0) {
        return Err(CoreError::Precondition("box radius must be nonnegative".into()));
    }
    let r = scaled_radius(f, radius);
    let obj = DualObjective { d, t1, t2 };

    let (mut best, mut visited) = if d == 0 {
        (Some(SlabBest { value: obj.eval(&[]), q: Vec::new(), visited: 1 }), 1u64)
    } else {
        descend(&obj, r, primal)?
    };
    if best.is_none() {
        for k in 0..=r {
            let slabs: Vec<Option<SlabBest>> = (-k..=k)
                .into_par_iter()
                .map(|first| scan_slab(&obj, k, first, primal))
                .collect::<Result<Vec<_>>>()?;
            let mut stop = false;
            for slab in slabs.into_iter().flatten() {
                // slabs after the first one reaching the primal are not part of the sweep
                if stop {
                    break;
                }
                visited += slab.visited;
                if best.as_ref().map_or(true, |b| slab.value < b.value) {
                    stop = slab.value == primal;
                    best = Some(slab);
                }
            }
            if best.as_ref().is_some_and(|b| b.value == primal) {
                break;
            }
        }
    }

    let best = best.expect("box contains the origin");
    let dual = ExtValue::from_scaled(best.value, den);
    let gap = match (primal == NEG_INF, best.value == NEG_INF) {
        (true, true) => Some(Rational::from_integer(0)),
        (true, false) => None,
        (false, _) => Some(Rational::new(best.value - primal, den)),
    };
    let q_star = (gap == Some(Rational::from_integer(0)))
        .then(|| PriceVector::new(best.q.iter().map(|&v| Rational::new(v, den)).collect()));
    let primal = ExtValue::from_scaled(primal, den);
    Ok(DualityReport { y0, primal, dual, q_star, gap, box_radius: radius, visited })
}

/// The pair of big-M price vectors on `N` and the quantities relating the
/// slice conjugates to the global conjugate `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigMPair {
    #[serde(with = "rational_serde")]
    pub m_value: Rational,
    pub p1: PriceVector,
    pub p2: PriceVector,
    pub relations: BigMRelations,
}

/// Values entering the four big-M relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigMRelations {
    pub g1_q: ExtValue,
    pub g_p1: ExtValue,
    pub g2_neg_q: ExtValue,
    pub g_p2: ExtValue,
    pub g_join: ExtValue,
    pub join_bound: ExtValue,
    pub g_meet: ExtValue,
    pub meet_bound: ExtValue,
}

/// Smallest `M` accepted by [`big_m_vectors_with`]:
/// `2·(max f − min f) + Σ|q_j| + 1`.
pub fn big_m_threshold(f: &SetFunction, q: &PriceVector) -> Rational {
    let abs_sum: Rational = q.entries().iter().map(|r| if *r < Rational::from_integer(0) { -r } else { *r }).sum();
    Rational::from_integer(2) * f.value_range() + abs_sum + Rational::from_integer(1)
}

/// Builds the big-M vectors at the threshold `M`; see [`big_m_vectors_with`].
pub fn big_m_vectors(f: &SetFunction, x: Subset, y: Subset, i: Subset, q: &PriceVector) -> Result<BigMPair> {
    big_m_vectors_with(f, x, y, i, q, big_m_threshold(f, q))
}

/// Builds `p⁽¹⁾`, `p⁽²⁾` for a given `M` and checks, exactly,
///
/// * `g₁(q) = g(p⁽¹⁾) − M(|X₀ \ I| + |C|)`
/// * `g₂(−q) = g(p⁽²⁾) − M(|I| + |C|) + q(Y₀)`
/// * `g(p⁽¹⁾ ∨ p⁽²⁾) ≥ f(Y) − q(Y₀) + M|C|`
/// * `g(p⁽¹⁾ ∧ p⁽²⁾) ≥ f(X) + M|X|`
///
/// with `C = X ∩ Y`, `X₀ = X \ Y`, `Y₀ = Y \ X`. Both slice functions must
/// have a nonempty effective domain (always the case for M♮-concave `f`).
/// A failing relation is reported as [`CoreError::Invariant`].
pub fn big_m_vectors_with(
    f: &SetFunction,
    x: Subset,
    y: Subset,
    i: Subset,
    q: &PriceVector,
    m: Rational,
) -> Result<BigMPair> {
    let slices = f.slice(x, y, i)?;
    let y0 = slices.y0;
    q.check_len(y0.len())?;
    let threshold = big_m_threshold(f, q);
    if m < threshold {
        return Err(CoreError::Precondition(format!(
            "M = {} is below the threshold {}",
            format_rational(&m),
            format_rational(&threshold)
        )));
    }
    if slices.f1.effective_domain().is_empty() || slices.f2.effective_domain().is_empty() {
        return Err(CoreError::Precondition("a slice function has an empty effective domain".into()));
    }

    let c = x.intersection(y);
    let x0 = x.difference(c);
    let mut p1 = vec![Rational::from_integer(0); f.n()];
    let mut p2 = p1.clone();
    for e in 0..f.n() {
        let (a, b) = if y0.contains(e) {
            let local = y0.iter().position(|v| v == e).expect("element of Y0");
            (q.entries()[local], q.entries()[local])
        } else if x0.contains(e) && !i.contains(e) {
            (-m, m)
        } else if i.contains(e) {
            (m, -m)
        } else if c.contains(e) {
            (-m, -m)
        } else {
            (m, m)
        };
        p1[e] = a;
        p2[e] = b;
    }
    let (p1, p2) = (PriceVector::new(p1), PriceVector::new(p2));

    let mz = |k: usize| m * Rational::from_integer(k as i128);
    let q_y0: Rational = q.entries().iter().sum();
    let shift = |v: ExtValue, r: Rational| v + ExtValue::Finite(r);

    let g1_q = conjugate(&slices.f1, q)?;
    let g2_neg_q = conjugate(&slices.f2, &q.neg())?;
    let g_p1 = conjugate(f, &p1)?;
    let g_p2 = conjugate(f, &p2)?;
    let g_join = conjugate(f, &p1.join(&p2))?;
    let g_meet = conjugate(f, &p1.meet(&p2))?;
    let join_bound = shift(f.value(y), -q_y0 + mz(c.len()));
    let meet_bound = shift(f.value(x), mz(x.len()));

    let rel = BigMRelations { g1_q, g_p1, g2_neg_q, g_p2, g_join, join_bound, g_meet, meet_bound };
    if g1_q != shift(g_p1, -mz(x0.difference(i).len() + c.len())) {
        return Err(CoreError::Invariant(format!("g1(q) = {g1_q} but g(p1) - M(|X0\\I|+|C|) = {}", shift(g_p1, -mz(x0.difference(i).len() + c.len())))));
    }
    if g2_neg_q != shift(g_p2, -mz(i.len() + c.len()) + q_y0) {
        return Err(CoreError::Invariant(format!("g2(-q) = {g2_neg_q} disagrees with g(p2)")));
    }
    if g_join < join_bound {
        return Err(CoreError::Invariant(format!("g(p1 v p2) = {g_join} < {join_bound}")));
    }
    if g_meet < meet_bound {
        return Err(CoreError::Invariant(format!("g(p1 ^ p2) = {g_meet} < {meet_bound}")));
    }
    Ok(BigMPair { m_value: m, p1, p2, relations: rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{comp, rank2, s};

    fn r(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn conjugate_examples() {
        let f = rank2();
        assert_eq!(conjugate(&f, &PriceVector::zeros(3)).unwrap(), ExtValue::int(2));
        assert_eq!(conjugate(&f, &PriceVector::from_ints(&[1, 1, 1])).unwrap(), ExtValue::int(0));
        // large prices force the empty set
        let c = comp();
        let big = PriceVector::from_ints(&[7, 7]);
        assert_eq!(conjugate_with_maximizer(&c, &big).unwrap(), (ExtValue::int(0), Subset::EMPTY));
        assert!(conjugate(&c, &PriceVector::zeros(3)).is_err());
    }

    #[test]
    fn submodular_examples() {
        let f = rank2();
        let v = check_submodular_pair(&f, &PriceVector::zeros(3), &PriceVector::from_ints(&[1, 1, 1])).unwrap();
        assert!(v.is_pass());
        let p = PriceVector::new(vec![Rational::new(1, 3), r(-2), Rational::new(5, 2)]);
        assert!(check_submodular_pair(&f, &p, &p).unwrap().is_pass());
    }

    #[test]
    fn complementary_pair_conjugate_not_submodular() {
        let p = PriceVector::new(vec![Rational::new(9, 2), r(-8)]);
        let p2 = PriceVector::from_ints(&[-9, 11]);
        let v = check_submodular_pair(&comp(), &p, &p2).unwrap();
        let w = v.witness().unwrap();
        assert_eq!((w.lhs.clone(), w.rhs.clone()), (Some(ExtValue::int(19)), Some(ExtValue::int(20))));
    }

    #[test]
    fn fenchel_rank2() {
        let rep = fenchel_gap(&rank2(), s(&[1, 2]), s(&[3]), s(&[1]), None).unwrap();
        assert_eq!(rep.primal, ExtValue::int(3));
        assert_eq!(rep.dual, ExtValue::int(3));
        assert_eq!(rep.q_star, Some(PriceVector::from_ints(&[1])));
        assert!(rep.has_zero_gap());
        assert_eq!(rep.box_radius, r(5));
    }

    #[test]
    fn fenchel_identical_sets() {
        let f = rank2();
        let x = s(&[2, 3]);
        let rep = fenchel_gap(&f, x, x, Subset::EMPTY, None).unwrap();
        assert_eq!(rep.primal, ExtValue::int(4));
        assert_eq!(rep.dual, ExtValue::int(4));
        assert_eq!(rep.q_star, Some(PriceVector::new(vec![])));
    }

    #[test]
    fn fenchel_comp_empty_slice_ground_set() {
        let rep = fenchel_gap(&comp(), s(&[1, 2]), s(&[]), s(&[1]), None).unwrap();
        assert_eq!(rep.primal, ExtValue::int(2));
        assert_eq!(rep.dual, ExtValue::int(2));
        assert!(rep.has_zero_gap());
    }

    #[test]
    fn fenchel_radius_monotone() {
        let f = rank2();
        let small = fenchel_gap(&f, s(&[1, 2]), s(&[3]), s(&[1]), Some(r(0))).unwrap();
        let large = fenchel_gap(&f, s(&[1, 2]), s(&[3]), s(&[1]), Some(r(3))).unwrap();
        assert_eq!(small.dual, ExtValue::int(4));
        assert_eq!(small.q_star, None);
        assert!(large.dual <= small.dual);
    }

    #[test]
    fn big_m_rank2_example() {
        let f = rank2();
        let q = PriceVector::from_ints(&[1]);
        let pair = big_m_vectors_with(&f, s(&[1, 2]), s(&[3]), s(&[1]), &q, r(10)).unwrap();
        assert_eq!(pair.p1, PriceVector::from_ints(&[10, -10, 1]));
        assert_eq!(pair.p2, PriceVector::from_ints(&[-10, 10, 1]));
        assert_eq!(pair.relations.g_p1, ExtValue::int(11));
        assert_eq!(pair.relations.g1_q, ExtValue::int(1));
        assert_eq!(pair.relations.g_p2, ExtValue::int(11));
        assert_eq!(pair.relations.g2_neg_q, ExtValue::int(2));
        assert_eq!(big_m_threshold(&f, &q), r(6));
        assert!(big_m_vectors_with(&f, s(&[1, 2]), s(&[3]), s(&[1]), &q, r(5)).is_err());
    }

    #[test]
    fn big_m_degenerate_cases() {
        let f = rank2();
        // I = X0, C = ∅
        let q = PriceVector::from_ints(&[2]);
        let pair = big_m_vectors(&f, s(&[1, 2]), s(&[3]), s(&[1, 2]), &q).unwrap();
        assert!(pair.p1.entries()[..2].iter().all(|v| *v > r(0)));
        // q = 0
        let pair = big_m_vectors(&f, s(&[1]), s(&[2, 3]), s(&[]), &PriceVector::zeros(2)).unwrap();
        assert_eq!(pair.m_value, r(5));
    }
}
