//! Instance construction: matroids and their valuations, concave families,
//! mutants and exhaustive enumerations of tiny universes.
//!
//! Every constructor that promises a property re-checks it with the exact
//! checkers when `n ≤ SELF_CHECK_MAX_N`; a failure there is reported as
//! [`CoreError::Invariant`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::exchange::{check_family, check_single_exchange, check_valuated_matroid};
use crate::setfn::{PriceVector, SetFamily, SetFunction};
use crate::subset::{Subset, MAX_N};
use crate::value::{ExtValue, Rational};
use crate::verdict::{FamilyAxiom, Verdict};

/// Generated instances up to this size are re-validated by the checkers.
pub const SELF_CHECK_MAX_N: usize = 10;

pub const MAX_GRAPHIC_VERTICES: usize = 5;
pub const MAX_GRAPHIC_EDGES: usize = 10;

/// Largest universe [`enumerate_functions`] will stream.
pub const MAX_ENUMERATION: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidKind {
    /// Every set of at most `k` out of `n` elements is independent.
    Uniform { k: usize, n: usize },
    /// Forests of a multigraph on `vertices` vertices (1-based endpoints);
    /// element `e` is the `e`-th edge.
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
    /// Blocks partition `{1..n}`; at most `caps[t]` elements from block `t`.
    Partition { blocks: Vec<Vec<usize>>, caps: Vec<usize> },
    Free { n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatroidSpec {
    pub kind: MatroidKind,
    pub weights: Option<Vec<Rational>>,
}

impl MatroidSpec {
    pub fn new(kind: MatroidKind) -> MatroidSpec {
        MatroidSpec { kind, weights: None }
    }

    pub fn with_weights(kind: MatroidKind, weights: Vec<Rational>) -> MatroidSpec {
        MatroidSpec { kind, weights: Some(weights) }
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            MatroidKind::Uniform { n, .. } | MatroidKind::Free { n } => *n,
            MatroidKind::Graphic { edges, .. } => edges.len(),
            MatroidKind::Partition { blocks, .. } => blocks.iter().map(Vec::len).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n > MAX_N {
            return Err(CoreError::GroundSetSize { n, max: MAX_N });
        }
        let bad = |m: String| Err(CoreError::InvalidMatroid(m));
        match &self.kind {
            MatroidKind::Uniform { k, n } if k > n => return bad(format!("uniform rank {k} exceeds n = {n}")),
            MatroidKind::Graphic { vertices, edges } => {
                if *vertices == 0 || *vertices > MAX_GRAPHIC_VERTICES {
                    return bad(format!("graphic matroids need 1..={MAX_GRAPHIC_VERTICES} vertices"));
                }
                if edges.len() > MAX_GRAPHIC_EDGES {
                    return bad(format!("graphic matroids take at most {MAX_GRAPHIC_EDGES} edges"));
                }
                if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u == 0 || v == 0 || u > *vertices || v > *vertices) {
                    return bad(format!("edge ({u},{v}) leaves the vertex set 1..={vertices}"));
                }
            }
            MatroidKind::Partition { blocks, caps } => {
                if blocks.len() != caps.len() {
                    return bad(format!("{} blocks but {} capacities", blocks.len(), caps.len()));
                }
                let mut seen = vec![false; n];
                for &e in blocks.iter().flatten() {
                    if e == 0 || e > n || seen[e - 1] {
                        return bad(format!("blocks must partition 1..={n}; element {e} is out of place"));
                    }
                    seen[e - 1] = true;
                }
            }
            _ => {}
        }
        if let Some(w) = &self.weights {
            if w.len() != n {
                return Err(CoreError::LengthMismatch { expected: n, found: w.len() });
            }
        }
        Ok(())
    }

    fn independent(&self, s: Subset) -> bool {
        match &self.kind {
            MatroidKind::Uniform { k, .. } => s.len() <= *k,
            MatroidKind::Free { .. } => true,
            MatroidKind::Partition { blocks, caps } => blocks
                .iter()
                .zip(caps)
                .all(|(b, &c)| b.iter().filter(|&&e| s.contains(e - 1)).count() <= c),
            MatroidKind::Graphic { vertices, edges } => {
                let mut parent: Vec<usize> = (0..=*vertices).collect();
                fn root(p: &mut [usize], mut v: usize) -> usize {
                    while p[v] != v {
                        p[v] = p[p[v]];
                        v = p[v];
                    }
                    v
                }
                for e in s.iter() {
                    let (a, b) = (root(&mut parent, edges[e].0), root(&mut parent, edges[e].1));
                    if a == b {
                        return false;
                    }
                    parent[a] = b;
                }
                true
            }
        }
    }

    /// Rank of `s`: size of a largest independent subset (greedy is exact
    /// for matroids).
    pub fn rank(&self, s: Subset) -> usize {
        s.iter().fold(Subset::EMPTY, |acc, e| if self.independent(acc.with(e)) { acc.with(e) } else { acc }).len()
    }

    pub fn independent_sets(&self) -> Result<SetFamily> {
        self.validate()?;
        Ok(SetFamily::from_predicate(self.n(), |s| self.independent(s)))
    }

    pub fn bases(&self) -> Result<SetFamily> {
        self.validate()?;
        let n = self.n();
        let r = self.rank(Subset::full(n));
        Ok(SetFamily::from_predicate(n, |s| s.len() == r && self.independent(s)))
    }

    fn weights(&self) -> Result<&[Rational]> {
        self.weights
            .as_deref()
            .ok_or_else(|| CoreError::Precondition("weighted matroid needs weights".into()))
    }
}

fn self_check(n: usize, verdict: impl FnOnce() -> Verdict, what: &str) -> Result<()> {
    if n <= SELF_CHECK_MAX_N {
        if let Verdict::Fail(w) = verdict() {
            return Err(CoreError::Invariant(format!("generated {what} fails its property: {:?}", w.violation)));
        }
    }
    Ok(())
}

fn weight_of(w: &[Rational], s: Subset) -> Rational {
    s.iter().map(|e| w[e]).sum()
}

/// `f(B) = w(B)` on bases, −∞ elsewhere: a valuated matroid.
pub fn gen_weighted_matroid(spec: &MatroidSpec) -> Result<SetFunction> {
    let w = spec.weights()?;
    let bases = spec.bases()?;
    let f = SetFunction::from_fn(spec.n(), |s| {
        if bases.contains(s) { ExtValue::Finite(weight_of(w, s)) } else { ExtValue::NegInfinity }
    })?;
    self_check(f.n(), || check_valuated_matroid(&f), "weighted matroid")?;
    Ok(f)
}

/// `f(I) = w(I)` on independent sets, −∞ elsewhere.
pub fn gen_weighted_independent(spec: &MatroidSpec) -> Result<SetFunction> {
    let w = spec.weights()?;
    let indep = spec.independent_sets()?;
    let f = SetFunction::from_fn(spec.n(), |s| {
        if indep.contains(s) { ExtValue::Finite(weight_of(w, s)) } else { ExtValue::NegInfinity }
    })?;
    self_check(f.n(), || check_single_exchange(&f), "weighted independent-set valuation")?;
    Ok(f)
}

/// The matroid rank function, plus `w(S)` when weights are given.
pub fn gen_rank_valuation(spec: &MatroidSpec) -> Result<SetFunction> {
    spec.validate()?;
    let zero = vec![Rational::from_integer(0); spec.n()];
    let w = spec.weights.as_deref().unwrap_or(&zero);
    let f = SetFunction::from_fn(spec.n(), |s| {
        ExtValue::Finite(Rational::from_integer(spec.rank(s) as i128) + weight_of(w, s))
    })?;
    self_check(f.n(), || check_single_exchange(&f), "rank valuation")?;
    Ok(f)
}

fn check_concave(g: &[Rational]) -> Result<()> {
    if let Some(k) = (1..g.len().saturating_sub(1)).find(|&k| g[k + 1] - g[k] > g[k] - g[k - 1]) {
        return Err(CoreError::Precondition(format!("sequence is not concave at position {k}")));
    }
    Ok(())
}

/// `f(X) = w(X) + g[|X|]` for a concave sequence `g` of length `n + 1`.
pub fn gen_modular_plus_concave(w: &PriceVector, g: &[Rational]) -> Result<SetFunction> {
    let n = w.len();
    if g.len() != n + 1 {
        return Err(CoreError::LengthMismatch { expected: n + 1, found: g.len() });
    }
    check_concave(g)?;
    let f = SetFunction::from_fn(n, |s| ExtValue::Finite(w.sum_over(s) + g[s.len()]))?;
    self_check(n, || check_single_exchange(&f), "modular-plus-concave function")?;
    Ok(f)
}

/// One term `g(|X ∩ set|)` of a laminar concave function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarTerm {
    pub set: Subset,
    /// Concave, indexed by `|X ∩ set|`, length `|set| + 1`.
    pub g: Vec<Rational>,
}

/// `f(X) = w(X) + Σ_t g_t(|X ∩ L_t|)` over a laminar family `{L_t}`.
pub fn gen_laminar_concave(w: &PriceVector, terms: &[LaminarTerm]) -> Result<SetFunction> {
    let n = w.len();
    for (a, t) in terms.iter().enumerate() {
        t.set.check(n)?;
        if t.g.len() != t.set.len() + 1 {
            return Err(CoreError::LengthMismatch { expected: t.set.len() + 1, found: t.g.len() });
        }
        check_concave(&t.g)?;
        for u in &terms[..a] {
            let meet = t.set.intersection(u.set);
            if meet != t.set && meet != u.set && !meet.is_empty() {
                return Err(CoreError::Precondition(format!("{} and {} cross; the family is not laminar", u.set, t.set)));
            }
        }
    }
    let f = SetFunction::from_fn(n, |s| {
        ExtValue::Finite(w.sum_over(s) + terms.iter().map(|t| t.g[s.intersection(t.set).len()]).sum::<Rational>())
    })?;
    self_check(n, || check_single_exchange(&f), "laminar concave function")?;
    Ok(f)
}

/// Shifts one finite entry, chosen by `seed`, by `+magnitude` or `−magnitude`.
pub fn mutate(f: &SetFunction, seed: u64, magnitude: Rational) -> SetFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let finite: Vec<Subset> = (0..1u32 << f.n()).map(Subset).filter(|&s| f.is_finite_at(s)).collect();
    let s = *finite.choose(&mut rng).expect("dom f is nonempty");
    let delta = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
    let v = f.value(s).finite().expect("chosen entry is finite") + delta;
    f.with_value(s, ExtValue::Finite(v)).expect("replacing a finite entry keeps dom f nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSpec {
    n: usize,
    alphabet: Vec<ExtValue>,
}

impl EnumerationSpec {
    pub const MAX_N: usize = 3;

    pub fn new(n: usize, alphabet: Vec<ExtValue>) -> Result<EnumerationSpec> {
        if n > Self::MAX_N {
            return Err(CoreError::GroundSetSize { n, max: Self::MAX_N });
        }
        if !alphabet.iter().any(ExtValue::is_finite) {
            return Err(CoreError::Precondition("alphabet needs at least one finite value".into()));
        }
        if (1..alphabet.len()).any(|k| alphabet[..k].contains(&alphabet[k])) {
            return Err(CoreError::Precondition("alphabet has repeated values".into()));
        }
        Ok(EnumerationSpec { n, alphabet })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> &[ExtValue] {
        &self.alphabet
    }

    /// `|alphabet|^(2^n)`, counting the all-−∞ table.
    pub fn universe_size(&self) -> u128 {
        (self.alphabet.len() as u128).pow(1 << self.n)
    }

    /// Number of functions [`enumerate_functions`] yields.
    pub fn count(&self) -> u128 {
        self.universe_size() - u128::from(self.alphabet.contains(&ExtValue::NegInfinity))
    }
}

/// Every table over the alphabet except the all-−∞ one, in lexicographic
/// order of `(f(∅), f({1}), f({2}), f({1,2}), …)` with alphabet positions as
/// digits.
pub fn enumerate_functions(spec: &EnumerationSpec) -> Result<Enumeration> {
    let size = spec.universe_size();
    if size > MAX_ENUMERATION {
        return Err(CoreError::UniverseTooLarge { size, max: MAX_ENUMERATION });
    }
    Ok(Enumeration { spec: spec.clone(), digits: Some(vec![0; 1 << spec.n]) })
}

pub struct Enumeration {
    spec: EnumerationSpec,
    digits: Option<Vec<usize>>,
}

impl Iterator for Enumeration {
    type Item = SetFunction;

    fn next(&mut self) -> Option<SetFunction> {
        loop {
            let digits = self.digits.as_mut()?;
            let values: Vec<ExtValue> = digits.iter().map(|&d| self.spec.alphabet[d].clone()).collect();
            let base = self.spec.alphabet.len();
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    self.digits = None;
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < base {
                    break;
                }
                digits[pos] = 0;
            }
            if values.iter().any(ExtValue::is_finite) {
                return Some(SetFunction::new(self.spec.n, values).expect("alphabet values fit"));
            }
        }
    }
}

fn ints(v: &[i128]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x)).collect()
}

/// `min(|S|, 2)` on three elements.
pub fn rank2() -> SetFunction {
    gen_rank_valuation(&MatroidSpec::new(MatroidKind::Uniform { k: 2, n: 3 })).expect("valid")
}

/// Bases of `U(2,3)` weighted by `(0, 1, 2)`.
pub fn wmat() -> SetFunction {
    gen_weighted_matroid(&MatroidSpec::with_weights(MatroidKind::Uniform { k: 2, n: 3 }, ints(&[0, 1, 2])))
        .expect("valid")
}

/// Two complementary goods: `f(∅)=0, f({1})=f({2})=1, f({1,2})=3`.
pub fn comp() -> SetFunction {
    SetFunction::new(2, [0, 1, 1, 3].map(ExtValue::int).to_vec()).expect("valid")
}

pub fn k4_edges() -> Vec<(usize, usize)> {
    vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
}

/// The 16 spanning trees of `K4` as subsets of its six edges.
pub fn k4_trees() -> SetFamily {
    MatroidSpec::new(MatroidKind::Graphic { vertices: 4, edges: k4_edges() }).bases().expect("valid")
}

fn random_concave(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rational> {
    let mut g = vec![0i128];
    let mut step: i128 = rng.gen_range(-2..=6);
    for _ in 1..len {
        g.push(g.last().unwrap() + step);
        step -= rng.gen_range(0..=3);
    }
    ints(&g)
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    ints(&(0..n).map(|_| rng.gen_range(-3..=5)).collect::<Vec<_>>())
}

/// A random laminar family: a recursive split of `{1..n}` keeping each node
/// with probability one half.
fn random_laminar(rng: &mut ChaCha8Rng, n: usize) -> Vec<Subset> {
    let mut elems: Vec<usize> = (0..n).collect();
    elems.shuffle(rng);
    let mut out = Vec::new();
    let mut stack = vec![elems];
    while let Some(block) = stack.pop() {
        if block.is_empty() {
            continue;
        }
        if rng.gen_bool(0.5) || block.len() == n {
            out.push(block.iter().fold(Subset::EMPTY, |s, &e| s.with(e)));
        }
        if block.len() > 1 {
            let cut = rng.gen_range(1..block.len());
            stack.push(block[..cut].to_vec());
            stack.push(block[cut..].to_vec());
        }
    }
    out
}

fn random_matroid(rng: &mut ChaCha8Rng, n: usize) -> MatroidKind {
    match rng.gen_range(0..3) {
        0 => MatroidKind::Uniform { k: rng.gen_range(0..=n), n },
        1 if n > 0 => {
            let nblocks = rng.gen_range(1..=n);
            let mut blocks = vec![Vec::new(); nblocks];
            for e in 1..=n {
                blocks[rng.gen_range(0..nblocks)].push(e);
            }
            let caps = blocks.iter().map(|b| rng.gen_range(0..=b.len())).collect();
            MatroidKind::Partition { blocks, caps }
        }
        2 if (1..=MAX_GRAPHIC_EDGES).contains(&n) => {
            let vertices = (2..=MAX_GRAPHIC_VERTICES).find(|v| v * (v - 1) / 2 >= n).unwrap();
            let mut all: Vec<(usize, usize)> =
                (1..=vertices).flat_map(|u| (u + 1..=vertices).map(move |v| (u, v))).collect();
            all.shuffle(rng);
            all.truncate(n);
            MatroidKind::Graphic { vertices, edges: all }
        }
        _ => MatroidKind::Uniform { k: rng.gen_range(0..=n), n },
    }
}

/// A random integer-valued M♮-concave function on `n ≤ SELF_CHECK_MAX_N`
/// elements, drawn from laminar concave functions, weighted matroids,
/// weighted independent-set valuations and weighted rank functions.
pub fn random_mnat(seed: u64, n: usize) -> Result<SetFunction> {
    if n > SELF_CHECK_MAX_N {
        return Err(CoreError::GroundSetSize { n, max: SELF_CHECK_MAX_N });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = random_weights(&mut rng, n);
    match rng.gen_range(0..4) {
        0 => {
            let terms: Vec<LaminarTerm> = random_laminar(&mut rng, n)
                .into_iter()
                .map(|set| LaminarTerm { set, g: random_concave(&mut rng, set.len() + 1) })
                .collect();
            gen_laminar_concave(&PriceVector::new(w), &terms)
        }
        1 => gen_weighted_matroid(&MatroidSpec::with_weights(random_matroid(&mut rng, n), w)),
        2 => gen_weighted_independent(&MatroidSpec::with_weights(random_matroid(&mut rng, n), w)),
        _ => gen_rank_valuation(&MatroidSpec::with_weights(random_matroid(&mut rng, n), w)),
    }
}

/// `count` instances from [`random_mnat`] with `n` drawn from `1..=max_n`.
pub fn mnat_corpus(seed: u64, count: usize, max_n: usize) -> Result<Vec<SetFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_mnat(rng.gen(), rng.gen_range(1..=max_n))).collect()
}

/// Checks that a family is a matroid basis family in the sense used by the
/// generators (passes the multiple exchange axiom).
pub fn check_bases(fam: &SetFamily) -> Result<Verdict> {
    check_family(fam, FamilyAxiom::MultipleExchange)
}
