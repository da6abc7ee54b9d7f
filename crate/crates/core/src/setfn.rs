//! Set functions, set families, price vectors and the constructions built on them.
//!
//! A [`SetFunction`] stores its values as integers over one common positive
//! denominator. Every comparison made by the checkers is between sums with
//! the same number of terms on each side, so the scaled table can be used
//! directly without ever leaving exact integer arithmetic.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::subset::{Subset, MAX_N};
use crate::value::{
    common_denominator, ext_add, format_rational, rational_vec_serde, scale_to, ExtValue, Rational,
    NEG_INF,
};

/// A function from the subsets of `{1..n}` to the rationals extended by −∞.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SetFunction {
    n: usize,
    den: i128,
    table: Vec<i128>,
}

impl SetFunction {
    /// Builds a set function from a dense table indexed by subset bitset.
    pub fn new(n: usize, values: Vec<ExtValue>) -> Result<SetFunction> {
        check_n(n)?;
        if values.len() != 1 << n {
            return Err(CoreError::TableLength { expected: 1 << n, found: values.len() });
        }
        let dens: Vec<i128> = values.iter().filter_map(|v| v.finite()).map(|r| *r.denom()).collect();
        let den = common_denominator(&dens)?;
        let table = values
            .iter()
            .map(|v| match v {
                ExtValue::NegInfinity => Ok(NEG_INF),
                ExtValue::Finite(r) => scale_to(r, den),
            })
            .collect::<Result<Vec<_>>>()?;
        SetFunction::from_scaled(n, den, table)
    }

    /// Builds a set function by evaluating `value` on every subset.
    pub fn from_fn<F: FnMut(Subset) -> ExtValue>(n: usize, mut value: F) -> Result<SetFunction> {
        check_n(n)?;
        let values = (0..1u32 << n).map(|s| value(Subset(s))).collect();
        SetFunction::new(n, values)
    }

    pub(crate) fn from_scaled(n: usize, den: i128, table: Vec<i128>) -> Result<SetFunction> {
        let f = SetFunction::from_scaled_any_domain(n, den, table);
        if f.table.iter().all(|&v| v == NEG_INF) {
            return Err(CoreError::EmptyDomain);
        }
        Ok(f)
    }

    /// Like `from_scaled` but allows an empty effective domain. Only slice
    /// functions are built this way.
    pub(crate) fn from_scaled_any_domain(n: usize, den: i128, mut table: Vec<i128>) -> SetFunction {
        debug_assert!(den > 0 && table.len() == 1 << n);
        let g = table
            .iter()
            .filter(|&&v| v != NEG_INF)
            .fold(den, |g, &v| g.gcd(&v));
        let den = if g > 1 {
            for v in table.iter_mut().filter(|v| **v != NEG_INF) {
                *v /= g;
            }
            den / g
        } else {
            den
        };
        SetFunction { n, den, table }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Common denominator of the stored table.
    #[inline]
    pub fn denominator(&self) -> i128 {
        self.den
    }

    /// The full ground set `{1..n}`.
    #[inline]
    pub fn ground(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn eval(&self, s: Subset) -> Result<ExtValue> {
        s.check(self.n)?;
        Ok(self.value(s))
    }

    /// Value at `s`; `s` must fit the ground set.
    #[inline]
    pub fn value(&self, s: Subset) -> ExtValue {
        ExtValue::from_scaled(self.table[s.index()], self.den)
    }

    #[inline]
    pub(crate) fn raw(&self, s: Subset) -> i128 {
        self.table[s.index()]
    }

    #[inline]
    pub fn is_finite_at(&self, s: Subset) -> bool {
        self.table[s.index()] != NEG_INF
    }

    /// Converts a scaled integer (as returned by internal sums) back to a value.
    #[inline]
    pub(crate) fn unscale(&self, v: i128) -> ExtValue {
        ExtValue::from_scaled(v, self.den)
    }

    pub fn values(&self) -> impl Iterator<Item = ExtValue> + '_ {
        self.table.iter().map(move |&v| ExtValue::from_scaled(v, self.den))
    }

    pub fn effective_domain(&self) -> SetFamily {
        SetFamily::from_predicate(self.n, |s| self.is_finite_at(s))
    }

    /// `f(X) + f(Y)` on the scaled table.
    #[inline]
    pub(crate) fn pair(&self, x: Subset, y: Subset) -> i128 {
        ext_add(self.raw(x), self.raw(y))
    }

    pub(crate) fn raw_max(&self) -> i128 {
        self.table.iter().copied().max().unwrap_or(NEG_INF)
    }

    pub(crate) fn raw_min_finite(&self) -> i128 {
        self.table.iter().copied().filter(|&v| v != NEG_INF).min().unwrap_or(NEG_INF)
    }

    pub fn max_value(&self) -> ExtValue {
        self.unscale(self.raw_max())
    }

    pub fn min_finite_value(&self) -> ExtValue {
        self.unscale(self.raw_min_finite())
    }

    /// `max f − min f` over the finite entries, in scaled units.
    pub(crate) fn raw_range(&self) -> i128 {
        if self.table.iter().all(|&v| v == NEG_INF) {
            0
        } else {
            self.raw_max() - self.raw_min_finite()
        }
    }

    /// `max f − min f` over the finite entries.
    pub fn value_range(&self) -> Rational {
        Rational::new(self.raw_range(), self.den)
    }

    /// The maximizers of `f`.
    pub fn argmax(&self) -> SetFamily {
        let best = self.raw_max();
        SetFamily::from_predicate(self.n, |s| self.raw(s) == best)
    }

    /// Returns a copy with the value at `s` replaced.
    pub fn with_value(&self, s: Subset, v: ExtValue) -> Result<SetFunction> {
        s.check(self.n)?;
        let mut values: Vec<ExtValue> = self.values().collect();
        values[s.index()] = v;
        SetFunction::new(self.n, values)
    }

    /// `f[−p]`: the function `X ↦ f(X) − p(X)`. Entries at −∞ stay −∞.
    pub fn shift_by_price(&self, p: &PriceVector) -> Result<SetFunction> {
        let priced = Priced::new(self, p)?;
        SetFunction::from_scaled(self.n, priced.den, priced.values)
    }

    /// The pair of slice functions on `Y₀ = Y \ X` used to reduce the
    /// multiple exchange at `(X, Y, I)` to a sum maximization:
    ///
    /// `f₁(J) = f((X \ I) ∪ J)` and `f₂(J) = f((Y \ J) ∪ I)` for `J ⊆ Y₀`.
    ///
    /// The slice ground set is re-indexed: local element `k` is the `k`-th
    /// smallest element of `Y₀`. The slice functions may have an empty
    /// effective domain when `f` is not M♮-concave.
    pub fn slice(&self, x: Subset, y: Subset, i: Subset) -> Result<SlicePair> {
        let (y0, t1, t2) = self.slice_tables(x, y, i)?;
        let m = y0.len();
        Ok(SlicePair {
            y0,
            f1: SetFunction::from_scaled_any_domain(m, self.den, t1),
            f2: SetFunction::from_scaled_any_domain(m, self.den, t2),
        })
    }

    /// Slice tables in the scaled units of `self`, indexed by local subsets of `Y₀`.
    pub(crate) fn slice_tables(&self, x: Subset, y: Subset, i: Subset) -> Result<(Subset, Vec<i128>, Vec<i128>)> {
        x.check(self.n)?;
        y.check(self.n)?;
        i.check(self.n)?;
        if !self.is_finite_at(x) || !self.is_finite_at(y) {
            return Err(CoreError::Precondition("X and Y must belong to dom f".into()));
        }
        if !i.is_subset_of(x.difference(y)) {
            return Err(CoreError::Precondition("I must be a subset of X \\ Y".into()));
        }
        let c = x.intersection(y);
        let x0 = x.difference(c);
        let y0 = y.difference(c);
        let base1 = x0.difference(i).union(c);
        let base2 = i.union(c);
        let m = y0.len();
        let mut t1 = Vec::with_capacity(1 << m);
        let mut t2 = Vec::with_capacity(1 << m);
        for local in 0..1u32 << m {
            let j = y0.deposit(local);
            t1.push(self.raw(base1.union(j)));
            t2.push(self.raw(base2.union(y0.difference(j))));
        }
        Ok((y0, t1, t2))
    }

    /// Serialization form: every finite entry, subsets in increasing bitset order.
    pub fn to_file(&self) -> SetFunctionFile {
        SetFunctionFile {
            kind: SetFunctionKind::SetFunction,
            n: self.n,
            entries: (0..1u32 << self.n)
                .map(Subset)
                .filter(|&s| self.is_finite_at(s))
                .map(|s| Entry { set: s.elements(), value: self.value(s) })
                .collect(),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        Err(CoreError::GroundSetSize { n, max: MAX_N })
    } else {
        Ok(())
    }
}

/// `f(S) − p(S)` for every subset, over the common denominator of `f` and `p`.
pub(crate) struct Priced {
    pub den: i128,
    pub values: Vec<i128>,
}

impl Priced {
    pub fn new(f: &SetFunction, p: &PriceVector) -> Result<Priced> {
        p.check_len(f.n)?;
        let mut dens: Vec<i128> = p.0.iter().map(|r| *r.denom()).collect();
        dens.push(f.den);
        let den = common_denominator(&dens)?;
        let factor = den / f.den;
        let sums = scaled_subset_sums(&p.0, den)?;
        let values = f
            .table
            .iter()
            .zip(&sums)
            .map(|(&v, &ps)| {
                if v == NEG_INF {
                    Ok(NEG_INF)
                } else {
                    v.checked_mul(factor).map(|v| v - ps).ok_or(CoreError::Overflow)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Priced { den, values })
    }

    pub fn max(&self) -> i128 {
        self.values.iter().copied().max().unwrap_or(NEG_INF)
    }
}

/// `p(S)` for all `S`, each scaled to denominator `den`.
pub(crate) fn scaled_subset_sums(p: &[Rational], den: i128) -> Result<Vec<i128>> {
    let scaled = p.iter().map(|r| scale_to(r, den)).collect::<Result<Vec<_>>>()?;
    Ok(subset_sums(&scaled))
}

/// Sums over all subsets by extending from the lowest set bit.
pub(crate) fn subset_sums(weights: &[i128]) -> Vec<i128> {
    let n = weights.len();
    let mut sums = vec![0i128; 1 << n];
    for s in 1..1usize << n {
        let low = s.trailing_zeros() as usize;
        sums[s] = sums[s & (s - 1)] + weights[low];
    }
    sums
}

/// A family of subsets of `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SetFamily {
    n: usize,
    bits: Vec<u64>,
    members: Vec<Subset>,
}

impl SetFamily {
    /// Builds a family from its members; duplicates are merged.
    pub fn new<I: IntoIterator<Item = Subset>>(n: usize, members: I) -> Result<SetFamily> {
        check_n(n)?;
        let mut bits = vec![0u64; ((1usize << n) + 63) / 64];
        for s in members {
            s.check(n)?;
            bits[s.index() / 64] |= 1 << (s.index() % 64);
        }
        Ok(SetFamily::from_bits(n, bits))
    }

    pub fn from_predicate<P: FnMut(Subset) -> bool>(n: usize, mut pred: P) -> SetFamily {
        let mut bits = vec![0u64; ((1usize << n) + 63) / 64];
        for s in 0..1u32 << n {
            if pred(Subset(s)) {
                bits[s as usize / 64] |= 1 << (s % 64);
            }
        }
        SetFamily::from_bits(n, bits)
    }

    fn from_bits(n: usize, bits: Vec<u64>) -> SetFamily {
        let members = (0..1u32 << n)
            .filter(|&s| bits[s as usize / 64] >> (s % 64) & 1 == 1)
            .map(Subset)
            .collect();
        SetFamily { n, bits, members }
    }

    /// The family whose membership is given by the bits of `mask`
    /// (bit `s` set ⇔ subset `s` is a member). Requires `n ≤ 6`.
    pub fn from_mask(n: usize, mask: u64) -> SetFamily {
        assert!(n <= 6, "from_mask supports n <= 6");
        let keep = if n == 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
        SetFamily::from_bits(n, vec![mask & keep])
    }

    /// Every subset of `{1..n}`.
    pub fn power_set(n: usize) -> SetFamily {
        SetFamily::from_predicate(n, |_| true)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, s: Subset) -> bool {
        s.fits(self.n) && self.bits[s.index() / 64] >> (s.index() % 64) & 1 == 1
    }

    /// Members in increasing bitset order.
    #[inline]
    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_file(&self) -> SetFamilyFile {
        SetFamilyFile {
            kind: SetFamilyKind::SetFamily,
            n: self.n,
            members: self.members.iter().map(|s| s.elements()).collect(),
        }
    }
}

/// A price (or weight) per ground-set element.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceVector(#[serde(with = "rational_vec_serde")] pub Vec<Rational>);

impl PriceVector {
    pub fn new(entries: Vec<Rational>) -> PriceVector {
        PriceVector(entries)
    }

    pub fn zeros(n: usize) -> PriceVector {
        PriceVector(vec![Rational::from_integer(0); n])
    }

    pub fn from_ints(v: &[i64]) -> PriceVector {
        PriceVector(v.iter().map(|&x| Rational::from_integer(x as i128)).collect())
    }

    /// Parses a comma-separated list of integers or `p/q` rationals.
    pub fn parse(s: &str) -> Result<PriceVector> {
        let t = s.trim();
        if t.is_empty() {
            return Ok(PriceVector(Vec::new()));
        }
        t.split(',')
            .map(crate::value::parse_rational)
            .collect::<Result<Vec<_>>>()
            .map(PriceVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    /// `p(S) = Σ_{i∈S} p_i`.
    pub fn sum_over(&self, s: Subset) -> Rational {
        s.iter().map(|e| self.0[e]).sum()
    }

    /// Component-wise maximum `p ∨ p'`.
    pub fn join(&self, o: &PriceVector) -> PriceVector {
        PriceVector(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Component-wise minimum `p ∧ p'`.
    pub fn meet(&self, o: &PriceVector) -> PriceVector {
        PriceVector(self.0.iter().zip(&o.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn add(&self, o: &PriceVector) -> PriceVector {
        PriceVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> PriceVector {
        PriceVector(self.0.iter().map(|a| -a).collect())
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(CoreError::LengthMismatch { expected: n, found: self.0.len() })
        }
    }
}

impl std::fmt::Display for PriceVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (k, r) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(&format_rational(r))?;
        }
        f.write_str(")")
    }
}

/// The slice functions `f₁`, `f₂` on `Y₀ = Y \ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePair {
    pub y0: Subset,
    pub f1: SetFunction,
    pub f2: SetFunction,
}

impl SlicePair {
    /// Maps a subset of the slice ground set back to a subset of `N`.
    pub fn lift(&self, local: Subset) -> Subset {
        self.y0.deposit(local.bits())
    }

    /// `max_J f₁(J) + f₂(J)`.
    pub fn primal(&self) -> ExtValue {
        ExtValue::max_of((0..1u32 << self.f1.n()).map(|j| self.f1.value(Subset(j)) + self.f2.value(Subset(j))))
    }
}

// ---------------------------------------------------------------------------
// File formats

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetFunctionKind {
    SetFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetFamilyKind {
    SetFamily,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub set: Vec<usize>,
    pub value: ExtValue,
}

/// `{"kind":"set_function","n":..,"entries":[{"set":[..],"value":..},..]}`.
/// Subsets without an entry take the value −∞.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFunctionFile {
    pub kind: SetFunctionKind,
    pub n: usize,
    pub entries: Vec<Entry>,
}

/// `{"kind":"set_family","n":..,"members":[[..],..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFamilyFile {
    pub kind: SetFamilyKind,
    pub n: usize,
    pub members: Vec<Vec<usize>>,
}

fn checked_set(elems: &[usize], n: usize) -> Result<Subset> {
    if elems.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::Parse(format!("set {elems:?} is not sorted and duplicate-free")));
    }
    Subset::from_elements(elems, n)
}

impl SetFunctionFile {
    pub fn into_function(self) -> Result<SetFunction> {
        check_n(self.n)?;
        let mut values = vec![ExtValue::NegInfinity; 1 << self.n];
        let mut seen = vec![false; 1 << self.n];
        for e in &self.entries {
            let s = checked_set(&e.set, self.n)?;
            if std::mem::replace(&mut seen[s.index()], true) {
                return Err(CoreError::Parse(format!("duplicate entry for set {s}")));
            }
            values[s.index()] = e.value;
        }
        SetFunction::new(self.n, values)
    }
}

impl SetFamilyFile {
    pub fn into_family(self) -> Result<SetFamily> {
        check_n(self.n)?;
        let members = self
            .members
            .iter()
            .map(|m| checked_set(m, self.n))
            .collect::<Result<Vec<_>>>()?;
        SetFamily::new(self.n, members)
    }
}

/// A parsed instance file of either kind.
#[derive(Clone, Debug)]
pub enum Instance {
    Function(SetFunction),
    Family(SetFamily),
}

/// Parses a set-function or set-family JSON document, dispatching on `kind`.
pub fn parse_instance(json: &str) -> Result<Instance> {
    let raw: serde_json::Value =
        serde_json::from_str(json).map_err(|e| CoreError::Parse(e.to_string()))?;
    match raw.get("kind").and_then(|k| k.as_str()) {
        Some("set_function") => serde_json::from_value::<SetFunctionFile>(raw)
            .map_err(|e| CoreError::Parse(e.to_string()))?
            .into_function()
            .map(Instance::Function),
        Some("set_family") => serde_json::from_value::<SetFamilyFile>(raw)
            .map_err(|e| CoreError::Parse(e.to_string()))?
            .into_family()
            .map(Instance::Family),
        Some(other) => Err(CoreError::Parse(format!("unknown kind {other:?}"))),
        None => Err(CoreError::Parse("missing \"kind\" field".into())),
    }
}
