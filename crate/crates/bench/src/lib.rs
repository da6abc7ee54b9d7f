//! Fixed inputs shared by the benchmarks.

use mnat_core::generators::{gen_laminar_concave, mutate, random_mnat, LaminarTerm};
use mnat_core::{PriceVector, Rational, SetFunction, Subset};

/// A seeded M♮-concave instance on `n` elements.
pub fn mnat_instance(n: usize) -> SetFunction {
    random_mnat(0xbe7c_4000 + n as u64, n).expect("generator parameters are valid")
}

/// `Σ_t min(|X ∩ L_t|, cap)` over a chain of prefixes plus a modular part:
/// dense domain, many ties.
pub fn laminar_chain(n: usize) -> SetFunction {
    let w = PriceVector::new((0..n).map(|e| Rational::from_integer((e % 3) as i128)).collect());
    let terms: Vec<LaminarTerm> = (1..=n)
        .step_by(2)
        .map(|k| {
            let set = Subset::full(k);
            let g = (0..=k).map(|c| Rational::from_integer(c.min(k / 2 + 1) as i128)).collect();
            LaminarTerm { set, g }
        })
        .collect();
    gen_laminar_concave(&w, &terms).expect("chains are laminar")
}

/// An instance that fails late in the sweep: a near-miss mutant.
pub fn near_miss(n: usize) -> SetFunction {
    mutate(&laminar_chain(n), 7, Rational::from_integer(1))
}
