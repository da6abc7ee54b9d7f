//! Pass/fail results carrying a witness for every failure.

use serde::Serialize;

use crate::setfn::PriceVector;
use crate::subset::Subset;
use crate::value::ExtValue;

/// Outcome of a check. A failure always carries the violating tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }

    pub(crate) fn fail(violation: Violation, lhs: ExtValue, rhs: ExtValue) -> Verdict {
        Verdict::Fail(Witness { violation, lhs: Some(lhs), rhs: Some(rhs) })
    }

    pub(crate) fn fail_bare(violation: Violation) -> Verdict {
        Verdict::Fail(Witness { violation, lhs: None, rhs: None })
    }

    pub(crate) fn from_option(found: Option<Witness>) -> Verdict {
        found.map_or(Verdict::Pass, Verdict::Fail)
    }
}

/// The violating tuple and, for valued inequalities, both sides of it.
/// `rhs` is the best value the right-hand side can attain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub violation: Violation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<ExtValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<ExtValue>,
}

/// Which local inequality family failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalFamily {
    /// `f(X+i+j) + f(X) ≤ f(X+i) + f(X+j)`
    Pair,
    /// `f(X+i+j) + f(X+k) ≤ max[f(X+i+k) + f(X+j), f(X+j+k) + f(X+i)]`
    Triple,
    /// `f(X+i+j) + f(X+k+l) ≤ max[f(X+i+k) + f(X+j+l), f(X+j+k) + f(X+i+l)]`
    Quadruple,
}

impl LocalFamily {
    pub fn label(self) -> &'static str {
        match self {
            LocalFamily::Pair => "(i)",
            LocalFamily::Triple => "(ii)",
            LocalFamily::Quadruple => "(iii)",
        }
    }
}

/// Exchange axioms for set families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyAxiom {
    /// Single exchange (B♮-EXC); passing it certifies a generalized matroid.
    #[serde(rename = "bnat-exc")]
    Exchange,
    /// Multiple exchange (B♮-EXC_m).
    #[serde(rename = "bnat-exc-m")]
    MultipleExchange,
    /// Split exchange (B♮-EXC±): both halves (a) and (b) hold.
    #[serde(rename = "bnat-exc-pm")]
    SplitExchange,
}

/// Which half of the split exchange failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitPart {
    /// `X − i ∈ F` or `X − i + j ∈ F` for some `j`.
    A,
    /// `Y + i ∈ F` or `Y + i − k ∈ F` for some `k`.
    B,
}

/// A violating tuple. Element labels `i, j, k, l` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// (M♮-EXC) fails at `(X, Y, i)`.
    SingleExchange { x: Subset, y: Subset, i: usize },
    /// (M♮-EXC_m) fails at `(X, Y, I)`: no `J ⊆ Y \ X` works.
    MultipleExchange { x: Subset, y: Subset, i_set: Subset },
    /// Two members of the effective domain differ in cardinality.
    UnequalCardinality { x: Subset, y: Subset },
    /// The valuated-matroid exchange fails at `(X, Y, i)`.
    ValuatedExchange { x: Subset, y: Subset, i: usize },
    /// A local inequality fails at `X` with the listed elements `i, j[, k[, l]]`.
    Local { family: LocalFamily, x: Subset, elements: Vec<usize> },
    /// A family axiom fails for the effective domain (local check) or for a family.
    FamilyExchange {
        axiom: FamilyAxiom,
        x: Subset,
        y: Subset,
        i: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        part: Option<SplitPart>,
    },
    /// (B♮-EXC_m) fails at `(X, Y, I)`.
    FamilyMultipleExchange { x: Subset, y: Subset, i_set: Subset },
    /// `g(p) + g(p') < g(p ∨ p') + g(p ∧ p')`.
    Submodularity { p: PriceVector, p2: PriceVector },
    /// Gross substitutes fails: `X ∈ D(p)` and no `Y ∈ D(q)` keeps the goods whose price did not change.
    GrossSubstitutes { p: PriceVector, q: PriceVector, x: Subset },
    /// Single improvement fails: `X ∉ D(p)` has no strictly better neighbour.
    SingleImprovement { p: PriceVector, x: Subset },
    /// (No complementarities) fails at `X, Y ∈ D(p)`, `I ⊆ X \ Y`.
    NoComplementarities { p: PriceVector, x: Subset, y: Subset, i_set: Subset, simultaneous: bool },
}
