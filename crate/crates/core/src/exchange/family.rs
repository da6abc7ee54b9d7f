use crate::error::{CoreError, Result};
use crate::setfn::SetFamily;
use crate::subset::Subset;
use crate::verdict::{FamilyAxiom, SplitPart, Verdict, Violation, Witness};

use super::scan_first;

fn exchange_holds(fam: &SetFamily, x: Subset, y: Subset, i: usize) -> bool {
    let (xi, yi) = (x.without(i), y.with(i));
    (fam.contains(xi) && fam.contains(yi))
        || y.difference(x).iter().any(|j| fam.contains(xi.with(j)) && fam.contains(yi.without(j)))
}

fn split_violation(fam: &SetFamily, x: Subset, y: Subset, i: usize) -> Option<SplitPart> {
    let (xi, yi) = (x.without(i), y.with(i));
    let others = y.difference(x);
    if !(fam.contains(xi) || others.iter().any(|j| fam.contains(xi.with(j)))) {
        return Some(SplitPart::A);
    }
    if !(fam.contains(yi) || others.iter().any(|k| fam.contains(yi.without(k)))) {
        return Some(SplitPart::B);
    }
    None
}

fn exchange_set(fam: &SetFamily, x: Subset, y: Subset, i: Subset) -> Option<Subset> {
    let xs = x.difference(i);
    let ys = y.union(i);
    y.difference(x)
        .subsets_by_size()
        .into_iter()
        .find(|&j| fam.contains(xs.union(j)) && fam.contains(ys.difference(j)))
}

fn multiple_exchange_holds(fam: &SetFamily, x: Subset, y: Subset, i: Subset) -> bool {
    let xs = x.difference(i);
    let ys = y.union(i);
    y.difference(x)
        .subsets()
        .any(|j| fam.contains(xs.union(j)) && fam.contains(ys.difference(j)))
}

pub(super) fn check_family_unchecked(fam: &SetFamily, axiom: FamilyAxiom) -> Verdict {
    let members = fam.members();
    let found = scan_first(members.len() as u32, |k| {
        let x = members[k as usize];
        for &y in members {
            match axiom {
                FamilyAxiom::Exchange => {
                    if let Some(i) = x.difference(y).iter().find(|&i| !exchange_holds(fam, x, y, i)) {
                        return Some(Violation::FamilyExchange { axiom, x, y, i: i + 1, part: None });
                    }
                }
                FamilyAxiom::SplitExchange => {
                    for i in x.difference(y).iter() {
                        if let Some(part) = split_violation(fam, x, y, i) {
                            return Some(Violation::FamilyExchange { axiom, x, y, i: i + 1, part: Some(part) });
                        }
                    }
                }
                FamilyAxiom::MultipleExchange => {
                    if let Some(i) = x.difference(y).subsets().find(|&i| !multiple_exchange_holds(fam, x, y, i)) {
                        return Some(Violation::FamilyMultipleExchange { x, y, i_set: i });
                    }
                }
            }
        }
        None
    });
    Verdict::from_option(found.map(|violation| Witness { violation, lhs: None, rhs: None }))
}

/// Checks a family exchange axiom over all members `X, Y` and all `i ∈ X \ Y`
/// (or all `I ⊆ X \ Y` for the multiple version).
///
/// Passing [`FamilyAxiom::Exchange`] is taken as the definition of a
/// generalized matroid.
pub fn check_family(fam: &SetFamily, axiom: FamilyAxiom) -> Result<Verdict> {
    if fam.is_empty() {
        return Err(CoreError::EmptyFamily);
    }
    Ok(check_family_unchecked(fam, axiom))
}

/// Finds `J ⊆ Y \ X` with `(X \ I) ∪ J ∈ F` and `(Y \ J) ∪ I ∈ F`, fewest
/// elements first and then smallest bitset.
pub fn find_base_exchange(fam: &SetFamily, x: Subset, y: Subset, i: Subset) -> Result<Option<Subset>> {
    if !fam.contains(x) || !fam.contains(y) {
        return Err(CoreError::Precondition("X and Y must be members of the family".into()));
    }
    i.check(fam.n())?;
    if !i.is_subset_of(x.difference(y)) {
        return Err(CoreError::Precondition("I must be a subset of X \\ Y".into()));
    }
    Ok(exchange_set(fam, x, y, i))
}
