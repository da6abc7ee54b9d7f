use crate::setfn::SetFunction;
use crate::subset::Subset;
use crate::value::{ext_add, NEG_INF};
use crate::verdict::{FamilyAxiom, LocalFamily, Verdict, Violation, Witness};

use super::family::check_family_unchecked;
use super::scan_first;

/// Both sides of one local inequality at `X` with 0-based elements `e`.
pub(super) fn sides(f: &SetFunction, family: LocalFamily, x: Subset, e: &[usize]) -> (i128, i128) {
    let at = |els: &[usize]| f.raw(els.iter().fold(x, |s, &v| s.with(v)));
    match family {
        LocalFamily::Pair => {
            let (i, j) = (e[0], e[1]);
            (ext_add(at(&[i, j]), at(&[])), ext_add(at(&[i]), at(&[j])))
        }
        LocalFamily::Triple => {
            let (i, j, k) = (e[0], e[1], e[2]);
            let lhs = ext_add(at(&[i, j]), at(&[k]));
            let rhs = ext_add(at(&[i, k]), at(&[j])).max(ext_add(at(&[j, k]), at(&[i])));
            (lhs, rhs)
        }
        LocalFamily::Quadruple => {
            let (i, j, k, l) = (e[0], e[1], e[2], e[3]);
            let lhs = ext_add(at(&[i, j]), at(&[k, l]));
            let rhs = ext_add(at(&[i, k]), at(&[j, l])).max(ext_add(at(&[j, k]), at(&[i, l])));
            (lhs, rhs)
        }
    }
}

fn violation(f: &SetFunction, family: LocalFamily, x: Subset, e: &[usize]) -> Option<Witness> {
    let (lhs, rhs) = sides(f, family, x, e);
    (lhs != NEG_INF && lhs > rhs).then(|| Witness {
        violation: Violation::Local { family, x, elements: e.iter().map(|v| v + 1).collect() },
        lhs: Some(f.unscale(lhs)),
        rhs: Some(f.unscale(rhs)),
    })
}

/// Scans one inequality family; tuples are visited with `X` outermost and
/// the elements in increasing lexicographic order.
fn scan_family(f: &SetFunction, family: LocalFamily) -> Option<Witness> {
    let n = f.n();
    let full = f.ground();
    scan_first(1u32 << n, |xb| {
        let x = Subset(xb);
        let free: Vec<usize> = full.difference(x).iter().collect();
        let m = free.len();
        match family {
            LocalFamily::Pair => {
                for a in 0..m {
                    for b in a + 1..m {
                        if let Some(w) = violation(f, family, x, &[free[a], free[b]]) {
                            return Some(w);
                        }
                    }
                }
            }
            // symmetric in i, j: take i < j and any other k
            LocalFamily::Triple => {
                for a in 0..m {
                    for b in a + 1..m {
                        for c in (0..m).filter(|&c| c != a && c != b) {
                            if let Some(w) = violation(f, family, x, &[free[a], free[b], free[c]]) {
                                return Some(w);
                            }
                        }
                    }
                }
            }
            // depends only on the split {{i,j},{k,l}}: take i < j, k < l, i < k
            LocalFamily::Quadruple => {
                for a in 0..m {
                    for b in a + 1..m {
                        for c in a + 1..m {
                            if c == b {
                                continue;
                            }
                            for d in c + 1..m {
                                if d == b {
                                    continue;
                                }
                                let e = [free[a], free[b], free[c], free[d]];
                                if let Some(w) = violation(f, family, x, &e) {
                                    return Some(w);
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    })
}

/// Local characterization of M♮-concavity: `dom f` satisfies (B♮-EXC) and the
/// three local inequality families hold. The domain condition is checked
/// first, then families (i), (ii), (iii) in that order.
pub fn check_local(f: &SetFunction) -> Verdict {
    let dom = f.effective_domain();
    if let Verdict::Fail(w) = check_family_unchecked(&dom, FamilyAxiom::Exchange) {
        return Verdict::Fail(w);
    }
    for family in [LocalFamily::Pair, LocalFamily::Triple, LocalFamily::Quadruple] {
        if let Some(w) = scan_family(f, family) {
            return Verdict::Fail(w);
        }
    }
    Verdict::Pass
}
