use mnat_core::{Verdict, Violation};

pub fn violation(v: &Violation) -> String {
    match v {
        Violation::SingleExchange { x, y, i } => format!("single exchange fails at X={x}, Y={y}, i={i}"),
        Violation::MultipleExchange { x, y, i_set } => {
            format!("multiple exchange fails at X={x}, Y={y}, I={i_set}")
        }
        Violation::UnequalCardinality { x, y } => {
            format!("effective domain is not equicardinal: |{x}| = {}, |{y}| = {}", x.len(), y.len())
        }
        Violation::ValuatedExchange { x, y, i } => format!("valuated exchange fails at X={x}, Y={y}, i={i}"),
        Violation::Local { family, x, elements } => {
            let names = ["i", "j", "k", "l"];
            let els: Vec<String> = names.iter().zip(elements).map(|(n, e)| format!("{n}={e}")).collect();
            format!("local inequality family {} fails at X={x}, {}", family.label(), els.join(", "))
        }
        Violation::FamilyExchange { axiom, x, y, i, part } => {
            let name = serde_json::to_value(axiom).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let part = part.map(|p| format!(" (part {})", if matches!(p, mnat_core::SplitPart::A) { "a" } else { "b" }));
            format!("{name} fails at X={x}, Y={y}, i={i}{}", part.unwrap_or_default())
        }
        Violation::FamilyMultipleExchange { x, y, i_set } => format!("bnat-exc-m fails at X={x}, Y={y}, I={i_set}"),
        Violation::Submodularity { p, p2 } => format!("conjugate not submodular at p={p}, p'={p2}"),
        Violation::GrossSubstitutes { p, q, x } => format!("gross substitutes fails at p={p}, q={q}, X={x}"),
        Violation::SingleImprovement { p, x } => format!("single improvement fails at p={p}, X={x}"),
        Violation::NoComplementarities { p, x, y, i_set, simultaneous } => format!(
            "{} fails at p={p}, X={x}, Y={y}, I={i_set}",
            if *simultaneous { "no complementarities (simultaneous)" } else { "no complementarities" }
        ),
    }
}

pub fn verdict(v: &Verdict) -> String {
    match v {
        Verdict::Pass => "PASS".into(),
        Verdict::Fail(w) => {
            let mut s = format!("FAIL\n  {}", violation(&w.violation));
            match (&w.violation, &w.lhs, &w.rhs) {
                (Violation::SingleImprovement { .. }, Some(l), Some(r)) => {
                    s.push_str(&format!("\n  f[-p](X) = {l}, best neighbour {r}"));
                }
                (_, Some(l), Some(r)) => s.push_str(&format!("\n  lhs {l} > rhs {r}")),
                _ => {}
            }
            s
        }
    }
}
