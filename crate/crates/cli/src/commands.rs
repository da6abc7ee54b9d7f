use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use mnat_core::duality::{default_box_radius, dual_box_points, fenchel_gap};
use mnat_core::econ::{demand, equivalence_report, PriceSampler};
use mnat_core::exchange::{
    check_family, check_local, check_multiple_exchange, check_single_exchange, check_valuated_matroid,
    find_exchange_set, reevaluate,
};
use mnat_core::generators::{
    gen_modular_plus_concave, gen_rank_valuation, gen_weighted_independent, gen_weighted_matroid, MatroidKind,
    MatroidSpec,
};
use mnat_core::{
    format_rational, parse_instance, parse_rational, parse_subset, FamilyAxiom, Instance, PriceVector, Rational,
    SetFamily, SetFunction, Subset, Violation,
};
use serde_json::{json, Value};

use crate::{
    describe, Cli, Command, Format, GenKind, GenOutput, GlobalOpts, PropertyArg, Triple, CHECK_CAP_N,
    DUALITY_CAP_Y0, EXIT_FAIL, EXIT_PASS,
};

pub struct Output {
    pub text: String,
    pub code: u8,
}

type Run = Result<Output, String>;

fn load(path: &Path) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_function(path: &Path) -> Result<SetFunction, String> {
    match load(path)? {
        Instance::Function(f) => Ok(f),
        Instance::Family(_) => Err(format!("{} holds a set family; this command needs a set function", path.display())),
    }
}

fn cap(g: &GlobalOpts, what: &str, size: usize, limit: usize) -> Result<(), String> {
    if size > limit && !g.force {
        return Err(format!("{what} = {size} exceeds the cap of {limit}; pass --force to run anyway"));
    }
    Ok(())
}

fn code(pass: bool) -> u8 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn parse_triple(t: &Triple, n: usize) -> Result<(Subset, Subset, Subset), String> {
    let p = |s: &str, name: &str| parse_subset(s, n).map_err(|e| format!("--{name}: {e}"));
    Ok((p(&t.x, "x")?, p(&t.y, "y")?, p(&t.i, "i")?))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| format!("{what}: {p:?} is not a nonnegative integer")))
        .collect()
}

fn parse_prices(s: &str, what: &str) -> Result<PriceVector, String> {
    PriceVector::parse(s).map_err(|e| format!("{what}: {e}"))
}

struct Emitter<'a> {
    g: &'a GlobalOpts,
    start: Instant,
}

impl Emitter<'_> {
    fn finish(&self, mut report: Value, human: String, code: u8) -> Output {
        let ms = self.start.elapsed().as_secs_f64() * 1000.0;
        let text = match self.g.format {
            Format::Json => {
                if !self.g.no_timing {
                    report["elapsed_ms"] = json!((ms * 1000.0).round() / 1000.0);
                }
                format!("{}\n", serde_json::to_string_pretty(&report).expect("reports serialize"))
            }
            Format::Human => {
                let mut h = human;
                if !self.g.no_timing {
                    let _ = write!(h, "\n({ms:.1} ms)");
                }
                h.push('\n');
                h
            }
        };
        Output { text, code }
    }
}

pub fn run(cli: &Cli) -> Run {
    let e = Emitter { g: &cli.global, start: Instant::now() };
    match &cli.command {
        Command::Check { file, property } => check(&e, file, *property),
        Command::Exchange { file, triple } => exchange(&e, file, triple),
        Command::Duality { file, triple, radius } => duality(&e, file, triple, radius.as_deref()),
        Command::Demand { file, prices } => demand_cmd(&e, file, prices),
        Command::Equivalence { file, seed, count, step } => equivalence(&e, file, *seed, *count, step),
        Command::Gen { .. } => gen(&e, &cli.command),
    }
}

fn property_name(p: PropertyArg) -> &'static str {
    match p {
        PropertyArg::MnatExc => "mnat-exc",
        PropertyArg::MnatExcM => "mnat-exc-m",
        PropertyArg::ValuatedMatroid => "valuated-matroid",
        PropertyArg::Local => "local",
        PropertyArg::Snc => "snc",
        PropertyArg::BnatExc => "bnat-exc",
        PropertyArg::BnatExcM => "bnat-exc-m",
        PropertyArg::BnatExcPm => "bnat-exc-pm",
    }
}

fn family_axiom(p: PropertyArg) -> Option<FamilyAxiom> {
    match p {
        PropertyArg::BnatExc => Some(FamilyAxiom::Exchange),
        PropertyArg::BnatExcM => Some(FamilyAxiom::MultipleExchange),
        PropertyArg::BnatExcPm => Some(FamilyAxiom::SplitExchange),
        _ => None,
    }
}

fn check(e: &Emitter, file: &Path, property: PropertyArg) -> Run {
    let instance = load(file)?;
    let name = property_name(property);
    let n = match &instance {
        Instance::Function(f) => f.n(),
        Instance::Family(fam) => fam.n(),
    };
    cap(e.g, "n", n, CHECK_CAP_N)?;
    let verdict = match (family_axiom(property), &instance) {
        (Some(ax), Instance::Family(fam)) => check_family(fam, ax).map_err(|e| e.to_string())?,
        // a function is checked through its effective domain
        (Some(ax), Instance::Function(f)) => check_family(&f.effective_domain(), ax).map_err(|e| e.to_string())?,
        (None, Instance::Family(_)) => {
            return Err(format!("property {name} needs a set function, but {} holds a set family", file.display()))
        }
        (None, Instance::Function(f)) => match property {
            PropertyArg::MnatExc => check_single_exchange(f),
            PropertyArg::MnatExcM | PropertyArg::Snc => check_multiple_exchange(f),
            PropertyArg::ValuatedMatroid => check_valuated_matroid(f),
            _ => check_local(f),
        },
    };
    let report = json!({ "command": "check", "property": name, "n": n, "verdict": verdict });
    let human = format!("{name}: {}", describe::verdict(&verdict));
    Ok(e.finish(report, human, code(verdict.is_pass())))
}

fn exchange(e: &Emitter, file: &Path, triple: &Triple) -> Run {
    let f = load_function(file)?;
    let (x, y, i) = parse_triple(triple, f.n())?;
    let cert = find_exchange_set(&f, x, y, i).map_err(|e| e.to_string())?;
    let mut report = json!({ "command": "exchange", "x": x, "y": y, "i_set": i, "found": cert.is_some() });
    let human = match &cert {
        Some(c) => {
            report["j_set"] = json!(c.j_set);
            report["lhs"] = json!(c.lhs);
            report["rhs"] = json!(c.rhs);
            report["cardinality_match"] = json!(c.j_set.len() == i.len());
            let note = if c.j_set.len() == i.len() { " (|J| = |I|)" } else { "" };
            format!("J = {}{note}\n  f(X) + f(Y) = {} <= {} = f(X \\ I + J) + f(Y \\ J + I)", c.j_set, c.lhs, c.rhs)
        }
        None => {
            let (lhs, rhs) = reevaluate(&f, &Violation::MultipleExchange { x, y, i_set: i })
                .expect("multiple exchange witnesses carry values");
            report["lhs"] = json!(lhs);
            report["rhs"] = json!(rhs);
            format!("no J exists for X={x}, Y={y}, I={i}\n  lhs {lhs} > best rhs {rhs}")
        }
    };
    Ok(e.finish(report, human, code(cert.is_some())))
}

fn duality(e: &Emitter, file: &Path, triple: &Triple, radius: Option<&str>) -> Run {
    let f = load_function(file)?;
    let (x, y, i) = parse_triple(triple, f.n())?;
    let radius = radius.map(|r| parse_rational(r).map_err(|e| format!("--radius: {e}"))).transpose()?;
    let y0 = y.difference(x).len();
    cap(e.g, "|Y \\ X|", y0, DUALITY_CAP_Y0)?;
    let r = radius.unwrap_or_else(|| default_box_radius(&f));
    let rep = fenchel_gap(&f, x, y, i, radius).map_err(|e| e.to_string())?;
    let pass = rep.has_zero_gap();
    let mut human = format!(
        "Y0 = {}\nprimal {}\ndual {}\ngap {}",
        rep.y0,
        rep.primal,
        rep.dual,
        rep.gap.map_or("inf".to_string(), |g| format_rational(&g))
    );
    match &rep.q_star {
        Some(q) => {
            let _ = write!(human, "\nq* = {q}");
        }
        None => {
            let _ = write!(
                human,
                "\nno zero-gap price in the box of radius {} ({} points)",
                format_rational(&r),
                dual_box_points(&f, r, y0)
            );
        }
    }
    let report = json!({ "command": "duality", "x": x, "y": y, "i_set": i, "report": rep });
    Ok(e.finish(report, human, code(pass)))
}

fn demand_cmd(e: &Emitter, file: &Path, prices: &str) -> Run {
    let f = load_function(file)?;
    let p = parse_prices(prices, "--prices")?;
    let d = demand(&f, &p).map_err(|e| e.to_string())?;
    let members: Vec<String> = d.members.members().iter().map(ToString::to_string).collect();
    let human = format!("D(p) at p = {}: {{{}}}\n  value {}", d.price, members.join(", "), d.value);
    let report = json!({ "command": "demand", "prices": d.price, "members": d.members.members(), "value": d.value });
    Ok(e.finish(report, human, EXIT_PASS))
}

fn equivalence(e: &Emitter, file: &Path, seed: u64, count: usize, step: &str) -> Run {
    let f = load_function(file)?;
    cap(e.g, "n", f.n(), CHECK_CAP_N)?;
    let step = parse_rational(step).map_err(|e| format!("--step: {e}"))?;
    if step <= Rational::from_integer(0) {
        return Err("--step must be positive".into());
    }
    let mut sampler = PriceSampler::new(seed, count);
    sampler.grid_step = step;
    let rep = equivalence_report(&f, &sampler).map_err(|e| format!("internal error: {e}"))?;
    let mut human = String::new();
    for entry in &rep.entries {
        let how = match entry.samples {
            Some(k) => format!("sampled, {k} points"),
            None => "exact".into(),
        };
        let _ = writeln!(human, "{:<8} {:<20} {}", entry.property.name(), how, describe::verdict(&entry.verdict));
    }
    human.pop();
    let report = json!({
        "command": "equivalence",
        "seed": seed,
        "count": count,
        "step": format_rational(&step),
        "entries": rep.entries,
    });
    Ok(e.finish(report, human, code(rep.all_pass())))
}

fn gen(e: &Emitter, cmd: &Command) -> Run {
    let Command::Gen { kind, k, n, weights, blocks, caps, vertices, edges, g, output_as, output } = cmd else {
        unreachable!("gen is dispatched with its own arguments")
    };
    let weights = weights.as_deref().map(|w| parse_prices(w, "--weights")).transpose()?;
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| format!("--kind {kind:?} needs {flag}"));
    let json_value = if *kind == GenKind::ModularConcave {
        let g = g.as_deref().ok_or("--kind modular-concave needs --g")?;
        let g = parse_prices(g, "--g")?;
        let w = match (&weights, n) {
            (Some(w), _) => w.clone(),
            (None, Some(n)) => PriceVector::zeros(*n),
            (None, None) => return Err("--kind modular-concave needs --weights or --n".into()),
        };
        let f = gen_modular_plus_concave(&w, g.entries()).map_err(|e| e.to_string())?;
        serde_json::to_value(f.to_file())
    } else {
        let mkind = match kind {
            GenKind::Uniform => MatroidKind::Uniform { k: need(*k, "--k")?, n: need(*n, "--n")? },
            GenKind::Free => MatroidKind::Free { n: need(*n, "--n")? },
            GenKind::Partition => {
                let blocks = blocks.as_deref().ok_or("--kind partition needs --blocks")?;
                let blocks = blocks.split(';').map(|b| parse_list(b, "--blocks")).collect::<Result<Vec<_>, _>>()?;
                let caps = parse_list(caps.as_deref().ok_or("--kind partition needs --caps")?, "--caps")?;
                MatroidKind::Partition { blocks, caps }
            }
            GenKind::Graphic => {
                let edges = edges.as_deref().ok_or("--kind graphic needs --edges")?;
                let edges = edges
                    .split(',')
                    .map(|pair| {
                        let (a, b) = pair.split_once('-').ok_or_else(|| format!("--edges: {pair:?} is not u-v"))?;
                        let v = parse_list(&format!("{a},{b}"), "--edges")?;
                        Ok((v[0], v[1]))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                MatroidKind::Graphic { vertices: need(*vertices, "--vertices")?, edges }
            }
            GenKind::ModularConcave => unreachable!(),
        };
        let spec = MatroidSpec { kind: mkind, weights: weights.as_ref().map(|w| w.entries().to_vec()) };
        let what = output_as.unwrap_or(if weights.is_some() { GenOutput::Weighted } else { GenOutput::Rank });
        let err = |e: mnat_core::CoreError| e.to_string();
        match what {
            GenOutput::Weighted => serde_json::to_value(gen_weighted_matroid(&spec).map_err(err)?.to_file()),
            GenOutput::Independent => serde_json::to_value(gen_weighted_independent(&spec).map_err(err)?.to_file()),
            GenOutput::Rank => serde_json::to_value(gen_rank_valuation(&spec).map_err(err)?.to_file()),
            GenOutput::Bases => {
                let fam: SetFamily = spec.bases().map_err(err)?;
                serde_json::to_value(fam.to_file())
            }
        }
    }
    .expect("instance files serialize");
    let body = format!("{}\n", serde_json::to_string_pretty(&json_value).expect("instance files serialize"));
    match output {
        None => Ok(Output { text: body, code: EXIT_PASS }),
        Some(path) => {
            std::fs::write(path, &body).map_err(|err| format!("cannot write {}: {err}", path.display()))?;
            let report = json!({ "command": "gen", "output": path.display().to_string() });
            Ok(e.finish(report, format!("wrote {}", path.display()), EXIT_PASS))
        }
    }
}
