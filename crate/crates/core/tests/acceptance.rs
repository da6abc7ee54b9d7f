//! Acceptance sweeps. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use mnat_core::duality::{
    big_m_threshold, big_m_vectors_with, check_submodular_pair, conjugate, default_box_radius, fenchel_gap,
};
use mnat_core::econ::{check_gs_at, check_nc_at, check_si_at, equivalence_report, PriceSampler, Property};
use mnat_core::exchange::{
    check_family, check_local, check_multiple_exchange, check_single_exchange, find_base_exchange,
    find_exchange_set, maximizer_exchange,
};
use mnat_core::generators::{
    comp, enumerate_functions, gen_weighted_matroid, k4_trees, mnat_corpus, mutate, EnumerationSpec, MatroidKind,
    MatroidSpec,
};
use mnat_core::{ExtValue, FamilyAxiom, PriceVector, Rational, SetFamily, SetFunction, Subset, Violation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}

fn random_subset_of(rng: &mut ChaCha8Rng, s: Subset) -> Subset {
    s.iter().filter(|_| rng.gen_bool(0.5)).fold(Subset::EMPTY, |acc, e| acc.with(e))
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i128) -> Rational {
    let den = rng.gen_range(1..=4);
    rat(rng.gen_range(-bound * den..=bound * den), den)
}

fn random_prices(rng: &mut ChaCha8Rng, n: usize, bound: i128) -> PriceVector {
    PriceVector::new((0..n).map(|_| random_rational(rng, bound)).collect())
}

/// A random `(X, Y, I)` with `X, Y ∈ dom f` and `I ⊆ X \ Y`.
fn random_triple(rng: &mut ChaCha8Rng, f: &SetFunction) -> (Subset, Subset, Subset) {
    let dom = f.effective_domain();
    let x = *dom.members().choose(rng).unwrap();
    let y = *dom.members().choose(rng).unwrap();
    let i = random_subset_of(rng, x.difference(y));
    (x, y, i)
}

fn corpus(seed: u64, count: usize, max_n: usize) -> Result<Vec<SetFunction>, String> {
    mnat_corpus(seed, count, max_n).map_err(|e| format!("corpus generation failed: {e}"))
}

fn criterion_1() -> Outcome {
    let alphabets = [
        (3, vec![ExtValue::NegInfinity, ExtValue::int(0), ExtValue::int(1)]),
        (2, vec![ExtValue::NegInfinity, ExtValue::int(0), ExtValue::int(1), ExtValue::int(2)]),
    ];
    let mut summary = Vec::new();
    for (n, alphabet) in alphabets {
        let spec = EnumerationSpec::new(n, alphabet).map_err(|e| e.to_string())?;
        let (mut total, mut passing) = (0u64, 0u64);
        for f in enumerate_functions(&spec).map_err(|e| e.to_string())? {
            let single = check_single_exchange(&f).is_pass();
            let local = check_local(&f).is_pass();
            let multiple = check_multiple_exchange(&f).is_pass();
            ensure(single == local && single == multiple, || {
                format!("verdicts differ on {f:?}: single {single}, local {local}, multiple {multiple}")
            })?;
            total += 1;
            passing += u64::from(single);
        }
        ensure(u128::from(total) == spec.count(), || format!("expected {} functions, saw {total}", spec.count()))?;
        summary.push(format!("n={n}: {total} functions, {passing} M-natural-concave"));
    }
    Ok(summary.join("; "))
}

fn weighted_matroid_instance(rng: &mut ChaCha8Rng) -> SetFunction {
    let kind = if rng.gen_bool(0.6) {
        let k = rng.gen_range(1..=4);
        MatroidKind::Uniform { k, n: rng.gen_range(k..=8) }
    } else {
        let vertices = rng.gen_range(2..=5);
        let mut all: Vec<(usize, usize)> = (1..=vertices).flat_map(|u| (u + 1..=vertices).map(move |v| (u, v))).collect();
        all.shuffle(rng);
        all.truncate(rng.gen_range(1..=all.len().min(8)));
        MatroidKind::Graphic { vertices, edges: all }
    };
    let n = MatroidSpec::new(kind.clone()).n();
    let weights = (0..n).map(|_| random_rational(rng, 5)).collect();
    gen_weighted_matroid(&MatroidSpec::with_weights(kind, weights)).expect("valid matroid parameters")
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tuples = 0u64;
    for _ in 0..200 {
        let f = weighted_matroid_instance(&mut rng);
        let bases = f.effective_domain();
        for &x in bases.members() {
            for &y in bases.members() {
                for i in x.difference(y).subsets() {
                    let cert = find_exchange_set(&f, x, y, i).map_err(|e| e.to_string())?;
                    let cert = cert.ok_or_else(|| format!("no exchange set for X={x}, Y={y}, I={i} on {f:?}"))?;
                    ensure(cert.j_set.len() == i.len(), || {
                        format!("|J| = {} but |I| = {} at X={x}, Y={y}, I={i}", cert.j_set.len(), i.len())
                    })?;
                    tuples += 1;
                }
            }
        }
    }
    Ok(format!("200 weighted matroids, {tuples} (X,Y,I) tuples, |J| = |I| throughout"))
}

/// Integer partitions of `n` as non-increasing block sizes.
fn integer_partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=max.min(n))
        .rev()
        .flat_map(|first| {
            integer_partitions(n - first, first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn all_caps(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![Vec::new()], |acc, &s| {
        acc.into_iter().flat_map(|prefix| (0..=s).map(move |c| [prefix.clone(), vec![c]].concat())).collect()
    })
}

fn check_basis_family(fam: &SetFamily, name: &str) -> Result<u64, String> {
    let v = check_family(fam, FamilyAxiom::MultipleExchange).map_err(|e| e.to_string())?;
    ensure(v.is_pass(), || format!("{name}: {:?}", v.witness().map(|w| &w.violation)))?;
    let mut count = 0;
    for &x in fam.members() {
        for &y in fam.members() {
            for i in x.difference(y).subsets() {
                let j = find_base_exchange(fam, x, y, i).map_err(|e| e.to_string())?;
                ensure(j.is_some(), || format!("{name}: no J for X={x}, Y={y}, I={i}"))?;
                count += 1;
            }
        }
    }
    Ok(count)
}

fn criterion_3() -> Outcome {
    let trees = k4_trees();
    ensure(trees.len() == 16, || format!("K4 has {} spanning trees", trees.len()))?;
    let mut tuples = check_basis_family(&trees, "K4 trees")?;
    let mut families = 1;
    for n in 0..=8 {
        for k in 0..=n {
            let fam = MatroidSpec::new(MatroidKind::Uniform { k, n }).bases().map_err(|e| e.to_string())?;
            tuples += check_basis_family(&fam, &format!("U({k},{n})"))?;
            families += 1;
        }
        // every partition matroid up to relabelling: block sizes and capacities
        for sizes in integer_partitions(n, n) {
            let mut next = 1;
            let blocks: Vec<Vec<usize>> = sizes
                .iter()
                .map(|&s| {
                    let b = (next..next + s).collect();
                    next += s;
                    b
                })
                .collect();
            for caps in all_caps(&sizes) {
                let spec = MatroidSpec::new(MatroidKind::Partition { blocks: blocks.clone(), caps: caps.clone() });
                let fam = spec.bases().map_err(|e| e.to_string())?;
                tuples += check_basis_family(&fam, &format!("partition {sizes:?} caps {caps:?}"))?;
                families += 1;
            }
        }
    }
    Ok(format!("{families} basis families, {tuples} (X,Y,I) tuples"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let instances = corpus(40, 100, 6)?;
    let (mut duals, mut weak) = (0u64, 0u64);
    let mut max_norm = 0;
    for f in &instances {
        let radius = default_box_radius(f);
        let triples: Vec<_> = (0..10).map(|_| random_triple(&mut rng, f)).collect();
        for &(x, y, i) in &triples {
            let rep = fenchel_gap(f, x, y, i, None).map_err(|e| e.to_string())?;
            ensure(rep.has_zero_gap(), || format!("gap {:?} for X={x}, Y={y}, I={i} on {f:?}", rep.gap))?;
            let q = rep.q_star.as_ref().ok_or("zero gap without q_star")?;
            ensure(q.entries().iter().all(|v| v.is_integer() && *v <= radius && -*v <= radius), || {
                format!("q_star {q} not integral or outside radius {radius}")
            })?;
            max_norm = max_norm.max(q.entries().iter().map(|v| v.to_integer().abs()).max().unwrap_or(0));
            duals += 1;
        }
        for k in 0..1000 {
            let (x, y, i) = triples[k % triples.len()];
            let slices = f.slice(x, y, i).map_err(|e| e.to_string())?;
            let q = random_prices(&mut rng, slices.y0.len(), radius.to_integer());
            let g = conjugate(&slices.f1, &q).map_err(|e| e.to_string())?
                + conjugate(&slices.f2, &q.neg()).map_err(|e| e.to_string())?;
            let primal = slices.primal();
            ensure(g >= primal, || format!("weak duality fails at q={q}: {g} < {primal}"))?;
            weak += 1;
        }
    }
    Ok(format!("{duals} zero-gap certificates (largest |q*| entry {max_norm}), {weak} weak-duality samples"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let instances = corpus(50, 100, 6)?;
    for t in 0..1000 {
        let f = &instances[t % instances.len()];
        let (x, y, i) = random_triple(&mut rng, f);
        let q = random_prices(&mut rng, y.difference(x).len(), 6);
        let m = big_m_threshold(f, &q);
        for mult in [1, 10] {
            big_m_vectors_with(f, x, y, i, &q, m * int(mult))
                .map_err(|e| format!("M = {mult}x threshold, X={x}, Y={y}, I={i}, q={q}: {e}"))?;
        }
    }
    Ok("1000 tuples, four relations exact at M and 10M".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let instances = corpus(60, 100, 6)?;
    let mut pairs = 0u64;
    for f in &instances {
        for _ in 0..1000 {
            let p = random_prices(&mut rng, f.n(), 8);
            let p2 = random_prices(&mut rng, f.n(), 8);
            let v = check_submodular_pair(f, &p, &p2).map_err(|e| e.to_string())?;
            ensure(v.is_pass(), || format!("submodularity fails at p={p}, p'={p2}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} price pairs over {} instances", instances.len()))
}

fn criterion_7() -> Outcome {
    let instances = corpus(70, 60, 5)?;
    let mut samples = 0usize;
    for (k, f) in instances.iter().enumerate() {
        let sampler = PriceSampler::new(700 + k as u64, 150);
        let rep = equivalence_report(f, &sampler).map_err(|e| e.to_string())?;
        ensure(rep.all_pass(), || format!("refutation on corpus instance {k}: {rep:?}"))?;
        samples += rep.entries.iter().filter_map(|e| e.samples).max().unwrap_or(0);
    }
    ensure(samples >= 10_000, || format!("only {samples} sampled prices"))?;

    let c = comp();
    let half = |a, b| PriceVector::new(vec![rat(a, 2), rat(b, 2)]);
    let gs = check_gs_at(&c, &half(3, 3), &half(3, 5)).map_err(|e| e.to_string())?;
    ensure(matches!(gs.witness().map(|w| &w.violation), Some(Violation::GrossSubstitutes { .. })), || {
        "GS not refuted on COMP at p=(3/2,3/2), q=(3/2,5/2)".into()
    })?;
    let si = check_si_at(&c, &PriceVector::from_ints(&[2, 2])).map_err(|e| e.to_string())?;
    ensure(!si.is_pass(), || "SI not refuted on COMP at p=(2,2)".into())?;
    let nc = check_nc_at(&c, &half(3, 3), false).map_err(|e| e.to_string())?;
    ensure(!nc.is_pass(), || "NC not refuted on COMP at p=(3/2,3/2)".into())?;
    let rep = equivalence_report(&c, &PriceSampler::new(7, 100)).map_err(|e| e.to_string())?;
    for p in [Property::SingleExchange, Property::StrongNoComplementarities, Property::Local] {
        ensure(!rep.get(p).verdict.is_pass(), || format!("{} passes on COMP", p.name()))?;
    }
    Ok(format!("{samples} sampled prices on {} instances without refutation; COMP refuted as documented", instances.len()))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let instances = corpus(80, 100, 5)?;
    let mut exchanges = 0u64;
    let mut failing = 0;
    for (k, f) in instances.iter().enumerate() {
        // half of the instances get a mutant partner so both verdicts are exercised
        let mutant = mutate(f, k as u64, int(rng.gen_range(1..=3)));
        for g in [f, &mutant] {
            let base = (
                check_single_exchange(g).is_pass(),
                check_multiple_exchange(g).is_pass(),
                check_local(g).is_pass(),
            );
            failing += usize::from(!base.0);
            for _ in 0..10 {
                let p = random_prices(&mut rng, g.n(), 4);
                let shifted = g.shift_by_price(&p).map_err(|e| e.to_string())?;
                let now = (
                    check_single_exchange(&shifted).is_pass(),
                    check_multiple_exchange(&shifted).is_pass(),
                    check_local(&shifted).is_pass(),
                );
                ensure(now == base, || format!("verdicts {base:?} become {now:?} under p={p}"))?;
                if !base.0 {
                    continue;
                }
                let argmax = shifted.argmax();
                for &x in argmax.members() {
                    for &y in argmax.members() {
                        for i in x.difference(y).subsets() {
                            let j = maximizer_exchange(&shifted, x, y, i).map_err(|e| e.to_string())?;
                            ensure(j.is_some(), || format!("no maximizer exchange at X={x}, Y={y}, I={i}, p={p}"))?;
                            exchanges += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("200 instances ({failing} failing mutants), 2000 shifts, {exchanges} maximizer exchanges"))
}

fn criterion_9() -> Outcome {
    let mut counts = [0u64; 3];
    for mask in 1..=u16::MAX as u64 {
        let fam = SetFamily::from_mask(4, mask);
        let pass = |ax| check_family(&fam, ax).map(|v| v.is_pass()).map_err(|e| e.to_string());
        let m = pass(FamilyAxiom::MultipleExchange)?;
        let pm = pass(FamilyAxiom::SplitExchange)?;
        let e = pass(FamilyAxiom::Exchange)?;
        ensure(!m || pm, || format!("family {mask:#06x} passes B-EXC-m but not B-EXC-pm"))?;
        ensure(!pm || e, || format!("family {mask:#06x} passes B-EXC-pm but not B-EXC"))?;
        counts[0] += u64::from(m);
        counts[1] += u64::from(pm);
        counts[2] += u64::from(e);
    }
    // effective domains of M-natural-concave functions satisfy B-EXC-m
    let spec = EnumerationSpec::new(3, vec![ExtValue::NegInfinity, ExtValue::int(0), ExtValue::int(1)])
        .map_err(|e| e.to_string())?;
    let mut domains = 0;
    let instances = corpus(90, 100, 6)?;
    let enumerated = enumerate_functions(&spec).map_err(|e| e.to_string())?.filter(|f| check_single_exchange(f).is_pass());
    for f in enumerated.chain(instances) {
        let v = check_family(&f.effective_domain(), FamilyAxiom::MultipleExchange).map_err(|e| e.to_string())?;
        ensure(v.is_pass(), || format!("dom f fails B-EXC-m for {f:?}"))?;
        domains += 1;
    }
    Ok(format!(
        "65535 families: {} pass B-EXC-m, {} B-EXC-pm, {} B-EXC; {domains} M-natural-concave domains pass B-EXC-m",
        counts[0], counts[1], counts[2]
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exhaustive tiny-universe equivalence", criterion_1),
        ("valuated-matroid cardinality", criterion_2),
        ("matroid-bases multiple exchange", criterion_3),
        ("Fenchel duality", criterion_4),
        ("big-M construction", criterion_5),
        ("submodularity of the conjugate", criterion_6),
        ("equivalence sampling", criterion_7),
        ("price-shift invariance and maximizer exchange", criterion_8),
        ("domain projection and implication chain", criterion_9),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
