use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mnat_bench::{laminar_chain, mnat_instance, near_miss};
use mnat_core::duality::fenchel_gap;
use mnat_core::exchange::{check_local, check_multiple_exchange, check_single_exchange};
use mnat_core::Subset;

fn exchange_checkers(c: &mut Criterion) {
    let mut group = c.benchmark_group("exchange");
    for n in [6, 8, 10] {
        let f = laminar_chain(n);
        group.bench_with_input(BenchmarkId::new("single", n), &f, |b, f| b.iter(|| check_single_exchange(black_box(f))));
        group.bench_with_input(BenchmarkId::new("local", n), &f, |b, f| b.iter(|| check_local(black_box(f))));
        let g = near_miss(n);
        group.bench_with_input(BenchmarkId::new("single_near_miss", n), &g, |b, g| {
            b.iter(|| check_single_exchange(black_box(g)))
        });
    }
    for n in [6, 8] {
        let f = laminar_chain(n);
        group.bench_with_input(BenchmarkId::new("multiple", n), &f, |b, f| {
            b.iter(|| check_multiple_exchange(black_box(f)))
        });
    }
    group.finish();
}

fn duality(c: &mut Criterion) {
    let mut group = c.benchmark_group("fenchel_gap");
    for n in [4, 6] {
        let f = mnat_instance(n);
        let dom = f.effective_domain();
        let (x, y) = (dom.members()[0], dom.members()[dom.len() - 1]);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| fenchel_gap(black_box(f), x, y, Subset::EMPTY, None).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exchange_checkers, duality);
criterion_main!(benches);
