use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{rngs::StdRng, SeedableRng};
use rwpair::catalog;
use rwpair::chord::enumerate_chord;
use rwpair::connections::Connection;
use rwpair::diagrams::{enumerate_trivalent, theta};
use rwpair::weights::{ChordWeights, Mode, TrivalentWeights};

fn connection(ex: &catalog::Example) -> Connection {
    Connection::extend_action(&ex.pair)
        .unwrap()
        .randomize_complement(&mut StdRng::seed_from_u64(1))
        .make_torsion_free()
        .unwrap()
        .make_symplectic(&ex.omega)
        .unwrap()
}

fn trivalent(c: &mut Criterion) {
    let ex = catalog::sl4_min().unwrap();
    let conn = connection(&ex);
    let order_two = enumerate_trivalent(2).unwrap().into_iter().find(|d| d.is_connected() && !d.has_loop()).unwrap();
    let mut group = c.benchmark_group("trivalent sl4-min");
    group.sample_size(10);
    for mode in [Mode::Sequential, Mode::Parallel] {
        let tw = TrivalentWeights::new(&conn, &ex.omega).unwrap().with_mode(mode);
        group.bench_with_input(BenchmarkId::new("theta", format!("{mode:?}")), &theta(), |b, d| {
            b.iter(|| tw.cocycle(d, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("order 2", format!("{mode:?}")), &order_two, |b, d| {
            b.iter(|| tw.cocycle(d, None).unwrap())
        });
    }
    group.finish();
}

fn chord(c: &mut Criterion) {
    let ex = catalog::sl4_min().unwrap();
    let conn = connection(&ex);
    let diagrams = enumerate_chord(2).unwrap();
    let mut group = c.benchmark_group("chord sl4-min");
    group.sample_size(10);
    for mode in [Mode::Sequential, Mode::Parallel] {
        let cw = ChordWeights::new(&conn, &ex.omega).unwrap().with_mode(mode);
        group.bench_with_input(BenchmarkId::new("order 2", format!("{mode:?}")), &diagrams, |b, ds| {
            b.iter(|| ds.iter().map(|d| cw.cocycle(d, 0).unwrap()).collect::<Vec<_>>())
        });
    }
    group.finish();
}

criterion_group!(benches, trivalent, chord);
criterion_main!(benches);
