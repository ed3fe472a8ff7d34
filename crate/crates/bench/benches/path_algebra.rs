use criterion::{black_box, criterion_group, criterion_main, Criterion};
use smoothbound_core::gaussian::BrownianMotion;
use smoothbound_core::harness::{Innovation, ProcessModel};
use smoothbound_core::partitions::p2_partitions;
use smoothbound_core::tightness::{chaining_bound, ChentsovCondition, ConditionForm, Validity};

fn bench_regularization(c: &mut Criterion) {
    let model = ProcessModel::IidPartialSum {
        distribution: Innovation::Rademacher,
        n: 1000,
    };
    let step_path = model.sample_path(1.0, 1, 0);
    let bm = BrownianMotion::uniform(1, 1.0, 800, 2).unwrap();
    let linear_path = bm.sample(0);

    c.bench_function("sup_diff step path (1000 knots)", |b| {
        let reg = step_path.regularize(0.05).unwrap();
        b.iter(|| black_box(reg.sup_diff()))
    });
    c.bench_function("sup_diff linear path (800 knots)", |b| {
        let reg = linear_path.regularize(0.01).unwrap();
        b.iter(|| black_box(reg.sup_diff()))
    });
    c.bench_function("grad_energy step path", |b| {
        let reg = step_path.regularize(0.05).unwrap();
        b.iter(|| black_box(reg.grad_energy()))
    });
    c.bench_function("modulus_of_continuity (1000 knots)", |b| {
        b.iter(|| black_box(step_path.modulus_of_continuity(0.05).unwrap()))
    });
}

fn bench_envelopes(c: &mut Criterion) {
    let cond = ChentsovCondition::new(
        3.0,
        2.0,
        4.0,
        Validity::AllScales,
        ConditionForm::SingleIncrement,
    )
    .unwrap();
    c.bench_function("chaining_bound", |b| {
        b.iter(|| black_box(chaining_bound(&cond, None, 1, 0.05, 0.5, 1.0, 1).unwrap()))
    });
    c.bench_function("p2_partitions(8)", |b| {
        b.iter(|| black_box(p2_partitions(8).unwrap().len()))
    });
}

criterion_group!(benches, bench_regularization, bench_envelopes);
criterion_main!(benches);
