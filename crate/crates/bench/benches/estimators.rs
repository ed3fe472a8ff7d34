use criterion::{black_box, criterion_group, criterion_main, Criterion};
use smoothbound_core::bounds::{
    indicator_discrepancy_bound, optimize_bound, Objective, SearchBox, SearchBudget, TheoremInputs,
};
use smoothbound_core::functionals::{Functional, SetK};
use smoothbound_core::paths::PiecewisePath;
use smoothbound_core::smoothing::{derivative_estimate, smooth_eval, McConfig, SmoothingParams};
use smoothbound_core::tightness::TailEnvelope;

fn bench_smoothing_estimators(c: &mut Criterion) {
    let h = Functional::sup_indicator(1.0);
    let w = PiecewisePath::scalar_step(1.0, &[(0.0, 0.1), (0.4, -0.2)]).unwrap();
    let x = PiecewisePath::indicator(1.0, 0.3).unwrap();
    let params = SmoothingParams::new(0.2, 0.5, 1.0, 1).unwrap();
    let mc = McConfig {
        samples: 1000,
        seed: 1,
    };
    c.bench_function("smooth_eval (1000 samples)", |b| {
        b.iter(|| black_box(smooth_eval(&h, &w, &params, &mc).unwrap().estimate))
    });
    c.bench_function("derivative_estimate order 1 (1000 samples)", |b| {
        b.iter(|| {
            black_box(
                derivative_estimate(&h, &w, &[&x], &params, &mc)
                    .unwrap()
                    .estimate,
            )
        })
    });
}

fn bench_bound_assembly(c: &mut Criterion) {
    let inputs = TheoremInputs {
        kappa1: 0.01,
        kappa2: 0.01,
        horizon: 1.0,
        dim: 1,
        x_tail: TailEnvelope::IidPartialSum {
            p: 3.0,
            abs_moment: 1.0,
            n: 10_000,
            horizon: 1.0,
            rosenthal_constant: None,
        },
        z_tail: TailEnvelope::GaussianRegularization {
            k: 1.0,
            tau: 1.0,
            gamma: 4.0,
            horizon: 1.0,
        },
        set: SetK::sup_level_for_brownian(1.0, 1.0).unwrap(),
        lipschitz: None,
    };
    c.bench_function("indicator_discrepancy_bound", |b| {
        b.iter(|| {
            black_box(
                indicator_discrepancy_bound(&inputs, 0.2, 0.4, 0.3, 1.0)
                    .unwrap()
                    .total,
            )
        })
    });
    let search_box = SearchBox {
        epsilon: (0.0125, 0.9),
        delta: (0.05, 0.9),
        theta: (0.02, 1.5),
        gamma: (0.05, 4.0),
    };
    let budget = SearchBudget {
        grid_points: 5,
        descent_rounds: 1,
        golden_iters: 8,
        ..SearchBudget::default()
    };
    c.bench_function("optimize_bound (5^4 grid + descent)", |b| {
        b.iter(|| {
            black_box(
                optimize_bound(&inputs, Objective::Indicator, &search_box, &budget)
                    .unwrap()
                    .value,
            )
        })
    });
}

criterion_group!(benches, bench_smoothing_estimators, bench_bound_assembly);
criterion_main!(benches);
