//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line (run with `-- --nocapture` to see them as they pass).
//!
//! Every tolerance is pinned here, in code. Oracles are independent of the
//! implementation paths they check: brute-force set-partition enumeration,
//! adaptive quadrature of pointwise-evaluated gradients, common-random-number
//! finite differences, and Monte-Carlo tails on simulated paths.

use rand::Rng;
use smoothbound_core::bounds::{
    brownian_shift_term, indicator_rate_exponent, indicator_rate_exponent_limit,
    lipschitz_rate_exponent, lipschitz_rate_exponent_limit, optimize_bound,
    partial_sum_rate_params, Objective, Ratio, SearchBox, SearchBudget,
};
use smoothbound_core::functionals::{Functional, SetK};
use smoothbound_core::gaussian::brownian_sup_tail_bound;
use smoothbound_core::harness::{
    empirical_brownian_reg_tail, estimate_set_discrepancy, run_validate, Budgets, Innovation,
    ProcessModel, Suite,
};
use smoothbound_core::partitions::p2_partitions;
use smoothbound_core::paths::{grad_energy, InterpMode, PiecewisePath};
use smoothbound_core::rng::{sample_stream, with_worker_pool};
use smoothbound_core::smoothing::{
    d2_covariance_estimate, derivative_estimate, finite_difference_estimate,
    smoothing_norm_constant, McConfig, SmoothingParams,
};
use smoothbound_core::tightness::{empirical_mod_tail, iid_partial_sum_envelope, TailEnvelope};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

#[test]
fn criterion_1_rate_exponents_exact() {
    let checks = [
        (
            indicator_rate_exponent(3).unwrap(),
            Ratio::new(1, 56),
            "p=3 indicator",
        ),
        (
            indicator_rate_exponent_limit(),
            Ratio::new(1, 20),
            "indicator limit",
        ),
        (
            lipschitz_rate_exponent(3).unwrap(),
            Ratio::new(1, 42),
            "p=3 Lipschitz",
        ),
        (
            lipschitz_rate_exponent_limit(),
            Ratio::new(1, 18),
            "Lipschitz limit",
        ),
    ];
    let pass = checks.iter().all(|(got, want, _)| got == want);
    let detail = checks
        .iter()
        .map(|(got, _, name)| format!("{name} = {got}"))
        .collect::<Vec<_>>()
        .join(", ");
    report("criterion 1 (rate exponents)", pass, &detail);
}

#[test]
fn criterion_2_constant_evaluation() {
    let c = smoothing_norm_constant(1.0, 1.0, 1.0).unwrap();
    let direct = 1.0 + 1.0 + 2f64.sqrt() + (50.0 / std::f64::consts::PI).sqrt();
    let mut pass = (c - direct).abs() <= 1e-12 * direct;
    let mut detail = format!("norm constant {c} vs direct {direct}");
    for n in [100u64, 10_000] {
        let delta = 0.37;
        let gamma = delta * (10.0 * (n as f64).ln()).sqrt();
        let term = brownian_shift_term(gamma, delta, 1, 1.0);
        let want = 4.0 * (n as f64).powi(-5);
        let ok = (term - want).abs() <= 1e-12 * want;
        pass &= ok;
        detail.push_str(&format!(
            "; shift term at n={n}: {term:e} vs 4n^-5 = {want:e}"
        ));
    }
    report("criterion 2 (constant evaluation)", pass, &detail);
}

/// All set partitions via restricted growth strings, filtered to block size
/// at most two — the brute-force oracle.
fn brute_force_small_block_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, maxv: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == rgs.len() {
            out.push(rgs.clone());
            return;
        }
        for v in 0..=maxv + 1 {
            rgs[i] = v;
            rec(i + 1, maxv.max(v), rgs, out);
        }
    }
    let mut all = Vec::new();
    if n == 0 {
        all.push(Vec::new());
    } else {
        let mut rgs = vec![0usize; n];
        rec(1, 0, &mut rgs, &mut all);
    }
    let mut result = Vec::new();
    for rgs in all {
        let nblocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); nblocks];
        for (elem, &b) in rgs.iter().enumerate() {
            blocks[b].push(elem);
        }
        if blocks.iter().all(|b| b.len() <= 2) {
            blocks.sort();
            result.push(blocks);
        }
    }
    result.sort();
    result.dedup();
    result
}

#[test]
fn criterion_3_partition_enumeration() {
    let expected_counts = [1usize, 1, 2, 4, 10, 26];
    let mut pass = true;
    let mut counts = Vec::new();
    for n in 0..=5usize {
        let enumerated: Vec<Vec<Vec<usize>>> = p2_partitions(n)
            .unwrap()
            .iter()
            .map(|p| {
                p.blocks()
                    .iter()
                    .map(|b| match *b {
                        smoothbound_core::partitions::Block::Singleton(i) => vec![i],
                        smoothbound_core::partitions::Block::Pair(i, j) => vec![i, j],
                    })
                    .collect()
            })
            .collect();
        let oracle = brute_force_small_block_partitions(n);
        pass &= enumerated == oracle && enumerated.len() == expected_counts[n];
        counts.push(enumerated.len());
    }
    report(
        "criterion 3 (partition enumeration)",
        pass,
        &format!("counts {counts:?} match the brute-force oracle"),
    );
}

#[test]
fn criterion_4_derivatives_vs_finite_differences() {
    let horizon = 1.0;
    let h = Functional::smooth_cylinder(
        vec![0.25, 0.5, 0.9],
        vec![0.0, -0.2, 0.3],
        vec![0.8, 1.1, 0.6],
    )
    .unwrap();
    let w = PiecewisePath::scalar_step(horizon, &[(0.0, 0.2), (0.4, -0.1)]).unwrap();
    let x = PiecewisePath::indicator(horizon, 0.3).unwrap();
    let y = PiecewisePath::indicator_difference(horizon, 0.3, 0.7).unwrap();
    let params = SmoothingParams::new(0.2, 0.5, horizon, 1).unwrap();
    let mc_g = McConfig {
        samples: 100_000,
        seed: 11,
    };
    let mc_f = McConfig {
        samples: 100_000,
        seed: 12,
    };
    let cases: [(&str, Vec<&PiecewisePath>); 3] = [
        ("order 1 along the single jump", vec![&x]),
        ("order 1 along the window", vec![&y]),
        ("order 2 mixed", vec![&x, &y]),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (name, dirs) in cases {
        let g = derivative_estimate(&h, &w, &dirs, &params, &mc_g).unwrap();
        let fd = finite_difference_estimate(&h, &w, &dirs, &params, &mc_f, None).unwrap();
        let combined = (g.std_error.powi(2) + fd.std_error.powi(2)).sqrt();
        let ok = (g.estimate - fd.estimate).abs() <= 3.0 * combined;
        pass &= ok;
        detail.push_str(&format!(
            "{name}: {:.5} vs {:.5} (3se {:.5}); ",
            g.estimate,
            fd.estimate,
            3.0 * combined
        ));
    }
    report(
        "criterion 4 (stochastic derivatives vs finite differences)",
        pass,
        &detail,
    );
}

#[test]
fn criterion_5_cross_derivative_envelope() {
    let horizon = 1.0;
    let h = Functional::sup_indicator(0.5);
    let w = PiecewisePath::constant(1, horizon, &[0.0]).unwrap();
    let mut pass = true;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut k = 0u64;
    for &r in &[0.2, 0.6] {
        for &(s, t) in &[(0.3, 0.5), (0.25, 0.75), (0.45, 0.55)] {
            for &(eps, delta) in &[(0.2, 0.5), (0.3, 0.4)] {
                let z = PiecewisePath::indicator(horizon, r).unwrap();
                let x = PiecewisePath::indicator_difference(horizon, s, t).unwrap();
                let params = SmoothingParams::new(eps, delta, horizon, 1).unwrap();
                let mc = McConfig {
                    samples: 20_000,
                    seed: 100 + k,
                };
                let est = d2_covariance_estimate(&h, &w, &z, &x, &params, &mc).unwrap();
                let envelope = horizon.sqrt() / (eps * delta).powi(2) * (t - s).abs().sqrt();
                let lower = est.estimate.abs() - 3.0 * est.std_error;
                pass &= lower <= envelope;
                worst = worst.max(lower - envelope);
                k += 1;
            }
        }
    }
    report(
        "criterion 5 (cross second-derivative envelope, 12-point grid)",
        pass,
        &format!("worst (|estimate| - 3se) - envelope = {worst:.4} (negative means slack)"),
    );
}

/// Adaptive Simpson on a closed interval (integrand assumed smooth there).
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let left = (m - a) / 6.0 * (f(a) + 4.0 * f(lm) + f(m));
    let right = (b - m) / 6.0 * (f(m) + 4.0 * f(rm) + f(b));
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(f, a, m, tol / 2.0, depth - 1)
            + adaptive_simpson(f, m, b, tol / 2.0, depth - 1)
    }
}

#[test]
fn criterion_6_exact_algebra_oracles() {
    let horizon = 1.0;
    let mut pass = true;
    let mut worst_rel: f64 = 0.0;
    // 50 random interior indicator differences: closed form vs the module's
    // exact integral vs adaptive quadrature of the pointwise gradient.
    for i in 0..50u64 {
        let mut rng = sample_stream(0xacce97, i);
        let eps = 0.02 + 0.23 * rng.random::<f64>();
        let s = eps + 0.01 + rng.random::<f64>() * (1.0 - 2.0 * (eps + 0.01) - 0.02);
        let width = 0.01 + rng.random::<f64>() * (1.0 - eps - 0.01 - s - 0.005).max(0.01);
        let t = (s + width).min(1.0 - eps - 0.005);
        let scale = 0.2 + 2.0 * rng.random::<f64>();
        let x = PiecewisePath::indicator_difference(horizon, s, t)
            .unwrap()
            .scale(scale);
        let closed = scale * scale * (2.0 * eps).min(t - s) / (2.0 * eps * eps);
        let exact = grad_energy(&x, eps).unwrap();
        // quadrature oracle: pointwise definitional gradient, integrated
        // adaptively between the analytic breakpoints
        let grad = |u: f64| {
            let g = (x.eval_coord(u + eps, 0) - x.eval_coord(u - eps, 0)) / (2.0 * eps);
            g * g
        };
        let mut cuts = vec![0.0, 1.0, s - eps, s + eps, t - eps, t + eps];
        cuts.retain(|&c| (0.0..=1.0).contains(&c));
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut quad = 0.0;
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            // The integrand is smooth only on the open piece; evaluate the
            // endpoints one-sidedly so quadrature never samples a jump. The
            // inward offset must dominate the rounding of u +- eps (which
            // happens at the magnitude of the shifted points, not of u).
            let mid = 0.5 * (a + b);
            let a_in = (a + 1e-11).min(mid);
            let b_in = (b - 1e-11).max(mid);
            let g = |u: f64| grad(u.clamp(a_in, b_in));
            quad += adaptive_simpson(&g, a, b, 1e-13, 24);
        }
        for (a, b) in [(closed, exact), (closed, quad), (exact, quad)] {
            let rel = (a - b).abs() / a.abs().max(1e-300);
            worst_rel = worst_rel.max(rel);
            pass &= rel <= 1e-10;
        }
    }
    // Gradient sup bound holds exactly on 100 random step paths.
    let mut bound_ok = true;
    for i in 0..100u64 {
        let mut rng = sample_stream(0xacce98, i);
        let m = 2 + (rng.random::<u64>() % 8) as usize;
        let mut times = vec![0.0];
        for _ in 1..m {
            times.push(rng.random::<f64>());
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        let values: Vec<f64> = (0..times.len())
            .map(|_| rng.random::<f64>() * 4.0 - 2.0)
            .collect();
        let w =
            PiecewisePath::new(1, horizon, times, values, InterpMode::StepRightContinuous).unwrap();
        let eps = 0.01 + 0.4 * rng.random::<f64>();
        let reg = w.regularize(eps).unwrap();
        bound_ok &= reg.sup_gradient_norm() <= w.sup_norm() / eps * (1.0 + 1e-12);
    }
    pass &= bound_ok;
    report(
        "criterion 6 (exact-algebra oracles)",
        pass,
        &format!("worst relative deviation {worst_rel:.2e} (tolerance 1e-10); gradient bound exact on 100 paths: {bound_ok}"),
    );
}

#[test]
fn criterion_7_tail_envelope_domination() {
    let horizon = 1.0;
    let mut pass = true;
    let mut detail = String::new();
    // (a) Gaussian regularization envelope on the 4-point grid.
    for &eps in &[0.01, 0.05] {
        for &lambda in &[0.25, 0.5] {
            let env = TailEnvelope::GaussianRegularization {
                k: 1.0,
                tau: 1.0,
                gamma: 4.0,
                horizon,
            };
            let bound = env.eval_raw(eps, lambda).unwrap();
            let emp = empirical_brownian_reg_tail(horizon, 10_000, 0xc7a, eps, lambda).unwrap();
            let ok = bound >= emp.ci_hi;
            pass &= ok;
            detail.push_str(&format!(
                "(a) ({eps},{lambda}): {:.3e} >= {:.3e}; ",
                bound, emp.ci_hi
            ));
        }
    }
    // (b) i.i.d. partial-sum envelope at (0.05, 0.75), n = 1000.
    {
        let model = ProcessModel::IidPartialSum {
            distribution: Innovation::Rademacher,
            n: 1000,
        };
        let paths: Vec<PiecewisePath> = (0..10_000u64)
            .map(|i| model.sample_path(horizon, 0xc7b, i))
            .collect();
        let emp = empirical_mod_tail(&paths, 0.05, 0.75).unwrap();
        let bound = iid_partial_sum_envelope(3.0, 1.0, 1000, 0.05, 0.75, horizon).unwrap();
        let ok = bound >= emp.ci_hi;
        pass &= ok;
        detail.push_str(&format!("(b): {:.3e} >= {:.3e}; ", bound, emp.ci_hi));
    }
    // (c) Brownian sup-norm tail on the z grid.
    {
        let bm =
            smoothbound_core::gaussian::BrownianMotion::uniform(1, horizon, 256, 0xc7c).unwrap();
        for &z in &[0.5, 1.0, 1.5, 2.0] {
            let n = 20_000u64;
            let mut hits = 0u64;
            for i in 0..n {
                if bm.sample(i).sup_norm() >= z {
                    hits += 1;
                }
            }
            let (_, hi) = smoothbound_core::stats::wilson_interval(hits, n);
            let bound = brownian_sup_tail_bound(z, 1, horizon).unwrap();
            let ok = bound >= hi;
            pass &= ok;
            detail.push_str(&format!("(c) z={z}: {bound:.3} >= {hi:.3}; "));
        }
    }
    report("criterion 7 (tail-envelope domination)", pass, &detail);
}

#[test]
fn criterion_8_end_to_end_discrepancy_bound() {
    let horizon = 1.0;
    let set = SetK::sup_level_for_brownian(1.0, horizon).unwrap();
    let budgets = Budgets {
        scalar_samples: 100_000,
        path_samples: 10_000,
    };
    let search_box = SearchBox {
        epsilon: (0.0125, 0.95),
        delta: (0.05, 0.95),
        theta: (0.02, 1.5),
        gamma: (0.05, 4.0),
    };
    let mut pass = true;
    let mut detail = String::new();
    let mut values = Vec::new();
    let mut warm: Vec<[f64; 4]> = Vec::new();
    for &n in &[100u64, 10_000] {
        let model = ProcessModel::IidPartialSum {
            distribution: Innovation::Rademacher,
            n,
        };
        let kappa = horizon / (n as f64).sqrt(); // order-only default, c = 1
        let inputs = smoothbound_core::bounds::TheoremInputs {
            kappa1: kappa,
            kappa2: kappa,
            horizon,
            dim: 1,
            x_tail: model.regularization_tail(3.0, horizon).unwrap(),
            z_tail: TailEnvelope::GaussianRegularization {
                k: 1.0,
                tau: 1.0,
                gamma: 4.0,
                horizon,
            },
            set: set.clone(),
            lipschitz: None,
        };
        let rp = partial_sum_rate_params(3.0, horizon, n).unwrap();
        warm.push([rp.epsilon, rp.delta, rp.theta, rp.gamma]);
        let budget = SearchBudget {
            grid_points: 13,
            warm_starts: warm.clone(),
            ..SearchBudget::default()
        };
        let opt = optimize_bound(&inputs, Objective::Indicator, &search_box, &budget).unwrap();
        // warm-start the next (larger-n) run at this optimum so the
        // optimized value is monotone by pointwise monotonicity in n
        warm.push([opt.epsilon, opt.delta, opt.theta, opt.gamma]);
        let disc = estimate_set_discrepancy(&model, &set, horizon, 0xc8 ^ n, &budgets).unwrap();
        let ok = opt.value >= disc.value + disc.ci_half;
        pass &= ok;
        detail.push_str(&format!(
            "n={n}: bound {:.4} >= discrepancy {:.4} + ci {:.4} ({}); ",
            opt.value,
            disc.value,
            disc.ci_half,
            if opt.value > 1.0 {
                "vacuous"
            } else {
                "informative"
            }
        ));
        values.push(opt.value);
    }
    let monotone = values[1] <= values[0] + 1e-15;
    pass &= monotone;
    detail.push_str(&format!(
        "optimized {:.4} -> {:.4}, nonincreasing: {monotone}",
        values[0], values[1]
    ));
    report("criterion 8 (end-to-end discrepancy bound)", pass, &detail);
}

#[test]
fn criterion_9_deterministic_reports() {
    let render = |workers: usize| -> (String, String) {
        with_worker_pool(workers, || {
            let rep = run_validate(Suite::All, 7, 1.0, None).unwrap();
            let json = rep.to_json().unwrap();
            let mut csv = Vec::new();
            rep.write_rows_csv(&mut csv).unwrap();
            (json, String::from_utf8(csv).unwrap())
        })
        .unwrap()
    };
    let (json_a, csv_a) = render(1);
    let (json_b, csv_b) = render(1);
    let (json_c, csv_c) = render(8);
    let pass = json_a == json_b && json_a == json_c && csv_a == csv_b && csv_a == csv_c;
    report(
        "criterion 9 (deterministic reports)",
        pass,
        &format!(
            "full-suite report bytes identical across two runs and 1 vs 8 workers ({} bytes)",
            json_a.len()
        ),
    );
}
