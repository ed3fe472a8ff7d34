//! Assembly of the discrepancy bounds (indicator sets, Levy-Prokhorov
//! distance, bounded Lipschitz functionals) and derivative-free minimization
//! over the smoothing parameters, plus the closed-form parameter balancing
//! for normalized i.i.d. partial sums.

use crate::error::{Error, Result};
use crate::functionals::{boundary_enlargement_bound, SetK};
use crate::smoothing::smoothing_norm_constant;
use crate::tightness::TailEnvelope;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Exact rational number (for rate exponents; no floating point involved).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Self {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Bound on `E||Y_eps - Y||` as a function of eps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpectationEnvelope {
    Constant {
        value: f64,
    },
    /// Integrate a power-law tail envelope: `coef^{1/q} q/(q-1)`.
    FromTail {
        tail: TailEnvelope,
    },
}

impl ExpectationEnvelope {
    pub fn eval(&self, epsilon: f64) -> Result<f64> {
        match self {
            ExpectationEnvelope::Constant { value } => {
                if !(*value >= 0.0) {
                    return Err(Error::ParameterDomain(format!(
                        "expectation bound must be nonnegative, got {value}"
                    )));
                }
                Ok(*value)
            }
            ExpectationEnvelope::FromTail { tail } => tail.expectation_bound(epsilon),
        }
    }
}

/// Inputs for the bounded-Lipschitz discrepancy bound; requires certified
/// `sup|h| <= 1` and `||Dh|| <= 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LipschitzData {
    pub x_expectation: ExpectationEnvelope,
    pub z_expectation: ExpectationEnvelope,
    /// `E || B ||` on [0, 1] for the target dimension.
    pub bm_sup_moment: f64,
    pub sup_certificate: f64,
    pub lip_certificate: f64,
}

/// Everything the discrepancy bounds consume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremInputs {
    /// Smooth-test-function constant multiplying the full norm bound.
    pub kappa1: f64,
    /// Smooth-test-function constant multiplying the increment-smoothness
    /// constant.
    pub kappa2: f64,
    pub horizon: f64,
    pub dim: usize,
    /// Tail envelope for `P(||X_eps - X|| >= theta)`.
    pub x_tail: TailEnvelope,
    /// Tail envelope for `P(||Z_eps - Z|| >= theta)`.
    pub z_tail: TailEnvelope,
    /// The set under test, carrying its boundary constant.
    pub set: SetK,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<LipschitzData>,
}

impl TheoremInputs {
    fn validate(&self) -> Result<()> {
        if !(self.kappa1 >= 0.0 && self.kappa2 >= 0.0) {
            return Err(Error::ParameterDomain(format!(
                "smooth-test constants must be nonnegative, got ({}, {})",
                self.kappa1, self.kappa2
            )));
        }
        if self.dim == 0 || !(self.horizon >= 1.0) {
            return Err(Error::ParameterDomain(
                "need positive dimension and horizon >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// The additive terms of the indicator discrepancy bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub stein_term: f64,
    pub smoothness_term: f64,
    pub x_tail_term: f64,
    pub z_tail_term: f64,
    pub bm_term: f64,
    pub boundary_term: f64,
    pub total: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub theta: f64,
    pub gamma: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::ParameterDomain(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Brownian-perturbation term `4 d exp(-gamma^2 / (2 d T delta^2))`.
pub fn brownian_shift_term(gamma: f64, delta: f64, dim: usize, horizon: f64) -> f64 {
    let d = dim as f64;
    4.0 * d * (-gamma * gamma / (2.0 * d * horizon * delta * delta)).exp()
}

/// The six-term bound on `|P(X in K) - P(Z in K)|` at parameters
/// `(epsilon, delta, theta, gamma)`:
///
/// `C(eps, delta, T) kappa1 + sqrt(T) (eps delta)^{-2} kappa2
///  + P(||X_eps - X|| >= theta) + P(||Z_eps - Z|| >= theta)
///  + 4 d exp(-gamma^2/(2 d T delta^2))
///  + P(Z in K^{2(theta+gamma)} \ K^{-2(theta+gamma)})`,
///
/// with the tail probabilities replaced by their envelopes and the boundary
/// term by `min(1, c' 2(theta+gamma))`.
pub fn indicator_discrepancy_bound(
    inputs: &TheoremInputs,
    epsilon: f64,
    delta: f64,
    theta: f64,
    gamma: f64,
) -> Result<BoundBreakdown> {
    inputs.validate()?;
    check_positive("epsilon", epsilon)?;
    check_positive("delta", delta)?;
    check_positive("theta", theta)?;
    check_positive("gamma", gamma)?;
    let horizon = inputs.horizon;
    let stein_term = smoothing_norm_constant(epsilon, delta, horizon)? * inputs.kappa1;
    let smoothness_term = horizon.sqrt() / (epsilon * delta * epsilon * delta) * inputs.kappa2;
    let x_tail_term = inputs.x_tail.eval(epsilon, theta)?;
    let z_tail_term = inputs.z_tail.eval(epsilon, theta)?;
    let bm_term = brownian_shift_term(gamma, delta, inputs.dim, horizon);
    let boundary_term = boundary_enlargement_bound(&inputs.set, 2.0 * (theta + gamma), horizon)?;
    let total = stein_term + smoothness_term + x_tail_term + z_tail_term + bm_term + boundary_term;
    Ok(BoundBreakdown {
        stein_term,
        smoothness_term,
        x_tail_term,
        z_tail_term,
        bm_term,
        boundary_term,
        total,
        epsilon,
        delta,
        theta,
        gamma,
    })
}

/// Levy-Prokhorov bound: `max(2(theta+gamma), five-term sum without the
/// boundary term)`.
pub fn levy_prokhorov_bound(
    inputs: &TheoremInputs,
    epsilon: f64,
    delta: f64,
    theta: f64,
    gamma: f64,
) -> Result<f64> {
    let b = indicator_discrepancy_bound(inputs, epsilon, delta, theta, gamma)?;
    Ok((2.0 * (theta + gamma)).max(b.total - b.boundary_term))
}

/// Terms of the bounded-Lipschitz discrepancy bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LipschitzBreakdown {
    pub x_expectation_term: f64,
    pub z_expectation_term: f64,
    pub bm_term: f64,
    pub kappa1_term: f64,
    pub kappa2_term: f64,
    pub total: f64,
    pub epsilon: f64,
    pub delta: f64,
}

/// Bounded-Lipschitz bound, for `epsilon, delta in (0, 1)` and certified
/// `sup|h| <= 1`, `||Dh|| <= 1`:
///
/// `E||X_eps - X|| + E||Z_eps - Z|| + 2 T^{1/2} delta E||B over the unit horizon||
///  + 6 T eps^{-3} delta^{-2} kappa1 + pi^{-1/2} eps^{-2} delta^{-1} kappa2`.
pub fn lipschitz_discrepancy_bound(
    inputs: &TheoremInputs,
    epsilon: f64,
    delta: f64,
) -> Result<LipschitzBreakdown> {
    inputs.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterDomain(format!(
            "bounded-Lipschitz bound needs epsilon, delta in (0, 1), got ({epsilon}, {delta})"
        )));
    }
    let data = inputs.lipschitz.as_ref().ok_or_else(|| {
        Error::MissingInput("bounded-Lipschitz bound needs expectation envelopes".into())
    })?;
    if !(data.sup_certificate <= 1.0 && data.lip_certificate <= 1.0) {
        return Err(Error::ParameterDomain(format!(
            "bounded-Lipschitz bound requires sup <= 1 and Lipschitz <= 1 certificates, got ({}, {})",
            data.sup_certificate, data.lip_certificate
        )));
    }
    let horizon = inputs.horizon;
    let x_expectation_term = data.x_expectation.eval(epsilon)?;
    let z_expectation_term = data.z_expectation.eval(epsilon)?;
    let bm_term = 2.0 * horizon.sqrt() * delta * data.bm_sup_moment;
    let kappa1_term = 6.0 * horizon * inputs.kappa1 / (epsilon.powi(3) * delta * delta);
    let kappa2_term = inputs.kappa2 / (std::f64::consts::PI.sqrt() * epsilon * epsilon * delta);
    Ok(LipschitzBreakdown {
        x_expectation_term,
        z_expectation_term,
        bm_term,
        kappa1_term,
        kappa2_term,
        total: x_expectation_term + z_expectation_term + bm_term + kappa1_term + kappa2_term,
        epsilon,
        delta,
    })
}

/// Which bound the optimizer minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Indicator,
    LevyProkhorov,
    Lipschitz,
}

/// Per-axis search intervals (positive; an axis may be pinned with lo = hi).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchBox {
    pub epsilon: (f64, f64),
    pub delta: (f64, f64),
    pub theta: (f64, f64),
    pub gamma: (f64, f64),
}

impl SearchBox {
    fn axis(&self, i: usize) -> (f64, f64) {
        match i {
            0 => self.epsilon,
            1 => self.delta,
            2 => self.theta,
            _ => self.gamma,
        }
    }

    fn validate(&self) -> Result<()> {
        for i in 0..4 {
            let (lo, hi) = self.axis(i);
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::ParameterDomain(format!(
                    "search box axis {i} must satisfy 0 < lo <= hi, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

/// Search effort: a log-spaced grid (nested when `levels > 0`: each level
/// doubles the per-axis resolution and revisits every coarser point), then
/// golden-section coordinate descent from the incumbent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchBudget {
    pub grid_points: usize,
    pub levels: u32,
    pub descent_rounds: usize,
    pub golden_iters: usize,
    /// Extra points evaluated (and traced) alongside the grid, e.g. the
    /// closed-form balanced parameters.
    #[serde(default)]
    pub warm_starts: Vec<[f64; 4]>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            grid_points: 17,
            levels: 0,
            descent_rounds: 3,
            golden_iters: 24,
            warm_starts: Vec::new(),
        }
    }
}

/// One recorded objective evaluation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TracePoint {
    pub phase: TracePhase,
    pub epsilon: f64,
    pub delta: f64,
    pub theta: f64,
    pub gamma: f64,
    /// `None` when the point is infeasible for the envelopes.
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TracePhase {
    WarmStart,
    Grid,
    Descent,
}

/// Result of a bound minimization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizedBound {
    pub objective: Objective,
    pub value: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub theta: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<BoundBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz_breakdown: Option<LipschitzBreakdown>,
    /// Warm starts, grid improvements and all descent evaluations.
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
}

struct Candidate {
    value: f64,
    params: [f64; 4],
}

/// Lexicographic (value, eps, delta, theta, gamma) comparison for a
/// deterministic argmin under ties.
fn improves(new_value: f64, new_params: &[f64; 4], best: &Option<Candidate>) -> bool {
    match best {
        None => true,
        Some(b) => {
            let old = (b.value, b.params[0], b.params[1], b.params[2], b.params[3]);
            let new = (
                new_value,
                new_params[0],
                new_params[1],
                new_params[2],
                new_params[3],
            );
            new < old
        }
    }
}

/// Minimize the selected bound over the box. Deterministic: the grid is
/// evaluated in parallel but reduced in a fixed order with lexicographic
/// tie-breaks; descent is sequential. Raising `levels` only ever adds
/// evaluation points, so larger budgets cannot return worse values.
pub fn optimize_bound(
    inputs: &TheoremInputs,
    objective: Objective,
    search_box: &SearchBox,
    budget: &SearchBudget,
) -> Result<OptimizedBound> {
    search_box.validate()?;
    if budget.grid_points < 2 {
        return Err(Error::ParameterDomain(
            "need at least two grid points per axis".into(),
        ));
    }
    let n_axes = match objective {
        Objective::Lipschitz => 2,
        _ => 4,
    };
    let eval = |p: &[f64; 4]| -> Option<f64> {
        match objective {
            Objective::Indicator => indicator_discrepancy_bound(inputs, p[0], p[1], p[2], p[3])
                .ok()
                .map(|b| b.total),
            Objective::LevyProkhorov => levy_prokhorov_bound(inputs, p[0], p[1], p[2], p[3]).ok(),
            Objective::Lipschitz => lipschitz_discrepancy_bound(inputs, p[0], p[1])
                .ok()
                .map(|b| b.total),
        }
    };
    // Inactive axes are pinned to the lower box edge.
    let pin: [f64; 4] = [
        search_box.epsilon.0,
        search_box.delta.0,
        search_box.theta.0,
        search_box.gamma.0,
    ];

    let mut best: Option<Candidate> = None;
    let mut trace: Vec<TracePoint> = Vec::new();
    let mut evaluations = 0usize;
    let record = |phase: TracePhase, p: [f64; 4], v: Option<f64>, trace: &mut Vec<TracePoint>| {
        trace.push(TracePoint {
            phase,
            epsilon: p[0],
            delta: p[1],
            theta: p[2],
            gamma: p[3],
            objective: v,
        });
    };

    for ws in &budget.warm_starts {
        let v = eval(ws);
        evaluations += 1;
        record(TracePhase::WarmStart, *ws, v, &mut trace);
        if let Some(v) = v {
            if improves(v, ws, &best) {
                best = Some(Candidate {
                    value: v,
                    params: *ws,
                });
            }
        }
    }

    for level in 0..=budget.levels {
        // Nested refinement: m -> 2m - 1 keeps every coarser point.
        let mut m = budget.grid_points;
        for _ in 0..level {
            m = 2 * m - 1;
        }
        let axis_values: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                if i >= n_axes {
                    return vec![pin[i]];
                }
                let (lo, hi) = search_box.axis(i);
                if lo == hi {
                    return vec![lo];
                }
                let (llo, lhi) = (lo.ln(), hi.ln());
                (0..m)
                    .map(|j| {
                        (llo + (lhi - llo) * j as f64 / (m - 1) as f64)
                            .exp()
                            .clamp(lo, hi)
                    })
                    .collect()
            })
            .collect();
        let mut combos: Vec<[f64; 4]> =
            Vec::with_capacity(axis_values.iter().map(Vec::len).product());
        for &e in &axis_values[0] {
            for &d in &axis_values[1] {
                for &t in &axis_values[2] {
                    for &g in &axis_values[3] {
                        combos.push([e, d, t, g]);
                    }
                }
            }
        }
        let values: Vec<Option<f64>> = combos.par_iter().map(&eval).collect();
        evaluations += combos.len();
        for (p, v) in combos.iter().zip(values.iter()) {
            if let Some(v) = *v {
                if improves(v, p, &best) {
                    best = Some(Candidate {
                        value: v,
                        params: *p,
                    });
                    record(TracePhase::Grid, *p, Some(v), &mut trace);
                }
            }
        }

        // Golden-section coordinate descent from the incumbent.
        if let Some(b) = &best {
            let mut current = b.params;
            let mut current_val = b.value;
            const PHI: f64 = 0.618_033_988_749_894_8;
            for _ in 0..budget.descent_rounds {
                for axis in 0..n_axes {
                    let (lo, hi) = search_box.axis(axis);
                    if lo == hi {
                        continue;
                    }
                    let (mut a, mut bb) = (lo.ln(), hi.ln());
                    let probe = |t: f64,
                                 evaluations: &mut usize,
                                 trace: &mut Vec<TracePoint>,
                                 best: &mut Option<Candidate>|
                     -> f64 {
                        let mut p = current;
                        p[axis] = t.exp().clamp(lo, hi);
                        let v = eval(&p);
                        *evaluations += 1;
                        record(TracePhase::Descent, p, v, trace);
                        if let Some(v) = v {
                            if improves(v, &p, best) {
                                *best = Some(Candidate {
                                    value: v,
                                    params: p,
                                });
                            }
                        }
                        v.unwrap_or(f64::INFINITY)
                    };
                    let mut x1 = bb - PHI * (bb - a);
                    let mut x2 = a + PHI * (bb - a);
                    let mut f1 = probe(x1, &mut evaluations, &mut trace, &mut best);
                    let mut f2 = probe(x2, &mut evaluations, &mut trace, &mut best);
                    for _ in 0..budget.golden_iters {
                        if f1 <= f2 {
                            bb = x2;
                            x2 = x1;
                            f2 = f1;
                            x1 = bb - PHI * (bb - a);
                            f1 = probe(x1, &mut evaluations, &mut trace, &mut best);
                        } else {
                            a = x1;
                            x1 = x2;
                            f1 = f2;
                            x2 = a + PHI * (bb - a);
                            f2 = probe(x2, &mut evaluations, &mut trace, &mut best);
                        }
                    }
                    if let Some(b) = &best {
                        current = b.params;
                        current_val = b.value;
                    }
                }
            }
            let _ = current_val;
        }
    }

    let best = best.ok_or_else(|| {
        Error::Infeasible("no feasible point in the search box (check envelope validity)".into())
    })?;
    let [epsilon, delta, theta, gamma] = best.params;
    let (breakdown, lipschitz_breakdown) = match objective {
        Objective::Indicator | Objective::LevyProkhorov => (
            Some(indicator_discrepancy_bound(
                inputs, epsilon, delta, theta, gamma,
            )?),
            None,
        ),
        Objective::Lipschitz => (
            None,
            Some(lipschitz_discrepancy_bound(inputs, epsilon, delta)?),
        ),
    };
    Ok(OptimizedBound {
        objective,
        value: best.value,
        epsilon,
        delta,
        theta,
        gamma,
        breakdown,
        lipschitz_breakdown,
        trace,
        evaluations,
    })
}

/// Closed-form balanced parameters for the indicator bound on normalized
/// i.i.d. partial sums with `p >= 3` moments.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateParams {
    pub epsilon: f64,
    pub delta: f64,
    pub theta: f64,
    pub gamma: f64,
    /// Predicted rate value including the sqrt(log n) factor.
    pub rate: f64,
    /// Exact decay exponent of the rate in n when the horizon is 1 and p is
    /// integral: `(p-2) / (4 (5p-1))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Ratio>,
}

/// Balanced parameters: `theta = sqrt(T) delta =
/// ({T^4 n^{-1/2}}^{p/2-1} T^3)^{1/(5p-1)}`,
/// `eps = ({T^4 n^{-1/2}}^{p+1} T^{-4})^{1/(5p-1)}`,
/// `gamma = delta sqrt(10 T log n)`, rate `sqrt(log n) * theta`.
pub fn partial_sum_rate_params(p: f64, horizon: f64, n: u64) -> Result<RateParams> {
    if !(p >= 3.0) {
        return Err(Error::UnsupportedMoment(p));
    }
    if n < 2 {
        return Err(Error::ParameterDomain(format!(
            "need n >= 2 partial-sum increments, got {n}"
        )));
    }
    if !(horizon >= 1.0) {
        return Err(Error::ParameterDomain(format!(
            "horizon must be >= 1, got {horizon}"
        )));
    }
    let nf = n as f64;
    let base = horizon.powi(4) / nf.sqrt();
    let ex = 1.0 / (5.0 * p - 1.0);
    let epsilon = (base.powf(p + 1.0) * horizon.powi(-4)).powf(ex);
    let theta = (base.powf(p / 2.0 - 1.0) * horizon.powi(3)).powf(ex);
    let delta = theta / horizon.sqrt();
    let gamma = delta * (10.0 * horizon * nf.ln()).sqrt();
    let rate = nf.ln().sqrt() * theta;
    let exponent = exact_exponent(p, horizon, indicator_rate_exponent);
    Ok(RateParams {
        epsilon,
        delta,
        theta,
        gamma,
        rate,
        exponent,
    })
}

/// Closed-form parameters for the bounded-Lipschitz bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LipschitzRateParams {
    pub epsilon: f64,
    pub delta: f64,
    pub rate: f64,
    /// Exact exponent `(p-2) / (6 (3p-2))` for integral p.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Ratio>,
}

/// `delta = (eps n^{1/6})^{-1} = eps^{(p-2)/(2p)}` balances the three terms
/// at `eps = n^{-p/(3(3p-2))}`, giving the rate `n^{-(p-2)/(6(3p-2))}`.
pub fn partial_sum_lipschitz_rate_params(p: f64, n: u64) -> Result<LipschitzRateParams> {
    if !(p >= 3.0) {
        return Err(Error::UnsupportedMoment(p));
    }
    if n < 2 {
        return Err(Error::ParameterDomain(format!(
            "need n >= 2 partial-sum increments, got {n}"
        )));
    }
    let nf = n as f64;
    let epsilon = nf.powf(-p / (3.0 * (3.0 * p - 2.0)));
    let delta = epsilon.powf((p - 2.0) / (2.0 * p));
    let rate = nf.powf(-(p - 2.0) / (6.0 * (3.0 * p - 2.0)));
    let exponent = exact_exponent(p, 1.0, lipschitz_rate_exponent);
    Ok(LipschitzRateParams {
        epsilon,
        delta,
        rate,
        exponent,
    })
}

fn exact_exponent(p: f64, horizon: f64, f: fn(u64) -> Result<Ratio>) -> Option<Ratio> {
    if horizon == 1.0 && p.fract() == 0.0 && p >= 3.0 && p <= 2i64.pow(30) as f64 {
        f(p as u64).ok()
    } else {
        None
    }
}

/// Exact rate exponent of the indicator bound in n (horizon 1):
/// `(p/2 - 1) / (2 (5p - 1)) = (p - 2) / (4 (5p - 1))`.
pub fn indicator_rate_exponent(p: u64) -> Result<Ratio> {
    if p < 3 {
        return Err(Error::UnsupportedMoment(p as f64));
    }
    Ok(Ratio::new(p as i64 - 2, 4 * (5 * p as i64 - 1)))
}

/// Limit of the indicator exponent as p grows: the ratio of the leading
/// coefficients of `(p-2)` and `4(5p-1)`.
pub fn indicator_rate_exponent_limit() -> Ratio {
    Ratio::new(1, 20)
}

/// Exact rate exponent of the bounded-Lipschitz bound: `(p-2)/(6(3p-2))`.
pub fn lipschitz_rate_exponent(p: u64) -> Result<Ratio> {
    if p < 3 {
        return Err(Error::UnsupportedMoment(p as f64));
    }
    Ok(Ratio::new(p as i64 - 2, 6 * (3 * p as i64 - 2)))
}

/// Limit of the Lipschitz exponent as p grows.
pub fn lipschitz_rate_exponent_limit() -> Ratio {
    Ratio::new(1, 18)
}
