//! The smoothing operator `h_(eps,delta)(w) = E[h(w_eps + delta B)]`, its
//! Monte-Carlo evaluation, the stochastic derivative estimators, and the
//! closed-form norm constants for smoothed functionals.
//!
//! Derivatives are estimated from the representation
//!
//! `D^n h_(eps,delta)(w)[x_1..x_n] = E[ h(w_eps + delta B) sum_partitions
//!    prod_blocks Dhat^{|b|}[x_b] ]`,
//!
//! where the sum runs over partitions of `{1..n}` into blocks of size at
//! most two, `Dhat^1[x] = delta^{-1} int grad x_eps dB` is an exact finite
//! sum of Brownian increments for step directions, and `Dhat^2[x,y] =
//! -delta^{-2} int <grad x_eps, grad y_eps> ds` is deterministic. The
//! expectation-under-shift form is used throughout; the equivalent
//! change-of-measure weighting has unbounded variance for rough base paths
//! and is not implemented.
//!
//! The representation differentiates along shifts that vanish at time zero
//! (the shifts expressible by reweighting the Brownian increments). A
//! direction whose regularization is nonzero at the origin — a step
//! direction supported within `eps` of time zero — additionally moves the
//! deterministic starting value `w_eps(0)`, a component no increment
//! reweighting can see; the full directional derivative then exceeds the
//! estimated one by `x_eps(0)` times the constant-shift sensitivity.
//! Agreement checks against finite differences therefore use directions
//! supported at least `eps` away from the origin.
//!
//! Brownian paths are realized on a grid refining every gradient breakpoint
//! of the directions, the (+-eps)-shifted knots of the base path, the
//! functional's evaluation times, and a uniform mesh of spacing at most
//! `min(eps, delta^2)/8`. Cylinder-type functionals are therefore evaluated
//! without grid bias; supremum-type functionals see the grid supremum, which
//! is itself a certified functional of the same sup bound.

use crate::error::{Error, Result};
use crate::functionals::PathFunctional;
use crate::partitions::{p2_partitions, Block, PartitionP2};
use crate::paths::{InterpMode, PiecewisePath, RegularizedPath};
use crate::rng::{parallel_blocks, sample_stream};
use crate::stats::RunningStats;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Maximum derivative order: every bound constant involves at most three
/// derivatives.
pub const MAX_DERIVATIVE_ORDER: usize = 3;

/// Smoothing parameters `(epsilon, delta)` on `[0, horizon]` in `dim`
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub epsilon: f64,
    pub delta: f64,
    pub horizon: f64,
    pub dim: usize,
}

impl SmoothingParams {
    pub fn new(epsilon: f64, delta: f64, horizon: f64, dim: usize) -> Result<Self> {
        if !(epsilon > 0.0 && delta > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "smoothing scales must be positive, got epsilon={epsilon}, delta={delta}"
            )));
        }
        if !(horizon >= 1.0 && horizon.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "horizon must be >= 1, got {horizon}"
            )));
        }
        if dim == 0 {
            return Err(Error::ParameterDomain("dimension must be positive".into()));
        }
        Ok(Self {
            epsilon,
            delta,
            horizon,
            dim,
        })
    }
}

/// Monte-Carlo budget and stream seed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
}

/// A Monte-Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub params: SmoothingParams,
}

/// The norm constant of the smoothed functional:
/// `1 + T^{1/2}(eps delta)^{-1} + T sqrt(2) (eps delta)^{-2}
///    + T^{3/2} sqrt(50/pi) (eps delta)^{-3}`.
pub fn smoothing_norm_constant(epsilon: f64, delta: f64, horizon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && delta > 0.0 && horizon > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "constants need positive parameters, got ({epsilon}, {delta}, {horizon})"
        )));
    }
    let ed = epsilon * delta;
    Ok(1.0
        + horizon.sqrt() / ed
        + horizon * 2f64.sqrt() / (ed * ed)
        + horizon.powf(1.5) * (50.0 / std::f64::consts::PI).sqrt() / (ed * ed * ed))
}

/// Certified bound on the full smoothed-functional norm: `sup|h|` times the
/// norm constant.
pub fn m0_norm_bound(params: &SmoothingParams, sup_h: f64) -> Result<f64> {
    if !(sup_h >= 0.0) {
        return Err(Error::ParameterDomain(format!(
            "sup certificate must be nonnegative, got {sup_h}"
        )));
    }
    Ok(sup_h * smoothing_norm_constant(params.epsilon, params.delta, params.horizon)?)
}

/// Certificate an input functional carries into the second-derivative
/// smoothness constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum M0cCertificate {
    Bounded { sup: f64 },
    Lipschitz { lip: f64 },
}

/// The increment-smoothness constant certified for the smoothed functional:
/// `sup|h| sqrt(T) (eps delta)^{-2}` for bounded h, or
/// `||Dh|| pi^{-1/2} eps^{-2} delta^{-1}` for Lipschitz h.
pub fn m0c_constant(params: &SmoothingParams, certificate: M0cCertificate) -> Result<f64> {
    let (eps, delta, horizon) = (params.epsilon, params.delta, params.horizon);
    match certificate {
        M0cCertificate::Bounded { sup } => {
            if !(sup >= 0.0) {
                return Err(Error::ParameterDomain(format!(
                    "sup certificate must be nonnegative, got {sup}"
                )));
            }
            Ok(sup * horizon.sqrt() / (eps * delta * eps * delta))
        }
        M0cCertificate::Lipschitz { lip } => {
            if !(lip >= 0.0) {
                return Err(Error::ParameterDomain(format!(
                    "Lipschitz certificate must be nonnegative, got {lip}"
                )));
            }
            Ok(lip / std::f64::consts::PI.sqrt() / (eps * eps * delta))
        }
    }
}

/// Deterministic second-order weight `Dhat^2[x, y] =
/// -delta^{-2} int_0^T <grad x_eps, grad y_eps> ds`, exact for both path
/// modes.
pub fn d2_weight(x: &PiecewisePath, y: &PiecewisePath, params: &SmoothingParams) -> Result<f64> {
    let rx = x.regularize(params.epsilon)?;
    let ry = y.regularize(params.epsilon)?;
    Ok(-rx.gradient_inner_product(&ry)? / (params.delta * params.delta))
}

/// Precomputed sampling machinery shared by all estimators.
struct Engine {
    grid: Vec<f64>,
    sqrt_dt: Vec<f64>,
    /// Regularized base path at the grid nodes, row-major.
    base: Vec<f64>,
    /// Per direction: nonzero Wiener-integral coefficients
    /// `(interval * dim + coord, grad/delta)`.
    sparse_grads: Vec<Vec<(usize, f64)>>,
    /// Per direction: its regularization evaluated at the grid nodes.
    dir_eps: Vec<Vec<f64>>,
    /// Pairwise deterministic second-order weights.
    d2hat: Vec<Vec<f64>>,
    dim: usize,
    delta: f64,
    horizon: f64,
}

impl Engine {
    fn new(
        h: &dyn PathFunctional,
        w: &PiecewisePath,
        directions: &[&PiecewisePath],
        params: &SmoothingParams,
    ) -> Result<Self> {
        if w.dim() != params.dim || w.horizon() != params.horizon {
            return Err(Error::ShapeMismatch(format!(
                "base path has dim {} on horizon {}, parameters say ({}, {})",
                w.dim(),
                w.horizon(),
                params.dim,
                params.horizon
            )));
        }
        for d in directions {
            if d.dim() != params.dim || d.horizon() != params.horizon {
                return Err(Error::ShapeMismatch(
                    "direction dimension or horizon does not match the base path".into(),
                ));
            }
        }
        let eps = params.epsilon;
        let horizon = params.horizon;

        let mut grid: Vec<f64> = vec![0.0, horizon];
        let push_clipped = |pts: &mut Vec<f64>, t: f64| {
            if t > 0.0 && t < horizon {
                pts.push(t);
            }
        };
        for &t in w.times() {
            push_clipped(&mut grid, t);
            push_clipped(&mut grid, t - eps);
            push_clipped(&mut grid, t + eps);
        }
        for d in directions {
            for &t in d.times() {
                push_clipped(&mut grid, t - eps);
                push_clipped(&mut grid, t + eps);
            }
        }
        for t in h.required_times() {
            push_clipped(&mut grid, t);
        }
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        // Uniform refinement below both smoothing scales.
        let target = (eps.min(params.delta * params.delta) / 8.0).max(1e-7 * horizon);
        let mut refined = Vec::with_capacity(grid.len() * 2);
        for k in 0..grid.len() - 1 {
            refined.push(grid[k]);
            let gap = grid[k + 1] - grid[k];
            let extra = (gap / target).ceil() as usize;
            for j in 1..extra {
                refined.push(grid[k] + gap * j as f64 / extra as f64);
            }
        }
        refined.push(horizon);
        refined.dedup();
        let grid = refined;

        let dim = params.dim;
        let m = grid.len() - 1;
        let sqrt_dt: Vec<f64> = (0..m).map(|j| (grid[j + 1] - grid[j]).sqrt()).collect();

        let wreg = w.regularize(eps)?;
        let base = eval_at_grid(&wreg, &grid);

        let mut sparse_grads = Vec::with_capacity(directions.len());
        let mut dir_eps = Vec::with_capacity(directions.len());
        let mut regs: Vec<RegularizedPath> = Vec::with_capacity(directions.len());
        for d in directions {
            let reg = d.regularize(eps)?;
            dir_eps.push(eval_at_grid(&reg, &grid));
            let mut sparse = Vec::new();
            let mut gbuf = vec![0.0; dim];
            for j in 0..m {
                let mid = 0.5 * (grid[j] + grid[j + 1]);
                reg.gradient_into(mid, &mut gbuf);
                for (c, &g) in gbuf.iter().enumerate() {
                    if g != 0.0 {
                        sparse.push((j * dim + c, g / params.delta));
                    }
                }
            }
            sparse_grads.push(sparse);
            regs.push(reg);
        }
        let mut d2hat = vec![vec![0.0; directions.len()]; directions.len()];
        for i in 0..directions.len() {
            for j in i..directions.len() {
                let v = -regs[i].gradient_inner_product(&regs[j])? / (params.delta * params.delta);
                d2hat[i][j] = v;
                d2hat[j][i] = v;
            }
        }
        Ok(Self {
            grid,
            sqrt_dt,
            base,
            sparse_grads,
            dir_eps,
            d2hat,
            dim,
            delta: params.delta,
            horizon,
        })
    }

    fn intervals(&self) -> usize {
        self.grid.len() - 1
    }

    /// Draw the increments of one Brownian path into `incr` (row-major per
    /// interval) using the sample's own stream.
    #[inline]
    fn draw_increments<R: Rng>(&self, rng: &mut R, incr: &mut [f64]) {
        for j in 0..self.intervals() {
            let s = self.sqrt_dt[j];
            for c in 0..self.dim {
                let z: f64 = rng.sample(StandardNormal);
                incr[j * self.dim + c] = s * z;
            }
        }
    }

    /// Assemble `shift + delta B` into the path values, where B is the prefix
    /// sum of `incr` and `shift` is the regularized base plus optional
    /// direction offsets.
    #[inline]
    fn fill_values(&self, incr: &[f64], offsets: &[(f64, usize)], vals: &mut [f64]) {
        let dim = self.dim;
        let mut b = vec![0.0; dim];
        for j in 0..self.grid.len() {
            if j > 0 {
                for (c, bc) in b.iter_mut().enumerate() {
                    *bc += incr[(j - 1) * dim + c];
                }
            }
            for c in 0..dim {
                let mut v = self.base[j * dim + c] + self.delta * b[c];
                for &(scale, dir) in offsets {
                    v += scale * self.dir_eps[dir][j * dim + c];
                }
                vals[j * dim + c] = v;
            }
        }
    }

    /// First-order stochastic weight for direction `k`.
    #[inline]
    fn wiener_weight(&self, incr: &[f64], k: usize) -> f64 {
        self.sparse_grads[k]
            .iter()
            .map(|&(idx, coef)| coef * incr[idx])
            .sum()
    }

    fn template_path(&self) -> PiecewisePath {
        PiecewisePath::from_parts_unchecked(
            self.dim,
            self.horizon,
            self.grid.clone(),
            vec![0.0; self.grid.len() * self.dim],
            InterpMode::PiecewiseLinear,
        )
    }
}

fn eval_at_grid(reg: &RegularizedPath, grid: &[f64]) -> Vec<f64> {
    let dim = reg.source().dim();
    let mut out = vec![0.0; grid.len() * dim];
    for (i, &s) in grid.iter().enumerate() {
        reg.eval_into(s, &mut out[i * dim..(i + 1) * dim]);
    }
    out
}

fn combined_weight(partitions: &[PartitionP2], w1: &[f64], d2: &[Vec<f64>]) -> f64 {
    partitions
        .iter()
        .map(|p| {
            p.blocks()
                .iter()
                .map(|b| match *b {
                    Block::Singleton(i) => w1[i],
                    Block::Pair(i, j) => d2[i][j],
                })
                .product::<f64>()
        })
        .sum()
}

fn check_mc(mc: &McConfig) -> Result<()> {
    if mc.samples < 2 {
        return Err(Error::ParameterDomain(format!(
            "Monte-Carlo estimates need at least 2 samples, got {}",
            mc.samples
        )));
    }
    Ok(())
}

/// Monte-Carlo mean of `h(w_eps + delta B)` over independent Brownian
/// samples; deterministic in `(seed, worker count)`.
pub fn smooth_eval(
    h: &(dyn PathFunctional + Sync),
    w: &PiecewisePath,
    params: &SmoothingParams,
    mc: &McConfig,
) -> Result<DerivativeEstimate> {
    derivative_estimate(h, w, &[], params, mc)
}

/// Monte-Carlo estimate of `D^n h_(eps,delta)(w)[directions]` for
/// `n = 0..=3`; `n = 0` is the smoothed value itself. The derivative is
/// taken along the increment-expressible component of each direction (see
/// the module docs for directions supported within `eps` of time zero).
pub fn derivative_estimate(
    h: &(dyn PathFunctional + Sync),
    w: &PiecewisePath,
    directions: &[&PiecewisePath],
    params: &SmoothingParams,
    mc: &McConfig,
) -> Result<DerivativeEstimate> {
    let n = directions.len();
    if n > MAX_DERIVATIVE_ORDER {
        return Err(Error::UnsupportedOrder(n, MAX_DERIVATIVE_ORDER));
    }
    check_mc(mc)?;
    let engine = Engine::new(h, w, directions, params)?;
    let partitions = p2_partitions(n)?;
    // Surface functional shape errors before entering the sampling loop.
    h.eval_path(&engine.template_path())?;

    let stats = parallel_blocks(
        mc.samples,
        |range| {
            let mut stats = RunningStats::new();
            let mut incr = vec![0.0; engine.intervals() * engine.dim];
            let mut path = engine.template_path();
            let mut w1 = vec![0.0; n];
            for i in range {
                let mut rng = sample_stream(mc.seed, i);
                engine.draw_increments(&mut rng, &mut incr);
                engine.fill_values(&incr, &[], path.values_mut());
                let hv = h
                    .eval_path(&path)
                    .expect("functional evaluation checked before sampling");
                for (k, slot) in w1.iter_mut().enumerate() {
                    *slot = engine.wiener_weight(&incr, k);
                }
                let weight = combined_weight(&partitions, &w1, &engine.d2hat);
                stats.push(hv * weight);
            }
            stats
        },
        |acc: &mut RunningStats, p| acc.merge(&p),
    );
    Ok(DerivativeEstimate {
        estimate: stats.mean(),
        std_error: stats.std_error(),
        n_samples: mc.samples,
        seed: mc.seed,
        params: *params,
    })
}

/// Covariance-form estimator of the second derivative:
/// `delta^{-2} Cov(h(w_eps + delta B), (int grad x_eps dB)(int grad y_eps dB))`,
/// estimated by the unbiased sample covariance (two deterministic passes:
/// means first, centered products second).
pub fn d2_covariance_estimate(
    h: &(dyn PathFunctional + Sync),
    w: &PiecewisePath,
    x: &PiecewisePath,
    y: &PiecewisePath,
    params: &SmoothingParams,
    mc: &McConfig,
) -> Result<DerivativeEstimate> {
    check_mc(mc)?;
    let engine = Engine::new(h, w, &[x, y], params)?;
    h.eval_path(&engine.template_path())?;

    #[derive(Default)]
    struct Pass1 {
        h: RunningStats,
        uv: RunningStats,
    }
    let pass1 = parallel_blocks(
        mc.samples,
        |range| {
            let mut acc = Pass1::default();
            let mut incr = vec![0.0; engine.intervals() * engine.dim];
            let mut path = engine.template_path();
            for i in range {
                let mut rng = sample_stream(mc.seed, i);
                engine.draw_increments(&mut rng, &mut incr);
                engine.fill_values(&incr, &[], path.values_mut());
                let hv = h.eval_path(&path).expect("checked");
                let uv = engine.wiener_weight(&incr, 0) * engine.wiener_weight(&incr, 1);
                acc.h.push(hv);
                acc.uv.push(uv);
            }
            acc
        },
        |acc: &mut Pass1, p| {
            acc.h.merge(&p.h);
            acc.uv.merge(&p.uv);
        },
    );
    let (mean_h, mean_uv) = (pass1.h.mean(), pass1.uv.mean());

    // Second pass re-derives the same streams and accumulates the centered
    // products; their spread gives the standard error of the covariance.
    let centered = parallel_blocks(
        mc.samples,
        |range| {
            let mut stats = RunningStats::new();
            let mut incr = vec![0.0; engine.intervals() * engine.dim];
            let mut path = engine.template_path();
            for i in range {
                let mut rng = sample_stream(mc.seed, i);
                engine.draw_increments(&mut rng, &mut incr);
                engine.fill_values(&incr, &[], path.values_mut());
                let hv = h.eval_path(&path).expect("checked");
                let uv = engine.wiener_weight(&incr, 0) * engine.wiener_weight(&incr, 1);
                stats.push((hv - mean_h) * (uv - mean_uv));
            }
            stats
        },
        |acc: &mut RunningStats, p| acc.merge(&p),
    );
    let nf = mc.samples as f64;
    Ok(DerivativeEstimate {
        estimate: centered.mean() * nf / (nf - 1.0),
        std_error: centered.std_error(),
        n_samples: mc.samples,
        seed: mc.seed,
        params: *params,
    })
}

/// Central finite differences of the smoothed functional along one or two
/// directions with common random numbers: every shifted evaluation reuses
/// the sample's Brownian path, which is what makes the 3-standard-error
/// agreement checks against the stochastic estimators resolvable.
///
/// The step is `step_rel * sup_norm(direction)` per direction
/// (default `step_rel = 1e-3`).
pub fn finite_difference_estimate(
    h: &(dyn PathFunctional + Sync),
    w: &PiecewisePath,
    directions: &[&PiecewisePath],
    params: &SmoothingParams,
    mc: &McConfig,
    step_rel: Option<f64>,
) -> Result<DerivativeEstimate> {
    let n = directions.len();
    if n == 0 || n > 2 {
        return Err(Error::UnsupportedOrder(n, 2));
    }
    check_mc(mc)?;
    let rel = step_rel.unwrap_or(1e-3);
    if !(rel > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "finite-difference step must be positive, got {rel}"
        )));
    }
    let engine = Engine::new(h, w, directions, params)?;
    h.eval_path(&engine.template_path())?;
    let steps: Vec<f64> = directions.iter().map(|d| rel * d.sup_norm()).collect();
    if steps.contains(&0.0) {
        // Zero direction: the derivative vanishes identically.
        return Ok(DerivativeEstimate {
            estimate: 0.0,
            std_error: 0.0,
            n_samples: mc.samples,
            seed: mc.seed,
            params: *params,
        });
    }

    let stats = parallel_blocks(
        mc.samples,
        |range| {
            let mut stats = RunningStats::new();
            let mut incr = vec![0.0; engine.intervals() * engine.dim];
            let mut path = engine.template_path();
            for i in range {
                let mut rng = sample_stream(mc.seed, i);
                engine.draw_increments(&mut rng, &mut incr);
                let value = if n == 1 {
                    let mut shifted = |sign: f64| {
                        engine.fill_values(&incr, &[(sign * steps[0], 0)], path.values_mut());
                        h.eval_path(&path).expect("checked")
                    };
                    (shifted(1.0) - shifted(-1.0)) / (2.0 * steps[0])
                } else {
                    let mut shifted = |sx: f64, sy: f64| {
                        engine.fill_values(
                            &incr,
                            &[(sx * steps[0], 0), (sy * steps[1], 1)],
                            path.values_mut(),
                        );
                        h.eval_path(&path).expect("checked")
                    };
                    (shifted(1.0, 1.0) - shifted(1.0, -1.0) - shifted(-1.0, 1.0)
                        + shifted(-1.0, -1.0))
                        / (4.0 * steps[0] * steps[1])
                };
                stats.push(value);
            }
            stats
        },
        |acc: &mut RunningStats, p| acc.merge(&p),
    );
    Ok(DerivativeEstimate {
        estimate: stats.mean(),
        std_error: stats.std_error(),
        n_samples: mc.samples,
        seed: mc.seed,
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::Functional;
    use approx::assert_relative_eq;

    fn params(eps: f64, delta: f64) -> SmoothingParams {
        SmoothingParams::new(eps, delta, 1.0, 1).unwrap()
    }

    #[test]
    fn norm_constant_printed_value_and_homogeneity() {
        let c = smoothing_norm_constant(1.0, 1.0, 1.0).unwrap();
        let expect = 1.0 + 1.0 + 2f64.sqrt() + (50.0 / std::f64::consts::PI).sqrt();
        assert_relative_eq!(c, expect, max_relative = 1e-14);
        assert_relative_eq!(c, 7.403636, max_relative = 1e-6);
        // halving eps*delta multiplies the cubic term by 8
        let tail = |q: f64| {
            smoothing_norm_constant(q, 1.0, 1.0).unwrap() - (1.0 + 1.0 / q + 2f64.sqrt() / (q * q))
        };
        assert_relative_eq!(tail(0.25), 8.0 * tail(0.5), max_relative = 1e-12);
    }

    #[test]
    fn m0_norm_bound_scales_with_sup() {
        let p = params(1.0, 1.0);
        assert_eq!(m0_norm_bound(&p, 0.0).unwrap(), 0.0);
        let c = smoothing_norm_constant(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(m0_norm_bound(&p, 2.0).unwrap(), 2.0 * c);
    }

    #[test]
    fn smoothness_constant_examples() {
        assert_relative_eq!(
            m0c_constant(&params(1.0, 1.0), M0cCertificate::Bounded { sup: 1.0 }).unwrap(),
            1.0
        );
        assert_relative_eq!(
            m0c_constant(&params(0.5, 0.5), M0cCertificate::Bounded { sup: 1.0 }).unwrap(),
            16.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            m0c_constant(&params(1.0, 1.0), M0cCertificate::Lipschitz { lip: 1.0 }).unwrap(),
            1.0 / std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn constant_functional_smooths_to_itself_with_zero_error() {
        let h = Functional::Constant { value: 0.75 };
        let w = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        let est = smooth_eval(
            &h,
            &w,
            &params(0.3, 0.5),
            &McConfig {
                samples: 500,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(est.estimate, 0.75);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn constant_functional_has_zero_derivatives() {
        let h = Functional::Constant { value: 1.0 };
        let w = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        let x = PiecewisePath::indicator(1.0, 0.3).unwrap();
        let y = PiecewisePath::indicator_difference(1.0, 0.3, 0.7).unwrap();
        let mc = McConfig {
            samples: 4000,
            seed: 11,
        };
        let p = params(0.2, 0.5);
        let d1 = derivative_estimate(&h, &w, &[&x], &p, &mc).unwrap();
        assert!(d1.estimate.abs() <= 3.0 * d1.std_error.max(1e-12));
        // For constant h the pair-block weight cancels E[W1x W1y] exactly.
        let d2 = derivative_estimate(&h, &w, &[&x, &y], &p, &mc).unwrap();
        assert!(d2.estimate.abs() <= 3.0 * d2.std_error.max(1e-12));
        let dcov = d2_covariance_estimate(&h, &w, &x, &y, &p, &mc).unwrap();
        assert!(dcov.estimate.abs() <= 3.0 * dcov.std_error.max(1e-12));
    }

    #[test]
    fn second_order_self_weight_is_negative_energy() {
        let x = PiecewisePath::indicator_difference(1.0, 0.3, 0.5).unwrap();
        let p = params(0.1, 0.5);
        let d2 = d2_weight(&x, &x, &p).unwrap();
        let energy = crate::paths::grad_energy(&x, 0.1).unwrap();
        assert_relative_eq!(d2, -energy / 0.25, max_relative = 1e-12);
        assert!(d2 <= 0.0);
    }

    #[test]
    fn covariance_estimator_is_symmetric_under_direction_swap() {
        let h = Functional::sup_indicator(0.5);
        let w = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        let x = PiecewisePath::indicator(1.0, 0.3).unwrap();
        let y = PiecewisePath::indicator_difference(1.0, 0.4, 0.8).unwrap();
        let p = params(0.2, 0.5);
        let mc = McConfig {
            samples: 2000,
            seed: 17,
        };
        let a = d2_covariance_estimate(&h, &w, &x, &y, &p, &mc).unwrap();
        let b = d2_covariance_estimate(&h, &w, &y, &x, &p, &mc).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    }

    #[test]
    fn covariance_and_partition_estimators_agree() {
        let h = Functional::smooth_cylinder(vec![0.5], vec![0.0], vec![1.0]).unwrap();
        let w = PiecewisePath::scalar_step(1.0, &[(0.0, 0.1), (0.6, -0.2)]).unwrap();
        let x = PiecewisePath::indicator(1.0, 0.3).unwrap();
        let y = PiecewisePath::indicator_difference(1.0, 0.2, 0.7).unwrap();
        let p = params(0.25, 0.6);
        let a = d2_covariance_estimate(
            &h,
            &w,
            &x,
            &y,
            &p,
            &McConfig {
                samples: 30_000,
                seed: 5,
            },
        )
        .unwrap();
        let b = derivative_estimate(
            &h,
            &w,
            &[&x, &y],
            &p,
            &McConfig {
                samples: 30_000,
                seed: 6,
            },
        )
        .unwrap();
        let combined = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(
            (a.estimate - b.estimate).abs() <= 3.0 * combined,
            "estimators disagree: {} vs {} (3 SE = {})",
            a.estimate,
            b.estimate,
            3.0 * combined
        );
    }

    #[test]
    fn first_derivative_respects_the_closed_form_envelope() {
        // |D^1[x]| <= sup|h| T^{1/2} (eps delta)^{-1} ||x|| (first-order
        // constant is at most one).
        let h = Functional::sup_indicator(0.4);
        let w = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        let x = PiecewisePath::indicator(1.0, 0.5).unwrap();
        let p = params(0.2, 0.5);
        let est = derivative_estimate(
            &h,
            &w,
            &[&x],
            &p,
            &McConfig {
                samples: 20_000,
                seed: 23,
            },
        )
        .unwrap();
        let envelope = 1.0 / (0.2 * 0.5);
        assert!(est.estimate.abs() - 3.0 * est.std_error <= envelope);
    }

    #[test]
    fn randomized_agreement_battery_first_and_second_order() {
        use crate::rng::sample_stream;
        use rand::Rng;
        for case in 0..4u64 {
            let mut rng = sample_stream(0xba77e3, case);
            let eps = 0.15 + 0.2 * rng.random::<f64>();
            let delta = 0.35 + 0.3 * rng.random::<f64>();
            let t1 = 0.1 + 0.35 * rng.random::<f64>();
            let t2 = t1 + 0.1 + 0.4 * rng.random::<f64>();
            let h = Functional::smooth_cylinder(
                vec![t1, t2.min(1.0)],
                vec![rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5],
                vec![0.6 + rng.random::<f64>(), 0.6 + rng.random::<f64>()],
            )
            .unwrap();
            let w = PiecewisePath::scalar_step(
                1.0,
                &[
                    (0.0, rng.random::<f64>() - 0.5),
                    (0.5, rng.random::<f64>() - 0.5),
                ],
            )
            .unwrap();
            // supports start at least eps after time zero, so the shifts
            // vanish at the origin and the two estimators target the same
            // derivative
            let a = eps + 0.02 + 0.3 * rng.random::<f64>();
            let b = a + 0.05 + 0.4 * rng.random::<f64>();
            let x = PiecewisePath::indicator(1.0, a).unwrap();
            let y = PiecewisePath::indicator_difference(1.0, a, b.min(1.0)).unwrap();
            let p = params(eps, delta);
            let mc_g = McConfig {
                samples: 15_000,
                seed: 500 + case,
            };
            let mc_f = McConfig {
                samples: 15_000,
                seed: 600 + case,
            };
            let dir_sets: [Vec<&PiecewisePath>; 2] = [vec![&x], vec![&x, &y]];
            for dirs in dir_sets {
                let g = derivative_estimate(&h, &w, &dirs, &p, &mc_g).unwrap();
                let fd = finite_difference_estimate(&h, &w, &dirs, &p, &mc_f, None).unwrap();
                let combined = (g.std_error.powi(2) + fd.std_error.powi(2)).sqrt();
                assert!(
                    (g.estimate - fd.estimate).abs() <= 3.0 * combined,
                    "case {case} order {}: {} vs {} (3se {})",
                    dirs.len(),
                    g.estimate,
                    fd.estimate,
                    3.0 * combined
                );
            }
        }
    }

    #[test]
    fn smoothed_lipschitz_functional_is_lipschitz_in_constant_shifts() {
        let h = Functional::clamped_sup(0.2, 0.9).unwrap();
        let lip = 0.9;
        let p = params(0.2, 0.4);
        let mc = McConfig {
            samples: 2000,
            seed: 31,
        };
        let w = PiecewisePath::scalar_step(1.0, &[(0.0, 0.0), (0.5, 0.3)]).unwrap();
        for shift in [0.05, 0.2, 0.7] {
            let shifted = w
                .add(&PiecewisePath::constant(1, 1.0, &[shift]).unwrap())
                .unwrap();
            let a = smooth_eval(&h, &w, &p, &mc).unwrap();
            let b = smooth_eval(&h, &shifted, &p, &mc).unwrap();
            // Same seed: the per-sample difference is bounded pointwise.
            assert!(
                (b.estimate - a.estimate).abs() <= lip * shift + 1e-12,
                "shift {shift}: |{} - {}| > {}",
                b.estimate,
                a.estimate,
                lip * shift
            );
        }
    }

    #[test]
    fn smoothed_sup_indicator_matches_a_dedicated_oracle() {
        // h = 1[sup w <= 1] at w = 0 smooths to P(sup delta B <= 1); the
        // oracle samples Brownian motion directly on its own grid.
        let h = Functional::sup_indicator(1.0);
        let w = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        let p = params(0.2, 0.1);
        let est = smooth_eval(
            &h,
            &w,
            &p,
            &McConfig {
                samples: 20_000,
                seed: 41,
            },
        )
        .unwrap();
        let bm = crate::gaussian::BrownianMotion::uniform(1, 1.0, 800, 42).unwrap();
        let mut ok = 0u64;
        let n = 20_000u64;
        for i in 0..n {
            if 0.1 * bm.sample(i).sup_coord(0) <= 1.0 {
                ok += 1;
            }
        }
        let oracle = ok as f64 / n as f64;
        let oracle_se = (oracle * (1.0 - oracle) / n as f64).sqrt();
        let combined = (est.std_error.powi(2) + oracle_se.powi(2)).sqrt();
        assert!(
            (est.estimate - oracle).abs() <= 3.0 * combined.max(1e-12),
            "smoothed value {} vs oracle {oracle}",
            est.estimate
        );
    }

    #[test]
    fn smoothing_approaches_the_functional_as_scales_shrink() {
        let h =
            Functional::smooth_cylinder(vec![0.25, 0.75], vec![0.1, -0.2], vec![0.7, 0.9]).unwrap();
        let w = PiecewisePath::scalar_linear(1.0, &[(0.0, 0.0), (0.5, 0.4), (1.0, -0.1)]).unwrap();
        let target = h.eval_path(&w).unwrap();
        let mut errors = Vec::new();
        for scale in [0.1, 0.01] {
            let est = smooth_eval(
                &h,
                &w,
                &params(scale, scale),
                &McConfig {
                    samples: 1000,
                    seed: 47,
                },
            )
            .unwrap();
            errors.push(((est.estimate - target).abs(), est.std_error));
        }
        // monotone approach within standard errors
        assert!(
            errors[1].0 <= errors[0].0 + 3.0 * (errors[0].1 + errors[1].1),
            "errors {errors:?}"
        );
        assert!(errors[1].0 < 0.05, "not converged: {errors:?}");
    }

    #[test]
    fn rejects_unsupported_orders_and_tiny_budgets() {
        let h = Functional::Constant { value: 1.0 };
        let w = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        let x = PiecewisePath::indicator(1.0, 0.5).unwrap();
        let dirs: Vec<&PiecewisePath> = vec![&x, &x, &x, &x];
        let p = params(0.2, 0.5);
        let mc = McConfig {
            samples: 100,
            seed: 1,
        };
        assert!(matches!(
            derivative_estimate(&h, &w, &dirs, &p, &mc),
            Err(Error::UnsupportedOrder(4, MAX_DERIVATIVE_ORDER))
        ));
        assert!(derivative_estimate(
            &h,
            &w,
            &[],
            &p,
            &McConfig {
                samples: 1,
                seed: 1
            }
        )
        .is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let h = Functional::Constant { value: 1.0 };
        let w = PiecewisePath::constant(2, 1.0, &[0.0, 0.0]).unwrap();
        let p = params(0.2, 0.5);
        let mc = McConfig {
            samples: 10,
            seed: 1,
        };
        assert!(matches!(
            smooth_eval(&h, &w, &p, &mc),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
