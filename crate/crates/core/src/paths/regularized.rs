//! Window-average regularization of piecewise paths.
//!
//! `w_eps(s) = (1/2eps) int_{s-eps}^{s+eps} w(u) du` with the constant
//! extension of `w` outside [0, T]. For a step source the regularization is
//! piecewise linear and its gradient piecewise constant; for a linear source
//! it is piecewise quadratic with a piecewise-linear gradient. All integrals
//! and suprema below exploit that structure and are exact up to rounding.

use super::{euclid_norm, InterpMode, PiecewisePath};
use crate::error::{Error, Result};

/// A path together with its window-average regularization machinery.
#[derive(Debug, Clone)]
pub struct RegularizedPath {
    source: PiecewisePath,
    epsilon: f64,
    /// cum[i * dim + c] = int_0^{t_i} w^(c)(u) du, exact per segment.
    cum: Vec<f64>,
}

impl RegularizedPath {
    pub fn new(source: PiecewisePath, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "regularization window must be positive, got {epsilon}"
            )));
        }
        let dim = source.dim();
        let times = source.times();
        let values = source.knot_values();
        let mut cum = vec![0.0; times.len() * dim];
        for i in 1..times.len() {
            let dt = times[i] - times[i - 1];
            for c in 0..dim {
                let seg = match source.mode() {
                    InterpMode::StepRightContinuous => values[(i - 1) * dim + c] * dt,
                    InterpMode::PiecewiseLinear => {
                        0.5 * (values[(i - 1) * dim + c] + values[i * dim + c]) * dt
                    }
                };
                cum[i * dim + c] = cum[(i - 1) * dim + c] + seg;
            }
        }
        Ok(Self {
            source,
            epsilon,
            cum,
        })
    }

    pub fn source(&self) -> &PiecewisePath {
        &self.source
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Signed integral int_0^x of the extended source, one coordinate.
    /// `seg` is the index of the last knot with time <= x when x lies in
    /// [t_seg, t_{seg+1}); callers keep it correct via binary search or a
    /// monotone cursor.
    #[inline]
    fn integral_coord_at(&self, x: f64, seg: usize, c: usize) -> f64 {
        let times = self.source.times();
        let values = self.source.knot_values();
        let dim = self.source.dim();
        if x <= 0.0 {
            return values[c] * x;
        }
        let m = times.len() - 1;
        if x >= times[m] {
            return self.cum[m * dim + c] + values[m * dim + c] * (x - times[m]);
        }
        let dt = x - times[seg];
        match self.source.mode() {
            InterpMode::StepRightContinuous => self.cum[seg * dim + c] + values[seg * dim + c] * dt,
            InterpMode::PiecewiseLinear => {
                let t_len = times[seg + 1] - times[seg];
                let a = values[seg * dim + c];
                let b = values[(seg + 1) * dim + c];
                let at_x = a + (b - a) * (dt / t_len);
                self.cum[seg * dim + c] + 0.5 * (a + at_x) * dt
            }
        }
    }

    #[inline]
    fn integral_into(&self, x: f64, out: &mut [f64]) {
        let seg = self.source.segment_index(x.max(0.0));
        for c in 0..self.source.dim() {
            out[c] = self.integral_coord_at(x, seg, c);
        }
    }

    /// Exact value of the regularized path at `s`.
    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        let dim = self.source.dim();
        debug_assert_eq!(out.len(), dim);
        let mut hi = vec![0.0; dim];
        self.integral_into(s + self.epsilon, &mut hi);
        self.integral_into(s - self.epsilon, out);
        let inv = 1.0 / (2.0 * self.epsilon);
        for c in 0..dim {
            out[c] = (hi[c] - out[c]) * inv;
        }
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.source.dim()];
        self.eval_into(s, &mut out);
        out
    }

    /// Gradient of the regularized path: `(w(s+eps) - w(s-eps)) / (2 eps)`
    /// with the extended source.
    pub fn gradient_into(&self, s: f64, out: &mut [f64]) {
        let dim = self.source.dim();
        let mut hi = vec![0.0; dim];
        self.source.eval_into(s + self.epsilon, &mut hi);
        self.source.eval_into(s - self.epsilon, out);
        let inv = 1.0 / (2.0 * self.epsilon);
        for c in 0..dim {
            out[c] = (hi[c] - out[c]) * inv;
        }
    }

    pub fn gradient(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.source.dim()];
        self.gradient_into(s, &mut out);
        out
    }

    /// Sorted breakpoints in [0, T] between which the gradient is polynomial
    /// (constant for step sources, linear for linear sources): the knots
    /// shifted by +-eps, clipped, plus both endpoints.
    pub fn gradient_breakpoints(&self) -> Vec<f64> {
        let horizon = self.source.horizon();
        let mut pts = Vec::with_capacity(2 * self.source.knot_count() + 2);
        pts.push(0.0);
        pts.push(horizon);
        for &t in self.source.times() {
            for s in [t - self.epsilon, t + self.epsilon] {
                if s > 0.0 && s < horizon {
                    pts.push(s);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// Breakpoints for the difference `w_eps - w`: gradient breakpoints plus
    /// the source knots themselves.
    fn diff_breakpoints(&self) -> Vec<f64> {
        let mut pts = self.gradient_breakpoints();
        let horizon = self.source.horizon();
        for &t in self.source.times() {
            if t > 0.0 && t < horizon {
                pts.push(t);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// Piecewise description of the gradient on a breakpoint grid: per
    /// segment the value at the midpoint and the slope (zero for a step
    /// source). Sampling at interior points keeps step sources away from
    /// their jump times, so the recovered polynomials are exact.
    fn gradient_segments(&self, breaks: &[f64]) -> GradSegments {
        let dim = self.source.dim();
        let nseg = breaks.len().saturating_sub(1);
        let mut mid_vals = vec![0.0; nseg * dim];
        let mut slopes = vec![0.0; nseg * dim];
        let mut g1 = vec![0.0; dim];
        let mut g3 = vec![0.0; dim];
        for k in 0..nseg {
            let (u0, u1) = (breaks[k], breaks[k + 1]);
            let mid = 0.5 * (u0 + u1);
            let row = &mut mid_vals[k * dim..(k + 1) * dim];
            self.gradient_into(mid, row);
            if self.source.mode() == InterpMode::PiecewiseLinear {
                let q1 = u0 + 0.25 * (u1 - u0);
                let q3 = u0 + 0.75 * (u1 - u0);
                self.gradient_into(q1, &mut g1);
                self.gradient_into(q3, &mut g3);
                let inv = 1.0 / (q3 - q1);
                for c in 0..dim {
                    slopes[k * dim + c] = (g3[c] - g1[c]) * inv;
                }
            }
        }
        GradSegments {
            breaks: breaks.to_vec(),
            mid_vals,
            slopes,
            dim,
        }
    }

    /// Exact int_0^T <grad x_eps, grad y_eps> du for two regularized paths on
    /// the same horizon and dimension.
    pub fn gradient_inner_product(&self, other: &RegularizedPath) -> Result<f64> {
        if self.source.dim() != other.source.dim()
            || self.source.horizon() != other.source.horizon()
        {
            return Err(Error::ShapeMismatch(
                "gradient inner product requires equal dimension and horizon".into(),
            ));
        }
        let mut breaks = self.gradient_breakpoints();
        breaks.extend_from_slice(&other.gradient_breakpoints());
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let a = self.gradient_segments(&breaks);
        let b = other.gradient_segments(&breaks);
        let dim = a.dim;
        let mut total = 0.0;
        for k in 0..breaks.len() - 1 {
            let len = breaks[k + 1] - breaks[k];
            // Product of two linear polynomials about the segment midpoint:
            // the cross terms integrate to zero by symmetry.
            let mut const_part = 0.0;
            let mut slope_part = 0.0;
            for c in 0..dim {
                const_part += a.mid_vals[k * dim + c] * b.mid_vals[k * dim + c];
                slope_part += a.slopes[k * dim + c] * b.slopes[k * dim + c];
            }
            total += const_part * len + slope_part * len * len * len / 12.0;
        }
        Ok(total)
    }

    /// Exact gradient energy int_0^T |grad w_eps(u)|^2 du.
    pub fn grad_energy(&self) -> f64 {
        self.gradient_inner_product(self)
            .expect("self inner product cannot mismatch")
    }

    /// Exact supremum over [0, T] of the Euclidean gradient norm.
    pub fn sup_gradient_norm(&self) -> f64 {
        let breaks = self.gradient_breakpoints();
        let segs = self.gradient_segments(&breaks);
        let dim = segs.dim;
        let mut best = 0.0f64;
        let mut buf = vec![0.0; dim];
        for k in 0..breaks.len() - 1 {
            let h = 0.5 * (breaks[k + 1] - breaks[k]);
            match self.source.mode() {
                InterpMode::StepRightContinuous => {
                    best = best.max(euclid_norm(&segs.mid_vals[k * dim..(k + 1) * dim]));
                }
                InterpMode::PiecewiseLinear => {
                    for sign in [-1.0, 1.0] {
                        for c in 0..dim {
                            buf[c] =
                                segs.mid_vals[k * dim + c] + sign * h * segs.slopes[k * dim + c];
                        }
                        best = best.max(euclid_norm(&buf));
                    }
                }
            }
        }
        best
    }

    /// Exact sup-norm distance `|| w_eps - w ||` over [0, T].
    pub fn sup_diff(&self) -> f64 {
        let breaks = self.diff_breakpoints();
        let dim = self.source.dim();
        let nseg = breaks.len() - 1;
        match self.source.mode() {
            InterpMode::StepRightContinuous => {
                // w_eps is continuous piecewise linear and w constant per
                // segment, so the difference is linear per segment and its
                // norm peaks at segment ends (one-sided at jumps).
                let reg_at_breaks = self.eval_monotone(&breaks);
                let mut best = 0.0f64;
                let mut src_seg = 0usize;
                let times = self.source.times();
                let values = self.source.knot_values();
                for k in 0..nseg {
                    let mid = 0.5 * (breaks[k] + breaks[k + 1]);
                    while src_seg + 1 < times.len() && times[src_seg + 1] <= mid {
                        src_seg += 1;
                    }
                    let v = &values[src_seg * dim..(src_seg + 1) * dim];
                    for end in [k, k + 1] {
                        let r = &reg_at_breaks[end * dim..(end + 1) * dim];
                        let mut sum = 0.0;
                        for c in 0..dim {
                            let d = r[c] - v[c];
                            sum += d * d;
                        }
                        best = best.max(sum.sqrt());
                    }
                }
                best
            }
            InterpMode::PiecewiseLinear => {
                // Difference is quadratic per segment; recover it from the
                // endpoint and midpoint values and maximize the norm exactly.
                let mut queries = Vec::with_capacity(2 * breaks.len());
                for k in 0..nseg {
                    queries.push(breaks[k]);
                    queries.push(0.5 * (breaks[k] + breaks[k + 1]));
                }
                queries.push(*breaks.last().unwrap());
                let reg_q = self.eval_monotone(&queries);
                let src_q = self.source_eval_monotone(&queries);
                let mut g = vec![0.0; queries.len() * dim];
                for (i, gv) in g.iter_mut().enumerate() {
                    *gv = reg_q[i] - src_q[i];
                }
                let mut best = 0.0f64;
                let mut qa = vec![0.0; dim];
                let mut qb = vec![0.0; dim];
                let mut qc = vec![0.0; dim];
                for k in 0..nseg {
                    let h = 0.5 * (breaks[k + 1] - breaks[k]);
                    if h <= 0.0 {
                        continue;
                    }
                    let g0 = &g[(2 * k) * dim..(2 * k + 1) * dim];
                    let gm = &g[(2 * k + 1) * dim..(2 * k + 2) * dim];
                    let g1 = &g[(2 * k + 2) * dim..(2 * k + 3) * dim];
                    // g(tau) = A + B tau + C tau^2 about the midpoint.
                    for c in 0..dim {
                        qa[c] = gm[c];
                        qb[c] = (g1[c] - g0[c]) / (2.0 * h);
                        qc[c] = (g1[c] + g0[c] - 2.0 * gm[c]) / (2.0 * h * h);
                    }
                    best = best.max(max_norm_of_quadratic(&qa, &qb, &qc, h));
                }
                best
            }
        }
    }

    /// Evaluate the regularization at a nondecreasing list of times with
    /// monotone cursors (amortized O(1) per query).
    fn eval_monotone(&self, queries: &[f64]) -> Vec<f64> {
        let dim = self.source.dim();
        let times = self.source.times();
        let mut out = vec![0.0; queries.len() * dim];
        let (mut seg_lo, mut seg_hi) = (0usize, 0usize);
        let inv = 1.0 / (2.0 * self.epsilon);
        for (q, &s) in queries.iter().enumerate() {
            let lo = s - self.epsilon;
            let hi = s + self.epsilon;
            while seg_lo + 1 < times.len() && times[seg_lo + 1] <= lo {
                seg_lo += 1;
            }
            while seg_hi + 1 < times.len() && times[seg_hi + 1] <= hi {
                seg_hi += 1;
            }
            for c in 0..dim {
                let a = self.integral_coord_at(lo, seg_lo, c);
                let b = self.integral_coord_at(hi, seg_hi, c);
                out[q * dim + c] = (b - a) * inv;
            }
        }
        out
    }

    fn source_eval_monotone(&self, queries: &[f64]) -> Vec<f64> {
        let dim = self.source.dim();
        let mut out = vec![0.0; queries.len() * dim];
        for (q, &s) in queries.iter().enumerate() {
            self.source.eval_into(s, &mut out[q * dim..(q + 1) * dim]);
        }
        out
    }
}

struct GradSegments {
    #[allow(dead_code)]
    breaks: Vec<f64>,
    mid_vals: Vec<f64>,
    slopes: Vec<f64>,
    dim: usize,
}

/// Maximum of |A + B tau + C tau^2| (Euclidean over coordinates) for tau in
/// [-h, h]. Scalar paths use the vertex of the parabola; higher dimensions
/// isolate the roots of the derivative cubic of the squared norm.
fn max_norm_of_quadratic(a: &[f64], b: &[f64], c: &[f64], h: f64) -> f64 {
    let dim = a.len();
    let eval_norm = |tau: f64| -> f64 {
        let mut sum = 0.0;
        for i in 0..dim {
            let v = a[i] + b[i] * tau + c[i] * tau * tau;
            sum += v * v;
        }
        sum.sqrt()
    };
    let mut best = eval_norm(-h).max(eval_norm(h));
    if dim == 1 {
        if c[0] != 0.0 {
            let vertex = -b[0] / (2.0 * c[0]);
            if vertex > -h && vertex < h {
                best = best.max(eval_norm(vertex));
            }
        }
        return best;
    }
    // d/dtau |g|^2 = 2 sum (A + B tau + C tau^2)(B + 2 C tau): a cubic.
    let mut k0 = 0.0;
    let mut k1 = 0.0;
    let mut k2 = 0.0;
    let mut k3 = 0.0;
    for i in 0..dim {
        k0 += a[i] * b[i];
        k1 += b[i] * b[i] + 2.0 * a[i] * c[i];
        k2 += 3.0 * b[i] * c[i];
        k3 += 2.0 * c[i] * c[i];
    }
    for root in cubic_roots_in(k0, k1, k2, k3, -h, h) {
        best = best.max(eval_norm(root));
    }
    best
}

/// Real roots of k0 + k1 x + k2 x^2 + k3 x^3 in (lo, hi), by splitting at the
/// critical points and bisecting each monotone piece.
fn cubic_roots_in(k0: f64, k1: f64, k2: f64, k3: f64, lo: f64, hi: f64) -> Vec<f64> {
    let f = |x: f64| k0 + x * (k1 + x * (k2 + x * k3));
    let mut cuts = vec![lo, hi];
    if k3 != 0.0 {
        // critical points: k1 + 2 k2 x + 3 k3 x^2 = 0
        let disc = k2 * k2 - 3.0 * k3 * k1;
        if disc > 0.0 {
            let sq = disc.sqrt();
            for r in [(-k2 - sq) / (3.0 * k3), (-k2 + sq) / (3.0 * k3)] {
                if r > lo && r < hi {
                    cuts.push(r);
                }
            }
        }
    } else if k2 != 0.0 {
        let r = -k1 / (2.0 * k2);
        if r > lo && r < hi {
            cuts.push(r);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn regularizing_a_constant_is_identity() {
        let p = PiecewisePath::constant(2, 1.0, &[1.5, -2.0]).unwrap();
        let r = p.regularize(0.3).unwrap();
        for s in [0.0, 0.1, 0.5, 0.99, 1.0] {
            let v = r.eval(s);
            assert_relative_eq!(v[0], 1.5, max_relative = 1e-14);
            assert_relative_eq!(v[1], -2.0, max_relative = 1e-14);
        }
        assert_eq!(r.grad_energy(), 0.0);
    }

    #[test]
    fn interior_average_of_a_line_is_the_line() {
        let p = PiecewisePath::scalar_linear(1.0, &[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let eps = 0.2;
        let r = p.regularize(eps).unwrap();
        for s in [0.2, 0.35, 0.5, 0.8] {
            assert_relative_eq!(r.eval(s)[0], s, max_relative = 1e-13);
        }
    }

    #[test]
    fn half_window_sees_a_unit_jump() {
        // Closed-form window integral, cross-checked below by quadrature.
        let p = PiecewisePath::scalar_step(1.0, &[(0.0, 0.0), (0.5, 1.0)]).unwrap();
        let r = p.regularize(0.25).unwrap();
        assert_relative_eq!(r.eval(0.5)[0], 0.5, max_relative = 1e-14);
        let oracle = quadrature_window_average(&p, 0.25, 0.5);
        assert_relative_eq!(r.eval(0.5)[0], oracle, max_relative = 1e-9);
    }

    #[test]
    fn rejects_nonpositive_window() {
        let p = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        assert!(p.regularize(0.0).is_err());
        assert!(p.regularize(-0.1).is_err());
    }

    /// Midpoint-rule oracle for the window average, refined enough for 1e-9.
    fn quadrature_window_average(p: &PiecewisePath, eps: f64, s: f64) -> f64 {
        let n = 2_000_000;
        let h = 2.0 * eps / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let u = s - eps + (i as f64 + 0.5) * h;
            acc += p.eval_coord(u, 0);
        }
        acc * h / (2.0 * eps)
    }

    #[test]
    fn grad_energy_interior_indicator_closed_form() {
        // For x = I_s - I_t fully interior, energy = min(2 eps, t-s)/(2 eps^2).
        let x = PiecewisePath::indicator_difference(1.0, 0.3, 0.5).unwrap();
        let e = x.regularize(0.1).unwrap().grad_energy();
        assert_relative_eq!(e, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn grad_energy_truncates_at_the_boundary() {
        // With eps = 0.5 the left shifted window [s-eps, t-eps) leaves [0, T],
        // so only the right half of the interior formula survives; the
        // envelope (t-s)/(2 eps^2) = 0.4 still dominates.
        let x = PiecewisePath::indicator_difference(1.0, 0.3, 0.5).unwrap();
        let e = x.regularize(0.5).unwrap().grad_energy();
        assert_relative_eq!(e, 0.2, max_relative = 1e-12);
        assert!(e <= 0.2 / (2.0 * 0.25) + 1e-12);
    }

    #[test]
    fn gradient_definition_matches_shifted_difference() {
        let p = PiecewisePath::scalar_step(1.0, &[(0.0, 0.5), (0.4, -1.0), (0.7, 2.0)]).unwrap();
        let eps = 0.15;
        let r = p.regularize(eps).unwrap();
        for s in [0.0, 0.2, 0.41, 0.63, 0.99] {
            let g = r.gradient(s)[0];
            let expect = (p.eval_coord(s + eps, 0) - p.eval_coord(s - eps, 0)) / (2.0 * eps);
            assert_relative_eq!(g, expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn averaging_contracts_the_sup_norm() {
        // checked on a dense evaluation grid plus the knots, for both modes
        let step =
            PiecewisePath::scalar_step(1.0, &[(0.0, 0.4), (0.3, -1.2), (0.6, 0.9), (0.9, -0.3)])
                .unwrap();
        let linear =
            PiecewisePath::scalar_linear(1.0, &[(0.0, -0.8), (0.35, 1.1), (0.7, -0.5), (1.0, 0.2)])
                .unwrap();
        for p in [step, linear] {
            for eps in [0.05, 0.2, 0.7] {
                let reg = p.regularize(eps).unwrap();
                let sup = p.sup_norm();
                let mut grid: Vec<f64> = (0..=2000).map(|i| i as f64 / 2000.0).collect();
                grid.extend_from_slice(p.times());
                for s in grid {
                    assert!(reg.eval(s)[0].abs() <= sup + 1e-12);
                }
                // crude energy bound from the gradient sup estimate
                assert!(reg.grad_energy() <= 1.0 / (eps * eps) * sup * sup + 1e-9);
            }
        }
    }

    #[test]
    fn sup_diff_matches_dense_grid_on_step_paths() {
        let p =
            PiecewisePath::scalar_step(1.0, &[(0.0, 0.2), (0.21, -0.7), (0.48, 0.9), (0.83, 0.1)])
                .unwrap();
        let r = p.regularize(0.13).unwrap();
        let exact = r.sup_diff();
        let mut grid_max = 0.0f64;
        for i in 0..=200_000 {
            let s = i as f64 / 200_000.0;
            grid_max = grid_max.max((r.eval(s)[0] - p.eval_coord(s, 0)).abs());
        }
        assert!(exact >= grid_max - 1e-9);
        assert!(exact <= grid_max + 1e-4); // grid may narrowly miss the peak
    }

    #[test]
    fn sup_diff_matches_dense_grid_on_linear_paths() {
        let p =
            PiecewisePath::scalar_linear(1.0, &[(0.0, 0.0), (0.3, 1.0), (0.55, -0.4), (1.0, 0.6)])
                .unwrap();
        let r = p.regularize(0.09).unwrap();
        let exact = r.sup_diff();
        let mut grid_max = 0.0f64;
        for i in 0..=200_000 {
            let s = i as f64 / 200_000.0;
            grid_max = grid_max.max((r.eval(s)[0] - p.eval_coord(s, 0)).abs());
        }
        assert!(exact >= grid_max - 1e-9);
        assert!(exact <= grid_max + 1e-6);
    }

    #[test]
    fn two_dimensional_sup_diff_agrees_with_grid() {
        let p = PiecewisePath::new(
            2,
            1.0,
            vec![0.0, 0.25, 0.6],
            vec![0.1, -0.5, 0.9, 0.4, -0.3, 0.2],
            InterpMode::PiecewiseLinear,
        )
        .unwrap();
        let r = p.regularize(0.2).unwrap();
        let exact = r.sup_diff();
        let mut grid_max = 0.0f64;
        let mut rv = vec![0.0; 2];
        let mut pv = vec![0.0; 2];
        for i in 0..=100_000 {
            let s = i as f64 / 100_000.0;
            r.eval_into(s, &mut rv);
            p.eval_into(s, &mut pv);
            let d = ((rv[0] - pv[0]).powi(2) + (rv[1] - pv[1]).powi(2)).sqrt();
            grid_max = grid_max.max(d);
        }
        assert!(exact >= grid_max - 1e-9);
        assert!(exact <= grid_max + 1e-6);
    }
}
