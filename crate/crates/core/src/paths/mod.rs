//! Exact representation and algebra of d-dimensional cadlag paths on [0, T].
//!
//! A path is a finite list of knots with either right-continuous step or
//! piecewise-linear interpolation. Both process families of interest are
//! exactly representable: normalized partial sums as step paths and Brownian
//! motion on a simulation grid as linear paths. Keeping the representation
//! exact lets the window-average regularization, its gradient, and all sup
//! and energy functionals be computed by closed-form piecewise algebra
//! instead of discretization.

mod regularized;

pub use regularized::RegularizedPath;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Interpolation rule between knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpMode {
    /// Right-continuous step function: the value at a knot holds until the
    /// next knot.
    StepRightContinuous,
    /// Continuous piecewise-linear interpolation between knots.
    PiecewiseLinear,
}

/// A d-dimensional path on [0, T] stored as knots `(t_i, v_i)` with
/// `t_0 = 0 < t_1 < ... < t_m <= T`.
///
/// Evaluation outside [0, T] follows the constant extension `w(t) = w(0)`
/// for `t < 0` and `w(t) = w(T)` for `t > T`. Values after the last knot are
/// constant, so the extension is just evaluation at the clamped time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewisePath {
    dim: usize,
    horizon: f64,
    times: Vec<f64>,
    values: Vec<f64>, // row-major: values[i * dim + c]
    mode: InterpMode,
}

#[derive(Deserialize)]
struct RawPath {
    dim: usize,
    horizon: f64,
    times: Vec<f64>,
    values: Vec<f64>,
    mode: InterpMode,
}

impl<'de> Deserialize<'de> for PiecewisePath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPath::deserialize(d)?;
        PiecewisePath::new(raw.dim, raw.horizon, raw.times, raw.values, raw.mode)
            .map_err(serde::de::Error::custom)
    }
}

#[inline]
pub(crate) fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl PiecewisePath {
    /// Build a path, validating all structural invariants.
    pub fn new(
        dim: usize,
        horizon: f64,
        times: Vec<f64>,
        values: Vec<f64>,
        mode: InterpMode,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::MalformedPath("dimension must be positive".into()));
        }
        if !(horizon.is_finite() && horizon >= 1.0) {
            return Err(Error::MalformedPath(format!(
                "horizon must be finite and >= 1, got {horizon}"
            )));
        }
        if times.is_empty() {
            return Err(Error::MalformedPath("empty knot list".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::MalformedPath(format!(
                "first knot must be at time 0, got {}",
                times[0]
            )));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::MalformedPath(format!(
                    "knot times must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let last = *times.last().unwrap();
        if !(last <= horizon) {
            return Err(Error::MalformedPath(format!(
                "last knot {last} exceeds horizon {horizon}"
            )));
        }
        if values.len() != times.len() * dim {
            return Err(Error::MalformedPath(format!(
                "expected {} values for {} knots in dimension {}, got {}",
                times.len() * dim,
                times.len(),
                dim,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::MalformedPath("non-finite knot data".into()));
        }
        Ok(Self {
            dim,
            horizon,
            times,
            values,
            mode,
        })
    }

    /// Internal constructor for callers that already guarantee the invariants
    /// (e.g. sampling on a validated grid).
    pub(crate) fn from_parts_unchecked(
        dim: usize,
        horizon: f64,
        times: Vec<f64>,
        values: Vec<f64>,
        mode: InterpMode,
    ) -> Self {
        debug_assert_eq!(values.len(), times.len() * dim);
        Self {
            dim,
            horizon,
            times,
            values,
            mode,
        }
    }

    /// Constant path.
    pub fn constant(dim: usize, horizon: f64, value: &[f64]) -> Result<Self> {
        if value.len() != dim {
            return Err(Error::MalformedPath(format!(
                "constant value has length {}, dimension is {}",
                value.len(),
                dim
            )));
        }
        Self::new(
            dim,
            horizon,
            vec![0.0],
            value.to_vec(),
            InterpMode::StepRightContinuous,
        )
    }

    /// Scalar step path from `(time, value)` knots.
    pub fn scalar_step(horizon: f64, knots: &[(f64, f64)]) -> Result<Self> {
        let times = knots.iter().map(|k| k.0).collect();
        let values = knots.iter().map(|k| k.1).collect();
        Self::new(1, horizon, times, values, InterpMode::StepRightContinuous)
    }

    /// Scalar piecewise-linear path from `(time, value)` knots.
    pub fn scalar_linear(horizon: f64, knots: &[(f64, f64)]) -> Result<Self> {
        let times = knots.iter().map(|k| k.0).collect();
        let values = knots.iter().map(|k| k.1).collect();
        Self::new(1, horizon, times, values, InterpMode::PiecewiseLinear)
    }

    /// The scalar step indicator `u -> 1[u >= r]` on [0, horizon].
    pub fn indicator(horizon: f64, r: f64) -> Result<Self> {
        if !(r.is_finite() && (0.0..=horizon).contains(&r)) {
            return Err(Error::ParameterDomain(format!(
                "indicator time {r} outside [0, {horizon}]"
            )));
        }
        if r <= 0.0 {
            Self::scalar_step(horizon, &[(0.0, 1.0)])
        } else {
            Self::scalar_step(horizon, &[(0.0, 0.0), (r, 1.0)])
        }
    }

    /// The scalar step direction `u -> 1[u >= s] - 1[u >= t]`, the indicator
    /// of `[min(s,t), max(s,t))` up to sign. `s = t` gives the zero path.
    pub fn indicator_difference(horizon: f64, s: f64, t: f64) -> Result<Self> {
        let a = Self::indicator(horizon, s)?;
        let b = Self::indicator(horizon, t)?;
        a.add(&b.scale(-1.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn mode(&self) -> InterpMode {
        self.mode
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn knot_count(&self) -> usize {
        self.times.len()
    }

    /// Knot values, row-major (`values[i * dim + c]`).
    pub fn knot_values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable value storage for samplers that rewrite a template path in
    /// place (knot times and mode stay fixed, so the invariants hold).
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Index of the last knot with time <= t (0 if t precedes all knots).
    #[inline]
    pub(crate) fn segment_index(&self, t: f64) -> usize {
        match self
            .times
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        }
    }

    /// Evaluate one coordinate at time `t` (with constant extension outside
    /// [0, horizon]).
    pub fn eval_coord(&self, t: f64, coord: usize) -> f64 {
        let t = t.clamp(0.0, self.horizon);
        let i = self.segment_index(t);
        match self.mode {
            InterpMode::StepRightContinuous => self.values[i * self.dim + coord],
            InterpMode::PiecewiseLinear => {
                if i + 1 >= self.times.len() || t <= self.times[i] {
                    self.values[i * self.dim + coord]
                } else {
                    let t0 = self.times[i];
                    let t1 = self.times[i + 1];
                    let w = (t - t0) / (t1 - t0);
                    let a = self.values[i * self.dim + coord];
                    let b = self.values[(i + 1) * self.dim + coord];
                    a + w * (b - a)
                }
            }
        }
    }

    /// Evaluate the path at time `t` into `out`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let t = t.clamp(0.0, self.horizon);
        let i = self.segment_index(t);
        match self.mode {
            InterpMode::StepRightContinuous => {
                out.copy_from_slice(&self.values[i * self.dim..(i + 1) * self.dim]);
            }
            InterpMode::PiecewiseLinear => {
                if i + 1 >= self.times.len() || t <= self.times[i] {
                    out.copy_from_slice(&self.values[i * self.dim..(i + 1) * self.dim]);
                } else {
                    let t0 = self.times[i];
                    let t1 = self.times[i + 1];
                    let w = (t - t0) / (t1 - t0);
                    for c in 0..self.dim {
                        let a = self.values[i * self.dim + c];
                        let b = self.values[(i + 1) * self.dim + c];
                        out[c] = a + w * (b - a);
                    }
                }
            }
        }
    }

    /// Evaluate the path at time `t`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    /// Exact supremum over [0, horizon] of the Euclidean norm of the values.
    ///
    /// For both modes the supremum is attained on the knot set: step paths
    /// are constant between knots, and the norm is convex along each linear
    /// segment.
    pub fn sup_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.times.len() {
            let n = euclid_norm(&self.values[i * self.dim..(i + 1) * self.dim]);
            best = best.max(n);
        }
        best
    }

    /// Exact supremum over [0, horizon] of one (signed) coordinate.
    pub fn sup_coord(&self, coord: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..self.times.len() {
            best = best.max(self.values[i * self.dim + coord]);
        }
        best
    }

    /// Uniform modulus of continuity: sup of |w(t) - w(s)| (Euclidean) over
    /// `0 <= s < t <= horizon` with `t - s < eta`.
    pub fn modulus_of_continuity(&self, eta: f64) -> Result<f64> {
        if !(eta > 0.0 && eta <= self.horizon) {
            return Err(Error::ParameterDomain(format!(
                "modulus window must lie in (0, horizon], got {eta}"
            )));
        }
        let m = self.times.len();
        let mut best = 0.0f64;
        match self.mode {
            InterpMode::StepRightContinuous => {
                // Value v_i is attained on [t_i, t_{i+1}); the pair (i, j) is
                // feasible iff some s in segment i and t in segment j satisfy
                // t - s < eta, i.e. t_j - t_{i+1} < eta (s can approach the
                // segment end).
                for i in 0..m {
                    if i + 1 >= m {
                        break;
                    }
                    let end_i = self.times[i + 1];
                    for j in (i + 1)..m {
                        if self.times[j] - end_i >= eta {
                            break;
                        }
                        let d = self.knot_pair_distance(i, j);
                        best = best.max(d);
                    }
                }
                Ok(best)
            }
            InterpMode::PiecewiseLinear => {
                // Continuity makes the sup over t - s < eta equal the max
                // over the closed constraint t - s <= eta, which (fixing the
                // segment cell) is a convex maximization: the optimum sits at
                // a cell vertex, i.e. both endpoints are knots, or one is a
                // knot and the other at distance exactly eta.
                let mut anchors: Vec<f64> = self.times.clone();
                if *anchors.last().unwrap() < self.horizon {
                    anchors.push(self.horizon);
                }
                let mut buf_a = vec![0.0; self.dim];
                let mut buf_b = vec![0.0; self.dim];
                for (ai, &a) in anchors.iter().enumerate() {
                    for &b in anchors.iter().skip(ai + 1) {
                        if b - a > eta {
                            break;
                        }
                        best = best.max(self.point_distance(a, b, &mut buf_a, &mut buf_b));
                    }
                    if a + eta <= self.horizon {
                        best = best.max(self.point_distance(a, a + eta, &mut buf_a, &mut buf_b));
                    }
                    if a - eta >= 0.0 {
                        best = best.max(self.point_distance(a - eta, a, &mut buf_a, &mut buf_b));
                    }
                }
                Ok(best)
            }
        }
    }

    fn knot_pair_distance(&self, i: usize, j: usize) -> f64 {
        let mut sum = 0.0;
        for c in 0..self.dim {
            let d = self.values[j * self.dim + c] - self.values[i * self.dim + c];
            sum += d * d;
        }
        sum.sqrt()
    }

    fn point_distance(&self, s: f64, t: f64, buf_a: &mut [f64], buf_b: &mut [f64]) -> f64 {
        self.eval_into(s, buf_a);
        self.eval_into(t, buf_b);
        let mut sum = 0.0;
        for c in 0..self.dim {
            let d = buf_b[c] - buf_a[c];
            sum += d * d;
        }
        sum.sqrt()
    }

    /// Largest jump sup_{0 <= t <= T} |w(t) - w(t-)|; zero for linear mode.
    pub fn max_jump(&self) -> f64 {
        match self.mode {
            InterpMode::PiecewiseLinear => 0.0,
            InterpMode::StepRightContinuous => {
                let mut best = 0.0f64;
                for i in 1..self.times.len() {
                    best = best.max(self.knot_pair_distance(i - 1, i));
                }
                best
            }
        }
    }

    /// Multiply all values by `factor`.
    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= factor;
        }
        out
    }

    /// Pointwise sum of two paths of the same mode, dimension and horizon,
    /// exact on the union of the knot sets.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.horizon != other.horizon || self.mode != other.mode {
            return Err(Error::ShapeMismatch(
                "path sum requires equal dimension, horizon and mode".into(),
            ));
        }
        let mut times: Vec<f64> = Vec::with_capacity(self.times.len() + other.times.len());
        let (mut i, mut j) = (0, 0);
        while i < self.times.len() || j < other.times.len() {
            let t = match (self.times.get(i), other.times.get(j)) {
                (Some(&a), Some(&b)) => {
                    if a <= b {
                        i += 1;
                        if a == b {
                            j += 1;
                        }
                        a
                    } else {
                        j += 1;
                        b
                    }
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            times.push(t);
        }
        let mut values = vec![0.0; times.len() * self.dim];
        let mut buf_a = vec![0.0; self.dim];
        let mut buf_b = vec![0.0; self.dim];
        for (k, &t) in times.iter().enumerate() {
            self.eval_into(t, &mut buf_a);
            other.eval_into(t, &mut buf_b);
            for c in 0..self.dim {
                values[k * self.dim + c] = buf_a[c] + buf_b[c];
            }
        }
        Ok(Self::from_parts_unchecked(
            self.dim,
            self.horizon,
            times,
            values,
            self.mode,
        ))
    }

    /// Window-average regularization of this path (clones the source).
    pub fn regularize(&self, epsilon: f64) -> Result<RegularizedPath> {
        RegularizedPath::new(self.clone(), epsilon)
    }

    /// Write the knots as CSV with header `t,v1,...,vd`. Floats use shortest
    /// round-trip decimal rendering, so times and values survive a
    /// write/read cycle bit-exactly. Mode and horizon travel in the
    /// experiment config, not in the CSV.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=self.dim).map(|c| format!("v{c}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (i, &t) in self.times.iter().enumerate() {
            let mut row = String::new();
            row.push_str(&format!("{t}"));
            for c in 0..self.dim {
                row.push(',');
                row.push_str(&format!("{}", self.values[i * self.dim + c]));
            }
            writeln!(out, "{row}")?;
        }
        Ok(())
    }

    /// Parse a path from the CSV format produced by [`Self::write_csv`].
    pub fn read_csv<R: BufRead>(reader: R, mode: InterpMode, horizon: f64) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedPath("empty CSV".into()))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.first() != Some(&"t") || cols.len() < 2 {
            return Err(Error::MalformedPath(format!("bad CSV header: {header:?}")));
        }
        let dim = cols.len() - 1;
        let mut times = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != dim + 1 {
                return Err(Error::MalformedPath(format!(
                    "row has {} fields, expected {}",
                    fields.len(),
                    dim + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::MalformedPath(format!("bad float {s:?}: {e}")))
            };
            times.push(parse(fields[0])?);
            for f in &fields[1..] {
                values.push(parse(f)?);
            }
        }
        Self::new(dim, horizon, times, values, mode)
    }
}

/// Energy of the regularization gradient, `int_0^T |grad w_eps(u)|^2 du`,
/// computed exactly from the piecewise structure.
pub fn grad_energy(direction: &PiecewisePath, epsilon: f64) -> Result<f64> {
    Ok(direction.regularize(epsilon)?.grad_energy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_constant_path() {
        let p = PiecewisePath::constant(2, 1.0, &[3.0, 4.0]).unwrap();
        for t in [-1.0, 0.0, 0.3, 1.0, 2.5] {
            assert_eq!(p.eval(t), vec![3.0, 4.0]);
        }
        assert_relative_eq!(p.sup_norm(), 5.0);
    }

    #[test]
    fn eval_step_right_continuity_and_extension() {
        let p = PiecewisePath::scalar_step(1.0, &[(0.0, 0.0), (0.5, 1.0)]).unwrap();
        assert_eq!(p.eval_coord(0.5, 0), 1.0); // right continuous at the jump
        assert_eq!(p.eval_coord(0.499, 0), 0.0);
        assert_eq!(p.eval_coord(2.0, 0), 1.0); // w(t) = w(T) beyond the horizon
        assert_eq!(p.eval_coord(-3.0, 0), 0.0); // w(t) = w(0) before 0
    }

    #[test]
    fn eval_linear_interpolation() {
        let p = PiecewisePath::scalar_linear(1.0, &[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_relative_eq!(p.eval_coord(0.25, 0), 0.25);
        assert_relative_eq!(p.sup_norm(), 1.0);
        assert_eq!(p.max_jump(), 0.0);
    }

    #[test]
    fn malformed_paths_are_rejected() {
        assert!(matches!(
            PiecewisePath::new(1, 1.0, vec![], vec![], InterpMode::StepRightContinuous),
            Err(Error::MalformedPath(_))
        ));
        assert!(PiecewisePath::new(
            1,
            1.0,
            vec![0.0, 0.5, 0.5],
            vec![0.0, 1.0, 2.0],
            InterpMode::StepRightContinuous
        )
        .is_err());
        assert!(PiecewisePath::new(
            1,
            1.0,
            vec![0.1, 0.5],
            vec![0.0, 1.0],
            InterpMode::StepRightContinuous
        )
        .is_err());
        assert!(PiecewisePath::new(
            1,
            0.5, // horizon below 1 is outside the supported regime
            vec![0.0],
            vec![0.0],
            InterpMode::StepRightContinuous
        )
        .is_err());
    }

    #[test]
    fn sup_norm_step_values() {
        let p = PiecewisePath::scalar_step(1.0, &[(0.0, 1.0), (0.3, -2.0), (0.7, 1.5)]).unwrap();
        assert_relative_eq!(p.sup_norm(), 2.0);
    }

    #[test]
    fn modulus_of_constant_path_is_zero() {
        let p = PiecewisePath::constant(1, 1.0, &[5.0]).unwrap();
        assert_eq!(p.modulus_of_continuity(0.2).unwrap(), 0.0);
    }

    #[test]
    fn modulus_sees_a_jump_in_every_window() {
        let p = PiecewisePath::scalar_step(1.0, &[(0.0, 0.0), (0.5, 1.0)]).unwrap();
        assert_relative_eq!(p.modulus_of_continuity(0.1).unwrap(), 1.0);
    }

    #[test]
    fn modulus_of_linear_slope_is_slope_times_window() {
        let p = PiecewisePath::scalar_linear(1.0, &[(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert_relative_eq!(p.modulus_of_continuity(0.25).unwrap(), 0.5);
    }

    #[test]
    fn modulus_rejects_bad_windows() {
        let p = PiecewisePath::constant(1, 1.0, &[0.0]).unwrap();
        assert!(p.modulus_of_continuity(0.0).is_err());
        assert!(p.modulus_of_continuity(-0.1).is_err());
        assert!(p.modulus_of_continuity(1.5).is_err());
    }

    #[test]
    fn max_jump_examples() {
        let p = PiecewisePath::scalar_step(1.0, &[(0.0, 0.0), (0.4, 1.0), (0.8, -1.0)]).unwrap();
        assert_relative_eq!(p.max_jump(), 2.0);
        let c = PiecewisePath::constant(1, 1.0, &[7.0]).unwrap();
        assert_eq!(c.max_jump(), 0.0);
    }

    #[test]
    fn indicator_paths() {
        let i3 = PiecewisePath::indicator(1.0, 0.3).unwrap();
        assert_eq!(i3.eval_coord(0.2, 0), 0.0);
        assert_eq!(i3.eval_coord(0.3, 0), 1.0);
        let d = PiecewisePath::indicator_difference(1.0, 0.3, 0.5).unwrap();
        assert_eq!(d.eval_coord(0.2, 0), 0.0);
        assert_eq!(d.eval_coord(0.4, 0), 1.0);
        assert_eq!(d.eval_coord(0.6, 0), 0.0);
        let z = PiecewisePath::indicator_difference(1.0, 0.4, 0.4).unwrap();
        assert_eq!(z.sup_norm(), 0.0);
    }

    #[test]
    fn add_step_paths_on_knot_union() {
        let a = PiecewisePath::scalar_step(1.0, &[(0.0, 1.0), (0.5, 2.0)]).unwrap();
        let b = PiecewisePath::scalar_step(1.0, &[(0.0, 0.5), (0.25, -1.0)]).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.times(), &[0.0, 0.25, 0.5]);
        assert_eq!(s.eval_coord(0.1, 0), 1.5);
        assert_eq!(s.eval_coord(0.3, 0), 0.0);
        assert_eq!(s.eval_coord(0.9, 0), 1.0);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let p = PiecewisePath::new(
            2,
            1.0,
            vec![0.0, 0.1 + 0.2, std::f64::consts::FRAC_1_SQRT_2],
            vec![0.1, -0.3, 1.0 / 3.0, 2.0f64.sqrt(), -1e-17, 6.02214076e23],
            InterpMode::PiecewiseLinear,
        )
        .unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = PiecewisePath::read_csv(&buf[..], InterpMode::PiecewiseLinear, 1.0).unwrap();
        assert_eq!(p.times(), q.times());
        assert_eq!(p.knot_values(), q.knot_values());
    }
}
