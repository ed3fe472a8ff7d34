//! Certified test functionals on path space and measurable path sets with
//! computable enlargements.
//!
//! Only functionals with certified sup (and, where applicable, Lipschitz)
//! bounds feed the discrepancy-bound pipelines; uncertified closures are
//! available for exploration but report no certificates.

use crate::error::{Error, Result};
use crate::paths::PiecewisePath;
use crate::stats::{normal_cdf, normal_pdf};
use serde::{Deserialize, Serialize};

/// Anything that can be evaluated on a path; certified bounds are optional.
pub trait PathFunctional: Sync {
    fn eval_path(&self, w: &PiecewisePath) -> Result<f64>;

    /// Certified bound on sup |h|, when available.
    fn sup_bound(&self) -> Option<f64> {
        None
    }

    /// Certified Lipschitz constant w.r.t. the sup norm, when available.
    fn lip_bound(&self) -> Option<f64> {
        None
    }

    /// Times whose point evaluations determine h (empty if h depends on the
    /// whole path, e.g. through a supremum).
    fn required_times(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A closed halfspace `{ u : <normal, u> <= offset }` in R^k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Catalog of certified functionals (all scalar-path, d = 1, except the
/// constant).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Functional {
    /// Constant functional; sup bound |c|, Lipschitz bound 0.
    Constant { value: f64 },
    /// Indicator of `{ sup_{[0,T]} w <= level }` (strict `<` for enlarged
    /// outer sets).
    SupIndicator { level: f64, strict: bool },
    /// Indicator of `{ (w(t_1), .., w(t_k)) in K }` for a convex `K` given as
    /// an intersection of halfspaces.
    FiniteDimIndicator {
        times: Vec<f64>,
        halfspaces: Vec<Halfspace>,
    },
    /// Smooth cylinder functional `prod_i Phi((w(t_i) - center_i)/scale_i)`,
    /// bounded by 1 with Lipschitz bound `phi(0) sum_i 1/scale_i`.
    SmoothCylinder {
        times: Vec<f64>,
        centers: Vec<f64>,
        scales: Vec<f64>,
    },
    /// `clamp(slope (sup w - level), 0, 1)`: bounded by 1 and Lipschitz with
    /// constant `slope` (the running sup is 1-Lipschitz in the sup norm).
    ClampedSupLipschitz { level: f64, slope: f64 },
}

impl Functional {
    pub fn sup_indicator(level: f64) -> Self {
        Functional::SupIndicator {
            level,
            strict: false,
        }
    }

    pub fn smooth_cylinder(times: Vec<f64>, centers: Vec<f64>, scales: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != centers.len() || times.len() != scales.len() {
            return Err(Error::ParameterDomain(
                "cylinder needs equally many times, centers and scales".into(),
            ));
        }
        if scales.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::ParameterDomain(
                "cylinder scales must be positive".into(),
            ));
        }
        Ok(Functional::SmoothCylinder {
            times,
            centers,
            scales,
        })
    }

    pub fn finite_dim(times: Vec<f64>, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if times.is_empty() || halfspaces.is_empty() {
            return Err(Error::ParameterDomain(
                "finite-dimensional set needs times and halfspaces".into(),
            ));
        }
        let k = times.len();
        if halfspaces.iter().any(|h| h.normal.len() != k) {
            return Err(Error::ShapeMismatch(format!(
                "halfspace normals must have length {k}"
            )));
        }
        Ok(Functional::FiniteDimIndicator { times, halfspaces })
    }

    pub fn clamped_sup(level: f64, slope: f64) -> Result<Self> {
        if !(slope > 0.0 && slope <= 1.0) {
            return Err(Error::ParameterDomain(format!(
                "clamped sup slope must lie in (0, 1], got {slope}"
            )));
        }
        Ok(Functional::ClampedSupLipschitz { level, slope })
    }

    fn require_scalar(&self, w: &PiecewisePath) -> Result<()> {
        if w.dim() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "functional is defined for scalar paths, got dimension {}",
                w.dim()
            )));
        }
        Ok(())
    }

    /// Exact directional derivative `Dh(w)[v]` for the smooth cylinder
    /// variant; `None` for non-differentiable variants.
    pub fn directional_derivative(&self, w: &PiecewisePath, v: &PiecewisePath) -> Option<f64> {
        match self {
            Functional::SmoothCylinder {
                times,
                centers,
                scales,
            } => {
                let phis: Vec<f64> = times
                    .iter()
                    .zip(centers.iter().zip(scales.iter()))
                    .map(|(&t, (&c, &s))| normal_cdf((w.eval_coord(t, 0) - c) / s))
                    .collect();
                let mut total = 0.0;
                for (i, &t) in times.iter().enumerate() {
                    let xi = (w.eval_coord(t, 0) - centers[i]) / scales[i];
                    let mut prod = normal_pdf(xi) / scales[i] * v.eval_coord(t, 0);
                    for (j, &phi) in phis.iter().enumerate() {
                        if j != i {
                            prod *= phi;
                        }
                    }
                    total += prod;
                }
                Some(total)
            }
            Functional::Constant { .. } => Some(0.0),
            _ => None,
        }
    }
}

impl PathFunctional for Functional {
    fn eval_path(&self, w: &PiecewisePath) -> Result<f64> {
        match self {
            Functional::Constant { value } => Ok(*value),
            Functional::SupIndicator { level, strict } => {
                self.require_scalar(w)?;
                let s = w.sup_coord(0);
                let inside = if *strict { s < *level } else { s <= *level };
                Ok(if inside { 1.0 } else { 0.0 })
            }
            Functional::FiniteDimIndicator { times, halfspaces } => {
                self.require_scalar(w)?;
                let u: Vec<f64> = times.iter().map(|&t| w.eval_coord(t, 0)).collect();
                let inside = halfspaces.iter().all(|h| {
                    let dot: f64 = h.normal.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
                    dot <= h.offset
                });
                Ok(if inside { 1.0 } else { 0.0 })
            }
            Functional::SmoothCylinder {
                times,
                centers,
                scales,
            } => {
                self.require_scalar(w)?;
                let mut prod = 1.0;
                for (i, &t) in times.iter().enumerate() {
                    prod *= normal_cdf((w.eval_coord(t, 0) - centers[i]) / scales[i]);
                }
                Ok(prod)
            }
            Functional::ClampedSupLipschitz { level, slope } => {
                self.require_scalar(w)?;
                Ok((slope * (w.sup_coord(0) - level)).clamp(0.0, 1.0))
            }
        }
    }

    fn sup_bound(&self) -> Option<f64> {
        Some(match self {
            Functional::Constant { value } => value.abs(),
            _ => 1.0,
        })
    }

    fn lip_bound(&self) -> Option<f64> {
        match self {
            Functional::Constant { .. } => Some(0.0),
            Functional::SupIndicator { .. } | Functional::FiniteDimIndicator { .. } => None,
            Functional::SmoothCylinder { scales, .. } => {
                Some(normal_pdf(0.0) * scales.iter().map(|s| 1.0 / s).sum::<f64>())
            }
            Functional::ClampedSupLipschitz { slope, .. } => Some(*slope),
        }
    }

    fn required_times(&self) -> Vec<f64> {
        match self {
            Functional::FiniteDimIndicator { times, .. }
            | Functional::SmoothCylinder { times, .. } => times.clone(),
            _ => Vec::new(),
        }
    }
}

/// Arbitrary closure functional for exploratory use: evaluable everywhere
/// but certifying nothing, so the bound pipelines reject it.
pub struct UncertifiedFunctional<F: Fn(&PiecewisePath) -> f64 + Sync> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&PiecewisePath) -> f64 + Sync> PathFunctional for UncertifiedFunctional<F> {
    fn eval_path(&self, w: &PiecewisePath) -> Result<f64> {
        Ok((self.f)(w))
    }
}

/// Provenance of a boundary-enlargement constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantProvenance {
    Derived,
    UserSupplied,
}

/// A measurable path set represented by an indicator functional, together
/// with a boundary constant `c'` certifying
/// `P(Z in K^theta \ K^{-theta}) <= c' theta` for the Gaussian target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetK {
    indicator: Functional,
    boundary_constant: Option<f64>,
    provenance: ConstantProvenance,
}

impl SetK {
    /// Wrap an indicator functional; only sup-level and finite-dimensional
    /// indicators describe sets.
    pub fn new(
        indicator: Functional,
        boundary_constant: Option<f64>,
        provenance: ConstantProvenance,
    ) -> Result<Self> {
        match indicator {
            Functional::SupIndicator { .. } | Functional::FiniteDimIndicator { .. } => {}
            _ => {
                return Err(Error::ParameterDomain(
                    "path sets are described by sup-level or finite-dimensional indicators".into(),
                ))
            }
        }
        if let Some(c) = boundary_constant {
            if !(c >= 0.0) {
                return Err(Error::ParameterDomain(format!(
                    "boundary constant must be nonnegative, got {c}"
                )));
            }
        }
        Ok(Self {
            indicator,
            boundary_constant,
            provenance,
        })
    }

    /// Sup-level set `{sup w <= level}` against a standard Brownian target on
    /// [0, horizon]. The running maximum has density at most
    /// `2 / sqrt(2 pi T)`, and the band `(level - theta, level + theta)` has
    /// width `2 theta`, so `c' = 2 * 2/sqrt(2 pi T)` is certified.
    pub fn sup_level_for_brownian(level: f64, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let density_bound = 2.0 / (2.0 * std::f64::consts::PI * horizon).sqrt();
        Self::new(
            Functional::sup_indicator(level),
            Some(2.0 * density_bound),
            ConstantProvenance::Derived,
        )
    }

    /// Sup-level set with a user-supplied boundary constant.
    pub fn sup_level_with_constant(level: f64, c: f64) -> Result<Self> {
        Self::new(
            Functional::sup_indicator(level),
            Some(c),
            ConstantProvenance::UserSupplied,
        )
    }

    pub fn indicator(&self) -> &Functional {
        &self.indicator
    }

    pub fn boundary_constant(&self) -> Option<f64> {
        self.boundary_constant
    }

    pub fn provenance(&self) -> ConstantProvenance {
        self.provenance
    }

    pub fn contains(&self, w: &PiecewisePath) -> Result<bool> {
        Ok(self.indicator.eval_path(w)? > 0.5)
    }
}

/// Outer and inner enlargements of a set.
#[derive(Debug, Clone)]
pub struct EnlargedPair {
    pub outer: SetK,
    pub inner: SetK,
}

/// Enlarge a set by `theta >= 0`.
///
/// Sup-level sets use the 1-Lipschitz property of the running sup: the outer
/// enlargement is contained in `{sup < level + theta}` and the inner one
/// contains `{sup <= level - theta}`. Finite-dimensional sets enlarge the
/// convex body by `theta sqrt(k)`, realized by shifting each halfspace
/// offset by `theta sqrt(k) |normal|`; both directions are one-sided
/// inclusions in the conservative direction.
pub fn enlarge(set: &SetK, theta: f64) -> Result<EnlargedPair> {
    if !(theta >= 0.0) {
        return Err(Error::ParameterDomain(format!(
            "enlargement must be nonnegative, got {theta} (use the inner form instead)"
        )));
    }
    if theta == 0.0 {
        return Ok(EnlargedPair {
            outer: set.clone(),
            inner: set.clone(),
        });
    }
    let (outer_ind, inner_ind) = match set.indicator() {
        Functional::SupIndicator { level, .. } => (
            Functional::SupIndicator {
                level: level + theta,
                strict: true,
            },
            Functional::SupIndicator {
                level: level - theta,
                strict: false,
            },
        ),
        Functional::FiniteDimIndicator { times, halfspaces } => {
            let shift = theta * (times.len() as f64).sqrt();
            let moved = |sign: f64| -> Functional {
                Functional::FiniteDimIndicator {
                    times: times.clone(),
                    halfspaces: halfspaces
                        .iter()
                        .map(|h| {
                            let norm = h.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
                            Halfspace {
                                normal: h.normal.clone(),
                                offset: h.offset + sign * shift * norm,
                            }
                        })
                        .collect(),
                }
            };
            (moved(1.0), moved(-1.0))
        }
        _ => unreachable!("SetK construction restricts the variants"),
    };
    Ok(EnlargedPair {
        outer: SetK {
            indicator: outer_ind,
            boundary_constant: set.boundary_constant,
            provenance: set.provenance,
        },
        inner: SetK {
            indicator: inner_ind,
            boundary_constant: set.boundary_constant,
            provenance: set.provenance,
        },
    })
}

/// Bound `min(1, c' theta)` on `P(Z in K^theta \ K^{-theta})`.
///
/// For sup-level sets without a stored constant the Brownian-target value is
/// derived on the fly; finite-dimensional sets require a supplied constant.
pub fn boundary_enlargement_bound(set: &SetK, theta: f64, horizon: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::ParameterDomain(format!(
            "enlargement must be nonnegative, got {theta}"
        )));
    }
    let c = match set.boundary_constant {
        Some(c) => c,
        None => match set.indicator() {
            Functional::SupIndicator { .. } => {
                if !(horizon > 0.0) {
                    return Err(Error::ParameterDomain("horizon must be positive".into()));
                }
                4.0 / (2.0 * std::f64::consts::PI * horizon).sqrt()
            }
            _ => {
                return Err(Error::MissingConstant(
                    "finite-dimensional boundary constant must be supplied (no nonsingular-covariance certificate is derived)"
                        .into(),
                ))
            }
        },
    };
    Ok((c * theta).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::brownian_running_max_cdf;
    use crate::paths::InterpMode;
    use crate::rng::sample_stream;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn random_step_path(seed: u64, horizon: f64) -> PiecewisePath {
        let mut rng = sample_stream(901, seed);
        let m = 2 + (rng.random::<u64>() % 6) as usize;
        let mut times = vec![0.0];
        for _ in 1..m {
            times.push(rng.random::<f64>() * horizon);
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        let values: Vec<f64> = (0..times.len())
            .map(|_| rng.random::<f64>() * 4.0 - 2.0)
            .collect();
        PiecewisePath::new(1, horizon, times, values, InterpMode::StepRightContinuous).unwrap()
    }

    #[test]
    fn sup_indicator_examples() {
        let h = Functional::sup_indicator(1.0);
        let low = PiecewisePath::constant(1, 1.0, &[0.5]).unwrap();
        assert_eq!(h.eval_path(&low).unwrap(), 1.0);
        let high = PiecewisePath::scalar_step(1.0, &[(0.0, 0.0), (0.5, 1.5)]).unwrap();
        assert_eq!(h.eval_path(&high).unwrap(), 0.0);
    }

    #[test]
    fn clamped_sup_saturates() {
        let h = Functional::clamped_sup(0.0, 1.0).unwrap();
        let ramp = PiecewisePath::scalar_linear(1.0, &[(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert_eq!(h.eval_path(&ramp).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_a_shape_error() {
        let h = Functional::sup_indicator(1.0);
        let w = PiecewisePath::constant(2, 1.0, &[0.0, 0.0]).unwrap();
        assert!(matches!(h.eval_path(&w), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn enlarge_sup_level_shifts_levels() {
        let k = SetK::sup_level_for_brownian(1.0, 1.0).unwrap();
        let pair = enlarge(&k, 0.2).unwrap();
        match pair.outer.indicator() {
            Functional::SupIndicator { level, strict } => {
                assert_relative_eq!(*level, 1.2);
                assert!(*strict);
            }
            _ => panic!("expected sup indicator"),
        }
        match pair.inner.indicator() {
            Functional::SupIndicator { level, strict } => {
                assert_relative_eq!(*level, 0.8);
                assert!(!*strict);
            }
            _ => panic!("expected sup indicator"),
        }
        let same = enlarge(&k, 0.0).unwrap();
        assert_eq!(
            same.outer
                .indicator()
                .eval_path(&PiecewisePath::constant(1, 1.0, &[0.99]).unwrap())
                .unwrap(),
            1.0
        );
        assert!(enlarge(&k, -0.1).is_err());
    }

    #[test]
    fn enlarge_finite_dim_shifts_offsets_by_theta_sqrt_k() {
        let f = Functional::finite_dim(
            vec![0.2, 0.4, 0.6, 0.8],
            vec![Halfspace {
                normal: vec![1.0, 0.0, 0.0, 0.0],
                offset: 1.0,
            }],
        )
        .unwrap();
        let k = SetK::new(f, Some(0.7), ConstantProvenance::UserSupplied).unwrap();
        let pair = enlarge(&k, 0.1).unwrap();
        match pair.outer.indicator() {
            Functional::FiniteDimIndicator { halfspaces, .. } => {
                assert_relative_eq!(halfspaces[0].offset, 1.2, max_relative = 1e-14);
            }
            _ => panic!("expected finite-dim indicator"),
        }
        match pair.inner.indicator() {
            Functional::FiniteDimIndicator { halfspaces, .. } => {
                assert_relative_eq!(halfspaces[0].offset, 0.8, max_relative = 1e-14);
            }
            _ => panic!("expected finite-dim indicator"),
        }
    }

    #[test]
    fn boundary_bound_examples_and_domination() {
        let k = SetK::sup_level_for_brownian(1.0, 1.0).unwrap();
        let b = boundary_enlargement_bound(&k, 0.1, 1.0).unwrap();
        assert_relative_eq!(
            b,
            0.1 * 4.0 / (2.0 * std::f64::consts::PI).sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(b, 0.15957691216057307, max_relative = 1e-10);
        // dominates the exact band probability from the running-max law
        let exact = brownian_running_max_cdf(1.1, 1.0).unwrap()
            - brownian_running_max_cdf(0.9, 1.0).unwrap();
        assert!(exact < b);
        assert!((exact - 0.09679).abs() < 5e-4);
        assert_eq!(boundary_enlargement_bound(&k, 0.0, 1.0).unwrap(), 0.0);
        let user = SetK::sup_level_with_constant(1.0, 0.5).unwrap();
        assert_relative_eq!(
            boundary_enlargement_bound(&user, 0.3, 1.0).unwrap(),
            0.15,
            max_relative = 1e-14
        );
        // missing constant for finite-dimensional sets is an error
        let f = Functional::finite_dim(
            vec![0.5],
            vec![Halfspace {
                normal: vec![1.0],
                offset: 0.0,
            }],
        )
        .unwrap();
        let kf = SetK::new(f, None, ConstantProvenance::Derived).unwrap();
        assert!(matches!(
            boundary_enlargement_bound(&kf, 0.1, 1.0),
            Err(Error::MissingConstant(_))
        ));
    }

    #[test]
    fn enlargement_indicators_are_monotone_on_random_paths() {
        let k = SetK::sup_level_for_brownian(0.5, 1.0).unwrap();
        let pair = enlarge(&k, 0.17).unwrap();
        for seed in 0..200 {
            let w = random_step_path(seed, 1.0);
            let inner = pair.inner.indicator().eval_path(&w).unwrap();
            let base = k.indicator().eval_path(&w).unwrap();
            let outer = pair.outer.indicator().eval_path(&w).unwrap();
            assert!(
                inner <= base && base <= outer,
                "monotonicity failed at seed {seed}"
            );
        }
    }

    #[test]
    fn certified_sup_bound_holds_on_random_paths() {
        let fs = [
            Functional::sup_indicator(0.3),
            Functional::clamped_sup(0.1, 0.8).unwrap(),
            Functional::smooth_cylinder(vec![0.25, 0.75], vec![0.0, 0.1], vec![0.5, 1.0]).unwrap(),
        ];
        for f in &fs {
            let bound = f.sup_bound().unwrap();
            for seed in 0..100 {
                let w = random_step_path(7000 + seed, 1.0);
                assert!(f.eval_path(&w).unwrap().abs() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn certified_lipschitz_bound_holds_on_random_paths() {
        let fs = [
            Functional::clamped_sup(0.0, 1.0).unwrap(),
            Functional::smooth_cylinder(vec![0.2, 0.6], vec![0.0, 0.0], vec![1.0, 2.0]).unwrap(),
        ];
        for f in &fs {
            let lip = f.lip_bound().unwrap();
            for seed in 0..100 {
                let w = random_step_path(8100 + seed, 1.0);
                let v = random_step_path(9100 + seed, 1.0).scale(0.3);
                let shifted = w.add(&v).unwrap();
                let dh = (f.eval_path(&shifted).unwrap() - f.eval_path(&w).unwrap()).abs();
                assert!(
                    dh <= lip * v.sup_norm() + 1e-12,
                    "Lipschitz certificate failed at seed {seed}: {dh} > {lip} * {}",
                    v.sup_norm()
                );
            }
        }
    }

    #[test]
    fn cylinder_derivative_matches_finite_differences() {
        let f = Functional::smooth_cylinder(
            vec![0.25, 0.5, 0.9],
            vec![0.0, -0.2, 0.3],
            vec![0.8, 1.1, 0.6],
        )
        .unwrap();
        for seed in 0..20 {
            let w = random_step_path(300 + seed, 1.0);
            let v = random_step_path(400 + seed, 1.0);
            let exact = f.directional_derivative(&w, &v).unwrap();
            let s = 1e-5;
            let plus = f.eval_path(&w.add(&v.scale(s)).unwrap()).unwrap();
            let minus = f.eval_path(&w.add(&v.scale(-s)).unwrap()).unwrap();
            let fd = (plus - minus) / (2.0 * s);
            let scale = exact.abs().max(1e-3);
            assert!(
                (exact - fd).abs() / scale < 1e-6,
                "derivative mismatch at seed {seed}: exact {exact}, fd {fd}"
            );
        }
    }

    #[test]
    fn uncertified_closures_evaluate_but_certify_nothing() {
        let u = UncertifiedFunctional {
            name: "terminal value".into(),
            f: |w: &PiecewisePath| w.eval_coord(w.horizon(), 0),
        };
        let w = PiecewisePath::scalar_step(1.0, &[(0.0, 0.0), (0.5, 2.0)]).unwrap();
        assert_eq!(u.eval_path(&w).unwrap(), 2.0);
        assert!(u.sup_bound().is_none());
        assert!(u.lip_bound().is_none());
    }
}
