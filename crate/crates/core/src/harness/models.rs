//! Process models for the experiments: normalized partial sums of i.i.d.
//! innovations and of a bounded-innovation autoregression.

use crate::error::{Error, Result};
use crate::paths::{InterpMode, PiecewisePath};
use crate::rng::sample_stream;
use crate::tightness::TailEnvelope;
use rand::Rng;
use rand_distr::{Distribution, StudentT};
use serde::{Deserialize, Serialize};

/// Centered, unit-variance innovation laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Innovation {
    /// +-1 with equal probability.
    Rademacher,
    /// Uniform on [-sqrt(3), sqrt(3)].
    CenteredUniform,
    /// Exp(1) - 1.
    CenteredExponential,
    /// Student t scaled to unit variance; needs nu > 2 (and nu > p for the
    /// p-th moment).
    StudentT { nu: f64 },
}

impl Innovation {
    pub fn validate(&self) -> Result<()> {
        if let Innovation::StudentT { nu } = self {
            if !(*nu > 2.0) {
                return Err(Error::ParameterDomain(format!(
                    "Student t needs nu > 2 for unit variance, got {nu}"
                )));
            }
        }
        Ok(())
    }

    /// `E |W|^p`, exact where a closed form exists, else by quadrature.
    pub fn abs_moment(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "moment order must be positive, got {p}"
            )));
        }
        match self {
            Innovation::Rademacher => Ok(1.0),
            Innovation::CenteredUniform => Ok(3f64.powf(p / 2.0) / (p + 1.0)),
            Innovation::CenteredExponential => {
                // E|E - 1|^p = e^{-1} Gamma(p+1) + int_0^1 u^p e^{u-1} du
                let tail = libm::tgamma(p + 1.0) * (-1.0f64).exp();
                let steps = 20_000;
                let h = 1.0 / steps as f64;
                let f = |u: f64| u.powf(p) * (u - 1.0).exp();
                let mut acc = 0.0;
                for i in 0..steps {
                    let a = i as f64 * h;
                    acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
                }
                Ok(tail + acc)
            }
            Innovation::StudentT { nu } => {
                if !(*nu > p) {
                    return Err(Error::ParameterDomain(format!(
                        "Student t moment of order {p} needs nu > p, got nu = {nu}"
                    )));
                }
                // scaled variable sqrt((nu-2)/nu) T_nu
                let log_m = (p / 2.0) * (nu - 2.0).ln()
                    + libm::lgamma((p + 1.0) / 2.0)
                    + libm::lgamma((nu - p) / 2.0)
                    - 0.5 * std::f64::consts::PI.ln()
                    - libm::lgamma(nu / 2.0);
                Ok(log_m.exp())
            }
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Innovation::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Innovation::CenteredUniform => (2.0 * rng.random::<f64>() - 1.0) * 3f64.sqrt(),
            Innovation::CenteredExponential => -(1.0 - rng.random::<f64>()).ln() - 1.0,
            Innovation::StudentT { nu } => {
                let t = StudentT::new(*nu).expect("validated").sample(rng);
                t * ((nu - 2.0) / nu).sqrt()
            }
        }
    }
}

/// Cadlag processes whose approximation by Brownian motion is under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessModel {
    /// `X_n(s) = n^{-1/2} sum_{i <= floor(ns)} W_i` with i.i.d. innovations.
    IidPartialSum { distribution: Innovation, n: u64 },
    /// Same normalization over the bounded-innovation autoregression
    /// `X_j = rho X_{j-1} + sqrt(1 - rho^2) xi_j` with Rademacher `xi`.
    /// The strong-mixing certificate `(mixing_scale, mixing_rate)` is
    /// supplied, not derived; the shipped default `(1, 3)` is a documented
    /// conservative choice for `rho <= 0.3`.
    MixingSum {
        rho: f64,
        n: u64,
        mixing_scale: f64,
        mixing_rate: f64,
    },
}

impl ProcessModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessModel::IidPartialSum { distribution, n } => {
                if *n == 0 {
                    return Err(Error::ParameterDomain("need n >= 1 increments".into()));
                }
                distribution.validate()
            }
            ProcessModel::MixingSum {
                rho,
                n,
                mixing_scale,
                mixing_rate,
            } => {
                if *n == 0 {
                    return Err(Error::ParameterDomain("need n >= 1 increments".into()));
                }
                if !(rho.abs() < 1.0) {
                    return Err(Error::ParameterDomain(format!(
                        "autoregression coefficient must satisfy |rho| < 1, got {rho}"
                    )));
                }
                if !(*mixing_scale > 0.0 && *mixing_rate > 0.0) {
                    return Err(Error::ParameterDomain(
                        "mixing certificate must be positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            ProcessModel::IidPartialSum { n, .. } | ProcessModel::MixingSum { n, .. } => *n,
        }
    }

    /// Knot times `0, 1/n, ..., floor(nT)/n` of the normalized partial sum.
    pub fn knot_times(&self, horizon: f64) -> Vec<f64> {
        let n = self.n();
        let m = (n as f64 * horizon).floor() as u64;
        (0..=m).map(|j| j as f64 / n as f64).collect()
    }

    /// Fill the knot values (one per knot time) for sample `index`.
    pub fn sample_values_into(&self, seed: u64, index: u64, values: &mut [f64]) {
        let mut rng = sample_stream(seed, index);
        let scale = 1.0 / (self.n() as f64).sqrt();
        values[0] = 0.0;
        match self {
            ProcessModel::IidPartialSum { distribution, .. } => match distribution {
                // Rademacher signs come 64 per draw; the bit order is part of
                // the determinism contract.
                Innovation::Rademacher => {
                    let mut sum = 0.0;
                    let mut bits = 0u64;
                    for (j, v) in values.iter_mut().enumerate().skip(1) {
                        let r = (j - 1) % 64;
                        if r == 0 {
                            bits = rng.random::<u64>();
                        }
                        sum += if (bits >> r) & 1 == 1 { 1.0 } else { -1.0 };
                        *v = sum * scale;
                    }
                }
                _ => {
                    let mut sum = 0.0;
                    for v in values.iter_mut().skip(1) {
                        sum += distribution.sample(&mut rng);
                        *v = sum * scale;
                    }
                }
            },
            ProcessModel::MixingSum { rho, .. } => {
                let noise = (1.0 - rho * rho).sqrt();
                let mut x = 0.0;
                let mut first = true;
                let mut sum = 0.0;
                for v in values.iter_mut().skip(1) {
                    let xi = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    x = if first {
                        first = false;
                        xi
                    } else {
                        rho * x + noise * xi
                    };
                    sum += x;
                    *v = sum * scale;
                }
            }
        }
    }

    /// Exact step-mode path of sample `index`.
    pub fn sample_path(&self, horizon: f64, seed: u64, index: u64) -> PiecewisePath {
        let times = self.knot_times(horizon);
        let mut values = vec![0.0; times.len()];
        self.sample_values_into(seed, index, &mut values);
        PiecewisePath::from_parts_unchecked(
            1,
            horizon,
            times,
            values,
            InterpMode::StepRightContinuous,
        )
    }

    /// Tail envelope for `P(||X_eps - X|| >= theta)` at moment order `p`.
    pub fn regularization_tail(&self, p: f64, horizon: f64) -> Result<TailEnvelope> {
        match self {
            ProcessModel::IidPartialSum { distribution, n } => Ok(TailEnvelope::IidPartialSum {
                p,
                abs_moment: distribution.abs_moment(p)?,
                n: *n,
                horizon,
                rosenthal_constant: None,
            }),
            ProcessModel::MixingSum {
                rho,
                n,
                mixing_scale,
                mixing_rate,
            } => {
                // Bounded chain: |X_j| <= sqrt((1+rho)/(1-rho)) certifies c_p.
                let c_p = ((1.0 + rho.abs()) / (1.0 - rho.abs())).sqrt();
                Ok(TailEnvelope::Mixing {
                    p,
                    c_p,
                    k: *mixing_scale,
                    b: *mixing_rate,
                    n: *n,
                    horizon,
                })
            }
        }
    }
}

/// Normalized partial-sum path of the model (the exported operation).
pub fn simulate_partial_sum(
    model: &ProcessModel,
    horizon: f64,
    seed: u64,
    index: u64,
) -> Result<PiecewisePath> {
    model.validate()?;
    if !(horizon >= 1.0) {
        return Err(Error::ParameterDomain(format!(
            "horizon must be >= 1, got {horizon}"
        )));
    }
    Ok(model.sample_path(horizon, seed, index))
}
