//! Versioned JSON experiment configuration (`"schema": 1`).

use super::models::ProcessModel;
use crate::bounds::{Objective, SearchBox, SearchBudget};
use crate::error::{Error, Result};
use crate::functionals::{ConstantProvenance, Functional, Halfspace, SetK};
use crate::paths::PiecewisePath;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Smooth-test-function constants: fixed values, or the order-only family
/// `kappa_i = c T n^{-1/2}` when only the asymptotic order is certified.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum KappaSpec {
    Fixed { kappa1: f64, kappa2: f64 },
    OrderOnly { c: f64 },
}

impl KappaSpec {
    /// Resolve to concrete constants; the note records the provenance.
    pub fn resolve(&self, n: u64, horizon: f64) -> Result<(f64, f64, String)> {
        match self {
            KappaSpec::Fixed { kappa1, kappa2 } => {
                if !(*kappa1 >= 0.0 && *kappa2 >= 0.0) {
                    return Err(Error::Config("kappa constants must be nonnegative".into()));
                }
                Ok((*kappa1, *kappa2, "kappa: fixed".into()))
            }
            KappaSpec::OrderOnly { c } => {
                if !(*c >= 0.0) {
                    return Err(Error::Config("kappa scale must be nonnegative".into()));
                }
                let v = c * horizon / (n as f64).sqrt();
                Ok((v, v, format!("kappa: order-only (c={c})")))
            }
        }
    }
}

impl Default for KappaSpec {
    fn default() -> Self {
        KappaSpec::OrderOnly { c: 1.0 }
    }
}

/// Serializable set descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetConfig {
    /// `{sup w <= level}`; the boundary constant is derived for the Brownian
    /// target when not supplied.
    SupLevel {
        level: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boundary_constant: Option<f64>,
    },
    /// Finite-dimensional convex set; the boundary constant must be supplied.
    FiniteDim {
        times: Vec<f64>,
        halfspaces: Vec<Halfspace>,
        boundary_constant: f64,
    },
}

impl SetConfig {
    pub fn build(&self, horizon: f64) -> Result<SetK> {
        match self {
            SetConfig::SupLevel {
                level,
                boundary_constant,
            } => match boundary_constant {
                Some(c) => SetK::sup_level_with_constant(*level, *c),
                None => SetK::sup_level_for_brownian(*level, horizon),
            },
            SetConfig::FiniteDim {
                times,
                halfspaces,
                boundary_constant,
            } => SetK::new(
                Functional::finite_dim(times.clone(), halfspaces.clone())?,
                Some(*boundary_constant),
                ConstantProvenance::UserSupplied,
            ),
        }
    }
}

/// Monte-Carlo budgets (both at least 100).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Budgets {
    /// Samples for scalar estimates (probabilities, derivatives).
    pub scalar_samples: u64,
    /// Sample paths for path-level tail estimates.
    pub path_samples: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            scalar_samples: 100_000,
            path_samples: 10_000,
        }
    }
}

impl Budgets {
    pub fn validate(&self) -> Result<()> {
        if self.scalar_samples < 100 || self.path_samples < 100 {
            return Err(Error::Config("budgets must be at least 100".into()));
        }
        Ok(())
    }

    /// Scale both budgets, flooring at the 100-sample minimum.
    pub fn scaled(&self, factor: f64) -> Budgets {
        let scale = |v: u64| (((v as f64) * factor).round() as u64).max(100);
        Budgets {
            scalar_samples: scale(self.scalar_samples),
            path_samples: scale(self.path_samples),
        }
    }
}

/// Fixed bound parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundParams {
    pub epsilon: f64,
    pub delta: f64,
    pub theta: f64,
    pub gamma: f64,
}

/// Optimizer request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeConfig {
    #[serde(default = "default_objective")]
    pub objective: Objective,
    pub search_box: SearchBox,
    #[serde(default)]
    pub budget: SearchBudget,
}

fn default_objective() -> Objective {
    Objective::Indicator
}

/// Top-level experiment configuration for the `bound`, `optimize` and
/// `simulate` subcommands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    pub model: ProcessModel,
    pub set: SetConfig,
    #[serde(default)]
    pub kappa: KappaSpec,
    /// Moment order used for the partial-sum tail envelope.
    #[serde(default = "default_moment_order")]
    pub moment_order: f64,
    /// Exponent of the Gaussian-target regularization envelope.
    #[serde(default = "default_gaussian_gamma")]
    pub gaussian_gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BoundParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default)]
    pub budgets: Budgets,
}

fn default_horizon() -> f64 {
    1.0
}

fn default_moment_order() -> f64 {
    3.0
}

fn default_gaussian_gamma() -> f64 {
    4.0
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if !(self.horizon >= 1.0) {
            return Err(Error::Config(format!(
                "horizon must be >= 1, got {}",
                self.horizon
            )));
        }
        self.model.validate()?;
        self.budgets.validate()?;
        if self.params.is_none() && self.optimize.is_none() {
            return Err(Error::Config(
                "provide bound parameters, an optimizer request, or both".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Assemble the bound inputs: the model's tail envelope on the X side,
    /// the Brownian-kernel envelope on the Z side, the set with its boundary
    /// constant, resolved smooth-test constants, and the bounded-Lipschitz
    /// data. Returns the inputs and a provenance note for reports.
    pub fn theorem_inputs(&self) -> Result<(crate::bounds::TheoremInputs, String)> {
        self.validate()?;
        let (kappa1, kappa2, note) = self.kappa.resolve(self.model.n(), self.horizon)?;
        let x_tail = self
            .model
            .regularization_tail(self.moment_order, self.horizon)?;
        let z_tail = crate::tightness::TailEnvelope::GaussianRegularization {
            k: 1.0,
            tau: 1.0,
            gamma: self.gaussian_gamma,
            horizon: self.horizon,
        };
        let bm_moment = crate::gaussian::expected_brownian_sup_norm(1)?;
        let inputs = crate::bounds::TheoremInputs {
            kappa1,
            kappa2,
            horizon: self.horizon,
            dim: 1,
            x_tail: x_tail.clone(),
            z_tail: z_tail.clone(),
            set: self.set.build(self.horizon)?,
            lipschitz: Some(crate::bounds::LipschitzData {
                x_expectation: crate::bounds::ExpectationEnvelope::FromTail { tail: x_tail },
                z_expectation: crate::bounds::ExpectationEnvelope::FromTail { tail: z_tail },
                bm_sup_moment: bm_moment.value,
                sup_certificate: 1.0,
                lip_certificate: 1.0,
            }),
        };
        Ok((inputs, note))
    }
}

/// Configuration for the `smooth` subcommand: evaluate the smoothing
/// operator or one of its derivative estimators at a fixed base path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothConfig {
    pub schema: u32,
    pub seed: u64,
    pub functional: Functional,
    pub base_path: PiecewisePath,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default)]
    pub directions: Vec<PiecewisePath>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    /// Use the covariance-form estimator for two directions.
    #[serde(default)]
    pub covariance_form: bool,
}

fn default_samples() -> u64 {
    100_000
}

impl SmoothConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.covariance_form && self.directions.len() != 2 {
            return Err(Error::Config(
                "the covariance-form estimator takes exactly two directions".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SmoothConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
