//! Experiment harness: process models, experiment configuration, validation
//! suites and deterministic reports.

mod config;
mod models;
mod report;
mod validate;

pub use config::{
    BoundParams, Budgets, ExperimentConfig, KappaSpec, OptimizeConfig, SetConfig, SmoothConfig,
    SCHEMA_VERSION,
};
pub use models::{simulate_partial_sum, Innovation, ProcessModel};
pub use report::{ReferenceTag, Report, ReportRow};
pub use validate::{
    empirical_brownian_reg_tail, estimate_set_discrepancy, run_validate, validate_smoothing,
    validate_tails, validate_theorem, Artifacts, DiscrepancyEstimate, Suite, ALL_OPS,
};
