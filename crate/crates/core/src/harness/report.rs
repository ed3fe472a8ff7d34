//! Validation reports: one row per certified claim, with the inequality
//! side, the empirical side and its confidence interval, and a pass flag.
//! Serialization is deterministic (fixed field order, shortest round-trip
//! float rendering, no timestamps), so reports are byte-identical across
//! runs and worker counts at a fixed seed.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Closed catalog of certified claims a row can reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceTag {
    /// Full norm constant of the smoothed functional.
    SmoothedNormBound,
    /// k-th derivative bound of the smoothed functional.
    SmoothedDerivativeBound,
    /// Cross second-derivative bound in terms of the increment width.
    SecondDerivativeCrossBound,
    /// Second-derivative bound in terms of the gradient energy.
    SecondDerivativeEnergyBound,
    /// Sup bound on the regularization gradient.
    GradientSupBound,
    /// Exact gradient-energy identity for indicator directions.
    RegularizedEnergyIdentity,
    /// Count of partitions into blocks of size at most two.
    PartitionCount,
    /// Stochastic derivative representation of the smoothed functional.
    DerivativeRepresentation,
    /// Covariance form of the second derivative.
    CovarianceRepresentation,
    /// Six-term indicator discrepancy bound.
    IndicatorApproximationBound,
    /// Levy-Prokhorov bound.
    LevyProkhorovBound,
    /// Bounded-Lipschitz discrepancy bound.
    LipschitzApproximationBound,
    /// Dyadic chaining tail envelope.
    ChainingTailBound,
    /// Mixing partial-sum tail envelope.
    MixingTailBound,
    /// I.i.d. partial-sum tail envelope.
    PartialSumTailBound,
    /// Gaussian regularization tail envelope.
    GaussianRegularizationTail,
    /// Brownian sup-norm tail bound.
    BrownianSupTail,
    /// Law of the Brownian running maximum.
    BrownianMaxLaw,
    /// Boundary-enlargement probability bound.
    BoundaryEnlargement,
    /// Closed-form convergence-rate parameters and exponents.
    ConvergenceRate,
    /// Operation-coverage assertion of the suite itself.
    Coverage,
}

/// One validated claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub quantity: String,
    pub reference: ReferenceTag,
    pub bound: Option<f64>,
    pub empirical: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    /// For domination rows: bound minus the upper confidence limit.
    pub margin: Option<f64>,
    pub pass: bool,
    pub note: String,
}

impl ReportRow {
    /// Domination row: passes iff the bound covers the upper confidence
    /// limit of the empirical estimate.
    pub fn domination(
        experiment: impl Into<String>,
        quantity: impl Into<String>,
        reference: ReferenceTag,
        bound: f64,
        empirical: f64,
        ci: (f64, f64),
        note: impl Into<String>,
    ) -> Self {
        let pass = bound >= ci.1;
        let mut note = note.into();
        if bound > 1.0 {
            if !note.is_empty() {
                note.push_str("; ");
            }
            note.push_str("vacuous (bound exceeds 1)");
        }
        ReportRow {
            experiment: experiment.into(),
            quantity: quantity.into(),
            reference,
            bound: Some(bound),
            empirical: Some(empirical),
            ci_lo: Some(ci.0),
            ci_hi: Some(ci.1),
            margin: Some(bound - ci.1),
            pass,
            note,
        }
    }

    /// Two-sided statistical agreement: passes iff |got - want| is within
    /// the stated margin (typically three standard errors).
    pub fn agreement(
        experiment: impl Into<String>,
        quantity: impl Into<String>,
        reference: ReferenceTag,
        want: f64,
        got: f64,
        margin: f64,
        note: impl Into<String>,
    ) -> Self {
        let dev = (got - want).abs();
        ReportRow {
            experiment: experiment.into(),
            quantity: quantity.into(),
            reference,
            bound: Some(want),
            empirical: Some(got),
            ci_lo: Some(got - margin),
            ci_hi: Some(got + margin),
            margin: Some(margin - dev),
            pass: dev <= margin,
            note: note.into(),
        }
    }

    /// Exact check: passes iff |got - want| <= tol * max(|want|, 1).
    pub fn exact(
        experiment: impl Into<String>,
        quantity: impl Into<String>,
        reference: ReferenceTag,
        want: f64,
        got: f64,
        tol: f64,
        note: impl Into<String>,
    ) -> Self {
        let err = (got - want).abs();
        let pass = err <= tol * want.abs().max(1.0);
        ReportRow {
            experiment: experiment.into(),
            quantity: quantity.into(),
            reference,
            bound: Some(want),
            empirical: Some(got),
            ci_lo: None,
            ci_hi: None,
            margin: Some(tol * want.abs().max(1.0) - err),
            pass,
            note: note.into(),
        }
    }

    /// Boolean check with free-form evidence.
    pub fn check(
        experiment: impl Into<String>,
        quantity: impl Into<String>,
        reference: ReferenceTag,
        pass: bool,
        note: impl Into<String>,
    ) -> Self {
        ReportRow {
            experiment: experiment.into(),
            quantity: quantity.into(),
            reference,
            bound: None,
            empirical: None,
            ci_lo: None,
            ci_hi: None,
            margin: None,
            pass,
            note: note.into(),
        }
    }
}

/// A full suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub budget_scale: f64,
    pub passed: usize,
    pub failed: usize,
    pub rows: Vec<ReportRow>,
    /// Operations exercised by the suite (sorted, deduplicated).
    pub coverage: Vec<String>,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: u64, budget_scale: f64) -> Self {
        Report {
            suite: suite.into(),
            seed,
            budget_scale,
            passed: 0,
            failed: 0,
            rows: Vec::new(),
            coverage: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        if row.pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Report) {
        for row in other.rows {
            self.push(row);
        }
        self.coverage.extend(other.coverage);
        self.coverage.sort();
        self.coverage.dedup();
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn mark(&mut self, op: &str) {
        if !self.coverage.iter().any(|c| c.as_str() == op) {
            self.coverage.push(op.to_string());
            self.coverage.sort();
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// rows.csv: one line per claim, shortest round-trip floats.
    pub fn write_rows_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "experiment,quantity,reference,bound,empirical,ci_lo,ci_hi,margin,pass,note"
        )?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
            let tag = serde_json::to_string(&r.reference)?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                csv_escape(&r.experiment),
                csv_escape(&r.quantity),
                tag.trim_matches('"'),
                opt(r.bound),
                opt(r.empirical),
                opt(r.ci_lo),
                opt(r.ci_hi),
                opt(r.margin),
                r.pass,
                csv_escape(&r.note),
            )?;
        }
        Ok(())
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domination_row_flags_vacuous_bounds() {
        let r = ReportRow::domination(
            "x",
            "q",
            ReferenceTag::BrownianSupTail,
            1.7,
            0.3,
            (0.25, 0.35),
            "",
        );
        assert!(r.pass);
        assert!(r.note.contains("vacuous"));
        let fail = ReportRow::domination(
            "x",
            "q",
            ReferenceTag::BrownianSupTail,
            0.3,
            0.35,
            (0.3, 0.4),
            "",
        );
        assert!(!fail.pass);
    }

    #[test]
    fn report_counts_and_csv_shape() {
        let mut rep = Report::new("demo", 7, 1.0);
        rep.push(ReportRow::check(
            "a",
            "q1",
            ReferenceTag::Coverage,
            true,
            "note, with comma",
        ));
        rep.push(ReportRow::exact(
            "b",
            "q2",
            ReferenceTag::ConvergenceRate,
            1.0,
            1.0,
            1e-12,
            "",
        ));
        assert_eq!(rep.passed, 2);
        assert!(rep.all_pass());
        let mut buf = Vec::new();
        rep.write_rows_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("\"note, with comma\""));
    }
}
