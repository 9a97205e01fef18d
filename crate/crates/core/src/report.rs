//! Experiment reports: per-point records, power-law fits, predictions and
//! pass/fail verdicts. Serializable as JSON and as a flat CSV.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::{fit_power_law, PowerLawFit};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    /// Which measured quantity this row belongs to, e.g. "norm" or "blowup".
    pub quantity: String,
    pub parameter: f64,
    pub measured: f64,
    /// Model value at `parameter`: the predicted power law, anchored by a
    /// least-squares intercept, when the quantity carries a slope claim.
    pub predicted: Option<f64>,
    pub argmax_t: Option<f64>,
}

impl Record {
    pub fn new(quantity: &str, parameter: f64, measured: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            parameter,
            measured,
            predicted: None,
            argmax_t: None,
        }
    }

    pub fn with_argmax(mut self, t: f64) -> Self {
        self.argmax_t = Some(t);
        self
    }

    /// log₂(measured/predicted), or measured − predicted when either side is
    /// not positive.
    pub fn residual(&self) -> Option<f64> {
        self.predicted.map(|p| {
            if p > 0.0 && self.measured > 0.0 {
                (self.measured / p).log2()
            } else {
                self.measured - p
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    /// |measured − predicted| ≤ tolerance.
    Within,
    /// measured ≤ predicted + tolerance.
    AtMost,
    /// measured ≥ predicted − tolerance.
    AtLeast,
}

impl Comparison {
    pub fn holds(self, measured: f64, predicted: f64, tolerance: f64) -> bool {
        if !measured.is_finite() {
            return false;
        }
        match self {
            Comparison::Within => (measured - predicted).abs() <= tolerance,
            Comparison::AtMost => measured <= predicted + tolerance,
            Comparison::AtLeast => measured >= predicted - tolerance,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Comparison::Within => "=",
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimFit {
    pub claim: String,
    pub fit: PowerLawFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    /// Name of the fit this verdict reads its measurement from, if any.
    pub fit: Option<String>,
    pub measured: f64,
    pub predicted: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub config: BTreeMap<String, String>,
    pub records: Vec<Record>,
    pub fits: Vec<ClaimFit>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            config: BTreeMap::new(),
            records: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn echo<V: ToString>(&mut self, key: &str, value: V) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, claim: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.claim == claim)
    }

    pub fn fit(&self, claim: &str) -> Option<&PowerLawFit> {
        self.fits.iter().find(|f| f.claim == claim).map(|f| &f.fit)
    }

    /// (parameter, measured) pairs of one quantity, in insertion order.
    pub fn series(&self, quantity: &str) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| (r.parameter, r.measured))
            .collect()
    }

    /// A verdict on a plain number (identity errors, ratios, coefficients).
    pub fn check(&mut self, claim: &str, measured: f64, predicted: f64, comparison: Comparison, tolerance: f64) -> bool {
        let passed = comparison.holds(measured, predicted, tolerance);
        self.verdicts.push(Verdict {
            claim: claim.to_string(),
            fit: None,
            measured,
            predicted,
            comparison,
            tolerance,
            passed,
        });
        passed
    }

    /// Fits the records of `quantity` to a power law, stores the fit under
    /// `claim`, fills the records' model values from `predicted_slope`, and
    /// records a verdict on the fitted slope.
    pub fn slope_claim(
        &mut self,
        claim: &str,
        quantity: &str,
        predicted_slope: f64,
        comparison: Comparison,
        tolerance: f64,
    ) -> Result<PowerLawFit> {
        let points = self.series(quantity);
        let fit = fit_power_law(&points)?;
        // Intercept of the predicted line through the data, in log₂.
        let anchor = points
            .iter()
            .map(|&(x, y)| y.log2() - predicted_slope * x.log2())
            .sum::<f64>()
            / points.len() as f64;
        for r in self.records.iter_mut().filter(|r| r.quantity == quantity) {
            r.predicted = Some((anchor + predicted_slope * r.parameter.log2()).exp2());
        }
        self.fits.push(ClaimFit {
            claim: claim.to_string(),
            fit: fit.clone(),
        });
        let passed = comparison.holds(fit.slope, predicted_slope, tolerance);
        self.verdicts.push(Verdict {
            claim: claim.to_string(),
            fit: Some(claim.to_string()),
            measured: fit.slope,
            predicted: predicted_slope,
            comparison,
            tolerance,
            passed,
        });
        Ok(fit)
    }

    /// Flat CSV: quantity, parameter, measured, predicted, residual.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| LabError::InvalidInput(format!("csv: {e}"));
        w.write_record(["quantity", "parameter", "measured", "predicted", "residual"])
            .map_err(io)?;
        for r in &self.records {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
            w.write_record([
                r.quantity.clone(),
                format!("{:e}", r.parameter),
                format!("{:e}", r.measured),
                opt(r.predicted),
                opt(r.residual()),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| LabError::InvalidInput(format!("csv: {e}")))?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| LabError::InvalidInput(e.to_string()))
    }

    /// Re-judges every slope verdict with a new tolerance.
    pub fn override_slope_tolerance(&mut self, tolerance: f64) {
        for v in self.verdicts.iter_mut().filter(|v| v.fit.is_some()) {
            v.tolerance = tolerance;
            v.passed = v.comparison.holds(v.measured, v.predicted, tolerance);
        }
    }

    /// Table of claims, failing rows first.
    pub fn render(&self) -> String {
        let mut rows: Vec<&Verdict> = self.verdicts.iter().collect();
        rows.sort_by_key(|v| v.passed);
        let width = rows.iter().map(|v| v.claim.chars().count()).max().unwrap_or(0).max(5);
        let mut out = format!("{} ({} records)\n", self.experiment, self.records.len());
        out.push_str(&format!(
            "{:<width$} {:>12} {:>4} {:>12} {:>10} {:>7}\n",
            "claim", "measured", "", "predicted", "residual", "verdict"
        ));
        for v in rows {
            out.push_str(&format!(
                "{:<width$} {:>12.5} {:>4} {:>12.5} {:>10.3e} {:>7}\n",
                v.claim,
                v.measured,
                v.comparison.symbol(),
                v.predicted,
                v.measured - v.predicted,
                if v.passed { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo");
        r.echo("n", 2);
        for k in 3..8 {
            let x = 2f64.powi(k);
            r.push(Record::new("norm", x, 3.0 * x.powf(0.5)));
        }
        r
    }

    #[test]
    fn slope_claims_fill_predictions() {
        let mut r = sample();
        let fit = r.slope_claim("norm slope", "norm", 0.5, Comparison::Within, 0.1).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(r.passed());
        for rec in &r.records {
            assert!(rec.residual().unwrap().abs() < 1e-12);
        }
        r.check("bound", 2.0, 1.0, Comparison::AtMost, 0.5);
        assert!(!r.passed());
        let text = r.render();
        let first = text.lines().nth(2).unwrap();
        assert!(first.contains("FAIL"), "{text}");
    }

    #[test]
    fn comparisons() {
        assert!(Comparison::Within.holds(1.05, 1.0, 0.1));
        assert!(!Comparison::Within.holds(1.2, 1.0, 0.1));
        assert!(Comparison::AtMost.holds(-5.0, 1.0, 0.0));
        assert!(Comparison::AtLeast.holds(0.95, 1.0, 0.1));
        assert!(!Comparison::AtLeast.holds(f64::NAN, 1.0, 0.1));
    }

    #[test]
    fn csv_is_stable() {
        let mut r = sample();
        r.slope_claim("norm slope", "norm", 0.5, Comparison::Within, 0.1).unwrap();
        let a = r.csv_string().unwrap();
        let b = r.clone().csv_string().unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("quantity,parameter,measured,predicted,residual\n"));
        assert_eq!(a.lines().count(), 6);
    }
}
