//! Report records and their CSV / JSON emission.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regression::LogLogFit;

use super::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// One rung of a λ-ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderPoint {
    pub lambda: f64,
    pub value: f64,
    pub hs_norm: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|observed − predicted| ≤ tolerance`.
    Within,
    /// `observed ≤ predicted + tolerance`.
    AtMost,
    /// `observed ≥ predicted − tolerance`.
    AtLeast,
}

/// A single asserted quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub predicted: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, predicted: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::Within => (observed - predicted).abs() <= tolerance,
            Comparison::AtMost => observed <= predicted + tolerance,
            Comparison::AtLeast => observed >= predicted - tolerance,
        };
        Self {
            name: name.into(),
            observed,
            predicted,
            tolerance,
            comparison,
            pass,
        }
    }
}

/// A reported number with no asserted target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

/// Raw rows written to the CSV file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn from_ladder(points: &[LadderPoint]) -> Self {
        let mut t = Self::new(&["lambda", "value", "hs_norm", "ratio"]);
        for p in points {
            t.push(vec![fmt(p.lambda), fmt(p.value), opt(p.hs_norm), opt(p.ratio)]);
        }
        t
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Shortest round-trip representation.
pub fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub config: RunConfig,
    pub points: Vec<LadderPoint>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r2: Option<f64>,
    pub predicted_slope: Option<f64>,
    pub tolerance: Option<f64>,
    pub checks: Vec<Check>,
    pub measurements: Vec<Measurement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: config.experiment.clone(),
            config: config.clone(),
            points: Vec::new(),
            slope: None,
            intercept: None,
            r2: None,
            predicted_slope: None,
            tolerance: None,
            checks: Vec::new(),
            measurements: Vec::new(),
            data: None,
            pass: true,
        }
    }

    /// Record the headline fit and its assertion.
    pub fn headline(&mut self, fit: &LogLogFit, predicted: f64, tolerance: f64, comparison: Comparison) {
        self.slope = Some(fit.slope);
        self.intercept = Some(fit.intercept);
        self.r2 = Some(fit.r2);
        self.predicted_slope = Some(predicted);
        self.tolerance = Some(tolerance);
        self.check(Check::new("slope", fit.slope, predicted, tolerance, comparison));
    }

    /// A measured fit with no asserted target.
    pub fn measured(&mut self, fit: &LogLogFit) {
        self.slope = Some(fit.slope);
        self.intercept = Some(fit.intercept);
        self.r2 = Some(fit.r2);
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.push(Measurement {
            name: name.into(),
            value,
        });
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// A finished run: report plus raw table.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub table: Table,
}

impl Outcome {
    /// Write `<out>/<experiment>.csv` and `<out>/<experiment>.json`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let stem = if self.report.experiment.is_empty() {
            "run"
        } else {
            self.report.experiment.as_str()
        };
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        fs::write(&csv_path, self.table.to_csv()?)?;
        fs::write(&json_path, self.report.to_json()? + "\n")?;
        Ok((csv_path, json_path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_compare() {
        assert!(Check::new("a", 0.3, 0.25, 0.1, Comparison::Within).pass);
        assert!(!Check::new("a", 0.4, 0.25, 0.1, Comparison::Within).pass);
        assert!(Check::new("a", -1.0, 0.0, 0.05, Comparison::AtMost).pass);
        assert!(!Check::new("a", 0.1, 0.0, 0.05, Comparison::AtMost).pass);
        assert!(Check::new("a", 0.9, 0.5, 0.05, Comparison::AtLeast).pass);
    }

    #[test]
    fn csv_layout() {
        let pts = [LadderPoint {
            lambda: 16.0,
            value: 0.5,
            hs_norm: None,
            ratio: Some(0.25),
        }];
        let csv = Table::from_ladder(&pts).to_csv().unwrap();
        assert_eq!(csv, "lambda,value,hs_norm,ratio\n16.0,0.5,,0.25\n");
    }

    #[test]
    fn json_fields() {
        let mut r = Report::new(&RunConfig::for_experiment("demo"));
        r.check(Check::new("c", 1.0, 0.0, 0.1, Comparison::Within));
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for k in [
            "schema_version", "experiment", "config", "points", "slope", "intercept", "r2", "predicted_slope",
            "tolerance", "pass",
        ] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["pass"], serde_json::Value::Bool(false));
        assert_eq!(v["config"]["experiment"], "demo");
    }
}
