use std::io::Write;

use super::Regime;
use crate::spectral::{format_float, GridError};

pub const REPORT_HEADER: [&str; 12] = [
    "q",
    "d",
    "coeffs",
    "experiment",
    "family",
    "size",
    "regime",
    "lhs",
    "rhs",
    "constant",
    "pass",
    "seed",
];

/// One measured inequality `lhs <= C rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub q: u32,
    pub d: usize,
    pub coeffs: String,
    pub experiment: String,
    pub family: String,
    pub size: u64,
    pub regime: Option<Regime>,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub pass: Option<bool>,
    pub seed: Option<u64>,
}

impl BoundReport {
    pub fn new(q: u32, d: usize, coeffs: impl Into<String>, experiment: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            q,
            d,
            coeffs: coeffs.into(),
            experiment: experiment.into(),
            family: String::new(),
            size: 0,
            regime: None,
            lhs,
            rhs,
            constant: lhs / rhs,
            pass: None,
            seed: None,
        }
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = family.into();
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// Marks the row as passing when `constant <= ceiling`.
    pub fn judge(mut self, ceiling: f64) -> Self {
        self.pass = Some(self.constant <= ceiling);
        self
    }

    pub fn record(&self) -> [String; 12] {
        [
            self.q.to_string(),
            self.d.to_string(),
            self.coeffs.clone(),
            self.experiment.clone(),
            self.family.clone(),
            self.size.to_string(),
            self.regime.map(|r| r.label().to_string()).unwrap_or_default(),
            format_float(self.lhs),
            format_float(self.rhs),
            format_float(self.constant),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    pub fn write_csv<W: Write>(reports: &[BoundReport], writer: W) -> Result<(), GridError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(REPORT_HEADER)?;
        for r in reports {
            w.write_record(r.record())?;
        }
        w.flush()?;
        Ok(())
    }
}
