//! Test reports and reference-distribution tail probabilities.

use std::fmt::{self, Write as _};

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

/// Reference distribution of a statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reference {
    F { d1: f64, d2: f64 },
    ChiSquared { df: f64 },
    Bootstrap { b: usize },
    None,
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::F { d1, d2 } => write!(f, "F({d1}, {d2})"),
            Reference::ChiSquared { df } => write!(f, "chi2({df})"),
            Reference::Bootstrap { b } => write!(f, "bootstrap(B={b})"),
            Reference::None => write!(f, "none"),
        }
    }
}

/// Upper tail `P(F_{d1,d2} > x)`.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(x.is_finite()) {
        return Err(Error::Argument(format!("F statistic is not finite: {x}")));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    let d = FisherSnedecor::new(d1, d2).map_err(|e| Error::Argument(format!("F({d1}, {d2}): {e}")))?;
    Ok(d.sf(x).clamp(0.0, 1.0))
}

/// Upper tail `P(χ²_k > x)`.
pub fn chi2_sf(x: f64, k: f64) -> Result<f64> {
    if !(x.is_finite()) {
        return Err(Error::Argument(format!("chi-squared statistic is not finite: {x}")));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    let d = ChiSquared::new(k).map_err(|e| Error::Argument(format!("chi2({k}): {e}")))?;
    Ok(d.sf(x).clamp(0.0, 1.0))
}

/// Result of a hypothesis test, with enough metadata to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub test: String,
    pub statistic: f64,
    pub reference: Reference,
    pub p_value: Option<f64>,
    /// Asymptotic chi-squared p-value, where the test has one.
    pub chi2_p_value: Option<f64>,
    /// Named auxiliary quantities (D², T², ranks, thresholds, ...), in insertion order.
    pub details: Vec<(String, f64)>,
    pub warnings: Vec<String>,
    pub flags: Vec<String>,
    pub seed: Option<u64>,
    pub b: Option<usize>,
    pub df_convention: Option<String>,
}

impl TestReport {
    pub fn new(test: impl Into<String>, statistic: f64, reference: Reference) -> Self {
        Self {
            test: test.into(),
            statistic,
            reference,
            p_value: None,
            chi2_p_value: None,
            details: Vec::new(),
            warnings: Vec::new(),
            flags: Vec::new(),
            seed: None,
            b: None,
            df_convention: None,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self
    }

    pub fn detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.push((key.into(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Deterministic plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "test: {}", self.test);
        let _ = writeln!(s, "statistic: {:.6}", self.statistic);
        let _ = writeln!(s, "reference: {}", self.reference);
        if let Some(p) = self.p_value {
            let _ = writeln!(s, "p-value: {p:.6}");
        }
        if let Some(p) = self.chi2_p_value {
            let _ = writeln!(s, "chi2 p-value: {p:.6}");
        }
        for (k, v) in &self.details {
            let _ = writeln!(s, "{k}: {v:.6}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed: {seed}");
        }
        if let Some(b) = self.b {
            let _ = writeln!(s, "B: {b}");
        }
        if let Some(c) = &self.df_convention {
            let _ = writeln!(s, "df convention: {c}");
        }
        for f in &self.flags {
            let _ = writeln!(s, "flag: {f}");
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
