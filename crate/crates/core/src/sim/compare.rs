use super::EmpiricalStats;
use crate::error::{Error, Result};
use crate::theory::TheoryResult;

pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub n: usize,
    pub mse_theory: f64,
    pub mse_empirical: f64,
    pub mse_se: f64,
    pub z_mse: f64,
    pub bias_theory: f64,
    pub bias_empirical: f64,
    pub bias_se: f64,
    pub z_bias: f64,
    pub unstable: bool,
    pub pass: bool,
}

impl ComparisonRow {
    pub fn n_bias_theory(&self) -> f64 {
        self.bias_theory * self.n as f64
    }

    pub fn n_bias_empirical(&self) -> f64 {
        self.bias_empirical * self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub z_threshold: f64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn z_score(empirical: f64, theory: f64, se: f64) -> f64 {
    let diff = empirical - theory;
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else if diff.is_nan() || se.is_nan() {
        f64::NAN
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// z-scores of empirical minus theoretical MSE and bias, row by row.
///
/// A row passes when both `|z|` are within `z_threshold` and the row is not
/// flagged unstable.
pub fn compare_theory(
    stats: &EmpiricalStats,
    theory: &[TheoryResult],
    z_threshold: f64,
) -> Result<ComparisonReport> {
    if stats.rows.len() != theory.len() {
        return Err(Error::Mismatch(format!(
            "{} empirical rows against {} theory rows",
            stats.rows.len(),
            theory.len()
        )));
    }
    if !(z_threshold > 0.0) {
        return Err(Error::Mismatch(format!(
            "z threshold must be positive, got {z_threshold}"
        )));
    }
    let mut rows = Vec::with_capacity(theory.len());
    for (e, t) in stats.rows.iter().zip(theory) {
        if t.n != stats.n {
            return Err(Error::Mismatch(format!(
                "theory for {} uses n = {}, simulation n = {}",
                e.label, t.n, stats.n
            )));
        }
        let z_mse = z_score(e.mse, t.mse, e.mse_se);
        let z_bias = z_score(e.bias, t.bias, e.bias_se);
        let pass = !e.unstable && z_mse.abs() <= z_threshold && z_bias.abs() <= z_threshold;
        rows.push(ComparisonRow {
            label: e.label.clone(),
            n: stats.n,
            mse_theory: t.mse,
            mse_empirical: e.mse,
            mse_se: e.mse_se,
            z_mse,
            bias_theory: t.bias,
            bias_empirical: e.bias,
            bias_se: e.bias_se,
            z_bias,
            unstable: e.unstable,
            pass,
        });
    }
    Ok(ComparisonReport { z_threshold, rows })
}
