//! Literal transcriptions of the tabulated bias and MSE expressions for each
//! member, written with plain loops over moments recomputed from the spec.

use meerr_core::{EstimatorConfig, MemberId, PopulationSpec};

/// Rows whose printed MSE is known to disagree with the generic expansion.
pub const MSE_DISCREPANT: [usize; 4] = [4, 9, 14, 18];
/// Rows whose printed bias is known to disagree or cannot be evaluated.
pub const BIAS_DISCREPANT: [usize; 4] = [3, 4, 13, 14];
/// Rows covered by the MSE check (row 11 is too garbled to transcribe).
pub const MSE_ROWS: [usize; 17] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 14, 15, 16, 17, 18];

pub struct Moments {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// C_i^2 + C_(i)^2.
    pub cdiag: Vec<f64>,
    pub base: f64,
}

pub fn moments(spec: &PopulationSpec) -> Moments {
    let p = spec.mu.len();
    let mut a = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = if i == j {
                spec.c[i] * spec.c[i] + spec.c_err[i] * spec.c_err[i]
            } else {
                spec.rho[(i, j)] * spec.c[i] * spec.c[j]
            };
        }
    }
    Moments {
        cdiag: (0..p).map(|i| a[i][i]).collect(),
        b: (0..p).map(|i| spec.rho0[i] * spec.c0 * spec.c[i]).collect(),
        base: spec.c0 * spec.c0 + spec.c0_err * spec.c0_err,
        a,
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn quad(a: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in 0..y.len() {
            s += x[i] * a[i][j] * y[j];
        }
    }
    s
}

pub fn member(row: usize) -> MemberId {
    MemberId::ALL[row - 1]
}

/// Printed MSE of `row` at sample size `n`; `None` where nothing is printed
/// in evaluable form.
pub fn literal_mse(
    row: usize,
    spec: &PopulationSpec,
    cfg: &EstimatorConfig,
    n: usize,
) -> Option<f64> {
    let m = moments(spec);
    let p = spec.mu.len();
    let k = spec.mu0 * spec.mu0 / n as f64;
    let a = &m.a;
    let b = &m.b;
    let w = cfg.omega.clone().unwrap_or_default();
    let al = cfg.alpha.clone().unwrap_or_default();
    let th = cfg.theta.clone().unwrap_or_default();
    let wmu = if w.len() >= p {
        dot(&w[..p], &spec.mu)
    } else {
        0.0
    };
    let v = match row {
        1 | 5 | 6 => m.base - 2.0 * dot(b, &w) + quad(a, &w, &w),
        2 | 7 | 8 => m.base + 2.0 * dot(b, &w) + quad(a, &w, &w),
        3 => {
            let ws: Vec<f64> = (0..p).map(|i| w[i] * spec.mu[i]).collect();
            m.base - 2.0 * dot(b, &ws) / wmu + quad(a, &ws, &ws) / (wmu * wmu)
        }
        4 => m.base + 2.0 * dot(b, &w) / wmu + quad(a, &w, &w) / (wmu * wmu),
        9 | 10 => m.base + 2.0 * dot(b, &w[..p]) + quad(a, &w[..p], &w[..p]),
        12 => m.base + 2.0 * dot(b, &al) + quad(a, &al, &al),
        13 | 14 => m.base - 2.0 * dot(b, &al) + quad(a, &al, &al),
        15..=17 => m.base + 2.0 * dot(b, &th) + quad(a, &th, &th),
        18 => {
            let s: Vec<f64> = (0..p).map(|i| al[i] * spec.mu[i]).collect();
            return Some((m.base + 2.0 * spec.mu0 * dot(b, &s) + quad(a, &s, &s)) / n as f64);
        }
        _ => return None,
    };
    Some(k * v)
}

/// Row 4 read with the mean-weighted vector of row 3 in place of the raw weights.
pub fn row4_mean_weighted_mse(spec: &PopulationSpec, cfg: &EstimatorConfig, n: usize) -> f64 {
    let m = moments(spec);
    let w = cfg.omega.as_ref().unwrap();
    let wmu = dot(w, &spec.mu);
    let ws: Vec<f64> = w.iter().zip(&spec.mu).map(|(w, m)| w * m).collect();
    spec.mu0 * spec.mu0 / n as f64
        * (m.base + 2.0 * dot(&m.b, &ws) / wmu + quad(&m.a, &ws, &ws) / (wmu * wmu))
}

/// Printed bias of `row` at sample size `n`; `None` where the printed
/// expression cannot be evaluated.
pub fn literal_bias(
    row: usize,
    spec: &PopulationSpec,
    cfg: &EstimatorConfig,
    n: usize,
) -> Option<f64> {
    let m = moments(spec);
    let p = spec.mu.len();
    let k = spec.mu0 / n as f64;
    let a = &m.a;
    let b = &m.b;
    let c = &m.cdiag;
    let w = cfg.omega.clone().unwrap_or_default();
    let al = cfg.alpha.clone().unwrap_or_default();
    let th = cfg.theta.clone().unwrap_or_default();
    let wmu = if w.len() >= p {
        dot(&w[..p], &spec.mu)
    } else {
        0.0
    };
    let v = match row {
        1 => dot(c, &w) - dot(b, &w),
        2 => dot(b, &w),
        3 => {
            let ws: Vec<f64> = (0..p).map(|i| w[i] * spec.mu[i]).collect();
            quad(a, &ws, &w) / (wmu * wmu) - dot(b, &ws) / wmu
        }
        4 => dot(b, &w) / wmu,
        5 => 0.5 * (quad(a, &w, &w) + dot(c, &w) - 2.0 * dot(b, &w)),
        6 => quad(a, &w, &w) - dot(b, &w),
        7 => 0.5 * (quad(a, &w, &w) - dot(c, &w) + 2.0 * dot(b, &w)),
        8 => quad(a, &w, &w) - dot(c, &w) + dot(b, &w),
        9 => dot(c, &w[..p]) - dot(b, &w[..p]),
        10 => dot(b, &w[..p]),
        12 => 0.5 * (quad(a, &al, &al) - dot(c, &al) + 2.0 * dot(b, &al)),
        13 => 0.5 * (dot(c, &al) - quad(a, &al, &al) - 2.0 * dot(b, &al)),
        15 => 0.5 * (quad(a, &th, &th) - dot(c, &th) + 2.0 * dot(b, &th)),
        16 => 0.5 * (quad(a, &th, &th) + 2.0 * dot(b, &th)),
        17 => {
            let ts: Vec<f64> = (0..p).map(|i| th[i] * (th[i] / w[i] - 1.0)).collect();
            0.5 * (dot(c, &ts) + 2.0 * dot(b, &th))
        }
        18 => 0.0,
        _ => return None,
    };
    Some(k * v)
}

pub fn agrees(literal: f64, generic: f64) -> bool {
    (literal - generic).abs() <= 1e-12 * literal.abs().max(generic.abs()).max(1e-300)
}
