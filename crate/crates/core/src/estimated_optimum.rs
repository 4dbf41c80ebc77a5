//! The optimum difference-type estimator with its unknown constants replaced
//! by sample moments.
//!
//! The realization is `g**(y_bar, u, phi) = y_bar - y_bar * phi'(u - e)`: at
//! `(mu0, e, phi)` it equals `mu0`, has unit `y_bar`-slope, `u`-gradient
//! `-mu0 phi` and zero `phi`-gradient, so plugging in a consistent `phi_hat`
//! leaves the first-order MSE at the family minimum.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{compensated_sum, solve_spd};
use crate::sim::{Evaluator, ObservedSample};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimates {
    pub a_hat: DMatrix<f64>,
    pub b_hat: DVector<f64>,
    pub mu0_hat: f64,
    /// `A_hat^{-1} b_hat`; `None` when `A_hat` is singular.
    pub phi_hat: Option<DVector<f64>>,
}

/// Sample analogues of `A` and `b` (covariances with divisor `n - 1`).
///
/// Observed auxiliary variances include the error variance, exactly as the
/// diagonal of `A` does.
pub fn estimate_moments(sample: &ObservedSample, mu: &[f64]) -> Result<MomentEstimates> {
    let n = sample.n();
    let p = sample.p();
    if n < 3 {
        return Err(Error::DegenerateSample(format!("n = {n} below 3")));
    }
    if p != mu.len() || sample.x.iter().any(|c| c.len() != n) {
        return Err(Error::Mismatch(
            "sample shape does not match the auxiliary means".into(),
        ));
    }
    let nf = n as f64;
    let centered = |col: &[f64]| -> (f64, Vec<f64>) {
        let mean = compensated_sum(col.iter().copied()) / nf;
        (mean, col.iter().map(|v| v - mean).collect())
    };
    let (y_bar, yc) = centered(&sample.y);
    let xs: Vec<(f64, Vec<f64>)> = sample.x.iter().map(|c| centered(c)).collect();
    let cov =
        |a: &[f64], b: &[f64]| compensated_sum(a.iter().zip(b).map(|(x, y)| x * y)) / (nf - 1.0);

    if cov(&yc, &yc) <= 0.0 {
        return Err(Error::DegenerateSample(
            "study variable has zero variance".into(),
        ));
    }
    for (i, (_, xc)) in xs.iter().enumerate() {
        if cov(xc, xc) <= 0.0 {
            return Err(Error::DegenerateSample(format!(
                "auxiliary {} has zero variance",
                i + 1
            )));
        }
    }
    if y_bar.abs() < 1e-300 {
        return Err(Error::DegenerateSample("study mean is zero".into()));
    }
    let a_hat = DMatrix::from_fn(p, p, |i, j| cov(&xs[i].1, &xs[j].1) / (mu[i] * mu[j]));
    let b_hat = DVector::from_fn(p, |i, _| cov(&yc, &xs[i].1) / (y_bar * mu[i]));
    let phi_hat = solve_spd(&a_hat, &b_hat, "A_hat").ok();
    Ok(MomentEstimates {
        a_hat,
        b_hat,
        mu0_hat: y_bar,
        phi_hat,
    })
}

/// `g**(y_bar, u, phi)`.
pub fn plug_in_value(y_bar: f64, u: &[f64], phi: &[f64]) -> f64 {
    let lin: f64 = phi.iter().zip(u).map(|(f, u)| f * (u - 1.0)).sum();
    y_bar - y_bar * lin
}

pub fn estimated_optimum_estimate(sample: &ObservedSample, mu: &[f64]) -> Result<f64> {
    let est = estimate_moments(sample, mu)?;
    let phi = est.phi_hat.ok_or(Error::Singular("A_hat"))?;
    let summary = sample.summary();
    let u = summary.ratios(mu);
    Ok(plug_in_value(summary.y_bar, &u, phi.as_slice()))
}

/// Monte Carlo evaluator for the estimated-optimum estimator.
pub fn estimated_optimum_evaluator(mu: &[f64]) -> Evaluator<'static> {
    let mu = mu.to_vec();
    Evaluator::new("EST_OPT", move |s: &ObservedSample| {
        estimated_optimum_estimate(s, &mu)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: &[[f64; 3]]) -> ObservedSample {
        ObservedSample {
            y: rows.iter().map(|r| r[0]).collect(),
            x: vec![
                rows.iter().map(|r| r[1]).collect(),
                rows.iter().map(|r| r[2]).collect(),
            ],
        }
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let s = sample(&[[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]);
        assert!(matches!(
            estimate_moments(&s, &[2.0, 3.0]),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn too_small_sample() {
        let s = sample(&[[1.0, 2.0, 3.0], [2.0, 1.0, 3.5]]);
        assert!(estimate_moments(&s, &[2.0, 3.0]).is_err());
    }

    #[test]
    fn moments_by_hand() {
        // y = (1, 2, 3), x1 = (1, 3, 2), x2 = (2, 2, 5)
        let s = sample(&[[1.0, 1.0, 2.0], [2.0, 3.0, 2.0], [3.0, 2.0, 5.0]]);
        let m = estimate_moments(&s, &[2.0, 4.0]).unwrap();
        // s_x1x1 = 1, s_x2x2 = 3, s_x1x2 = 0, s_yx1 = 0.5, s_yx2 = 1.5
        assert!((m.a_hat[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((m.a_hat[(1, 1)] - 3.0 / 16.0).abs() < 1e-15);
        assert!(m.a_hat[(0, 1)].abs() < 1e-15);
        assert!((m.b_hat[0] - 0.5 / 4.0).abs() < 1e-15);
        assert!((m.b_hat[1] - 1.5 / 8.0).abs() < 1e-15);
        assert_eq!(m.mu0_hat, 2.0);
        let phi = m.phi_hat.unwrap();
        assert!((phi[0] - 0.5).abs() < 1e-14);
        assert!((phi[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn calibrated_at_known_means() {
        assert_eq!(plug_in_value(7.0, &[1.0, 1.0], &[3.0, -2.0]), 7.0);
        assert_eq!(plug_in_value(7.0, &[1.3, 0.2], &[0.0, 0.0]), 7.0);
    }

    #[test]
    fn uncorrelated_sample_returns_plain_mean() {
        // y is orthogonal to both centered auxiliaries
        let s = sample(&[
            [1.0, 1.0, 1.0],
            [3.0, 1.0, 3.0],
            [1.0, 3.0, 3.0],
            [3.0, 3.0, 1.0],
        ]);
        let mu = [1.5, 2.5];
        let m = estimate_moments(&s, &mu).unwrap();
        assert!(m.phi_hat.unwrap().abs().max() < 1e-15);
        let v = estimated_optimum_estimate(&s, &mu).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }
}
