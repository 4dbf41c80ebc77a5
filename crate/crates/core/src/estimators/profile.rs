use nalgebra::{DMatrix, DVector};

use super::{evaluate, EstimatorConfig, MemberId, SampleSummary};
use crate::error::{Error, Result};

/// Derivatives of a member at the expansion point `(mu0, e)`.
///
/// `d` and `h` are the `u`-gradient and `u`-Hessian divided by `mu0`; `c` is
/// the cross-partial `d^2 g / (d y_bar d u)`, which needs no normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeProfile {
    pub d: DVector<f64>,
    pub h: DMatrix<f64>,
    pub c: DVector<f64>,
}

impl DerivativeProfile {
    pub fn zero(p: usize) -> Self {
        DerivativeProfile {
            d: DVector::zeros(p),
            h: DMatrix::zeros(p, p),
            c: DVector::zeros(p),
        }
    }

    /// Members of the form `y_bar * f(u)` have `c = d`.
    fn scaled(d: DVector<f64>, h: DMatrix<f64>) -> Self {
        DerivativeProfile { c: d.clone(), d, h }
    }
}

/// Closed-form profile of a member.
///
/// `mu0` and `mu` are needed by M3, M4 (weights scaled by the means) and M18
/// (coefficients on the original scale).
pub fn derivative_profile(
    config: &EstimatorConfig,
    mu0: f64,
    mu: &[f64],
) -> Result<DerivativeProfile> {
    let p = mu.len();
    config.validate(p)?;
    let vec = |s: &[f64]| DVector::from_column_slice(&s[..p]);
    let w = vec_or_empty(config.omega(), p);
    let a = vec_or_empty(config.alpha(), p);
    let t = vec_or_empty(config.theta(), p);
    let outer = |v: &DVector<f64>| v * v.transpose();
    let diag = |v: &DVector<f64>| DMatrix::from_diagonal(v);

    use MemberId::*;
    let profile = match config.id {
        Plain => DerivativeProfile::zero(p),
        M1 => DerivativeProfile::scaled(-&w, diag(&w) * 2.0),
        M2 => DerivativeProfile::scaled(w.clone(), DMatrix::zeros(p, p)),
        M3 | M4 => {
            let s: f64 = w.iter().zip(mu).map(|(w, m)| w * m).sum();
            if s.abs() < 1e-300 {
                return Err(Error::Domain {
                    member: config.id,
                    variate: None,
                    reason: "weighted auxiliary mean is zero",
                });
            }
            let ws = DVector::from_fn(p, |i, _| w[i] * mu[i] / s);
            if config.id == M3 {
                let h = outer(&ws) * 2.0;
                DerivativeProfile::scaled(-ws, h)
            } else {
                DerivativeProfile::scaled(ws, DMatrix::zeros(p, p))
            }
        }
        M5 => DerivativeProfile::scaled(-&w, outer(&w) + diag(&w)),
        M6 => DerivativeProfile::scaled(-&w, outer(&w) * 2.0),
        M7 => DerivativeProfile::scaled(w.clone(), outer(&w) - diag(&w)),
        M8 => DerivativeProfile::scaled(w.clone(), (outer(&w) - diag(&w)) * 2.0),
        M9 => {
            let wt = vec(config.omega());
            DerivativeProfile::scaled(-&wt, diag(&wt) * 2.0)
        }
        M10 => DerivativeProfile::scaled(vec(config.omega()), DMatrix::zeros(p, p)),
        M11 => {
            let q = config.q.unwrap_or(0);
            let d = DVector::from_fn(p, |i, _| if i < q { -w[i] } else { w[i] });
            let hd = DVector::from_fn(p, |i, _| if i < q { 2.0 * w[i] } else { 0.0 });
            DerivativeProfile::scaled(d, diag(&hd))
        }
        M12 | M15 => {
            let e = if config.id == M12 { &a } else { &t };
            DerivativeProfile::scaled(e.clone(), outer(e) - diag(e))
        }
        M13 => {
            // each factor 2 - u^a has slope -a and curvature -a(a - 1)
            let d = -&a;
            let mut h = outer(&a);
            for i in 0..p {
                h[(i, i)] = -a[i] * (a[i] - 1.0);
            }
            DerivativeProfile::scaled(d, h)
        }
        M14 => {
            // u / (1 + a(u - 1)) has slope 1 - a and curvature -2a(1 - a)
            let d = a.map(|a| 1.0 - a);
            let mut h = outer(&d);
            for i in 0..p {
                h[(i, i)] = -2.0 * a[i] * (1.0 - a[i]);
            }
            DerivativeProfile::scaled(d, h)
        }
        M16 => DerivativeProfile::scaled(t.clone(), outer(&t)),
        M17 => {
            let hd = DVector::from_fn(p, |i, _| t[i] * (t[i] / w[i] - 1.0));
            DerivativeProfile::scaled(t.clone(), diag(&hd))
        }
        M18 => DerivativeProfile {
            d: DVector::from_fn(p, |i, _| a[i] * mu[i] / mu0),
            h: DMatrix::zeros(p, p),
            c: DVector::zeros(p),
        },
    };
    Ok(profile)
}

fn vec_or_empty(s: &[f64], p: usize) -> DVector<f64> {
    if s.len() >= p {
        DVector::from_column_slice(&s[..p])
    } else {
        DVector::zeros(p)
    }
}

/// Finite-difference profile of [`evaluate`] around `(mu0, e)`.
///
/// Central differences at steps `h` and `h/2`, combined by one Richardson
/// step. The `y_bar` direction uses the step `h * |mu0|`.
pub fn numeric_profile(
    config: &EstimatorConfig,
    mu0: f64,
    mu: &[f64],
    h: f64,
) -> Result<DerivativeProfile> {
    if !(h > 0.0) {
        return Err(Error::Mismatch(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let p = mu.len();
    config.validate(p)?;
    let g = |dy: f64, du: &[(usize, f64)]| -> Result<f64> {
        let mut x_bar = mu.to_vec();
        for &(i, step) in du {
            x_bar[i] = mu[i] * (1.0 + step);
        }
        let s = SampleSummary {
            y_bar: mu0 + dy * mu0.abs(),
            x_bar,
            n: 2,
        };
        evaluate(config, &s, mu)
    };
    let richardson = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let coarse = f(h)?;
        let fine = f(h / 2.0)?;
        Ok((4.0 * fine - coarse) / 3.0)
    };

    let center = g(0.0, &[])?;
    let mut d = DVector::zeros(p);
    let mut hess = DMatrix::zeros(p, p);
    let mut c = DVector::zeros(p);
    for i in 0..p {
        d[i] = richardson(&|s| Ok((g(0.0, &[(i, s)])? - g(0.0, &[(i, -s)])?) / (2.0 * s)))? / mu0;
        hess[(i, i)] = richardson(&|s| {
            Ok((g(0.0, &[(i, s)])? - 2.0 * center + g(0.0, &[(i, -s)])?) / (s * s))
        })? / mu0;
        for j in 0..i {
            let v = richardson(&|s| {
                let pp = g(0.0, &[(i, s), (j, s)])?;
                let pm = g(0.0, &[(i, s), (j, -s)])?;
                let mp = g(0.0, &[(i, -s), (j, s)])?;
                let mm = g(0.0, &[(i, -s), (j, -s)])?;
                Ok((pp - pm - mp + mm) / (4.0 * s * s))
            })? / mu0;
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
        c[i] = richardson(&|s| {
            let pp = g(s, &[(i, s)])?;
            let pm = g(s, &[(i, -s)])?;
            let mp = g(-s, &[(i, s)])?;
            let mm = g(-s, &[(i, -s)])?;
            Ok((pp - pm - mp + mm) / (4.0 * s * s * mu0.abs()))
        })?;
    }
    Ok(DerivativeProfile { d, h: hess, c })
}
