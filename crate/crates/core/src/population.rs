//! Population scenarios: true moments, measurement-error moments and the
//! moment matrices every first-order formula is built from.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{psd_factor, solve_spd};

const SYMMETRY_TOL: f64 = 1e-12;

/// Ground truth of a scenario, expressed through moments only.
///
/// Coefficients of variation are nonnegative; the sign of an association
/// lives in the correlations. Means may be negative but never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    /// True mean of the study variate.
    pub mu0: f64,
    /// True means of the auxiliaries.
    pub mu: Vec<f64>,
    /// Coefficient of variation of the study variate.
    pub c0: f64,
    /// Coefficients of variation of the auxiliaries.
    pub c: Vec<f64>,
    /// Measurement-error CV of the study variate.
    pub c0_err: f64,
    /// Measurement-error CVs of the auxiliaries.
    pub c_err: Vec<f64>,
    /// Correlations between the study variate and each auxiliary.
    pub rho0: Vec<f64>,
    /// Correlations among auxiliaries, `p x p`.
    pub rho: DMatrix<f64>,
}

/// One failed invariant. `field` names the offending spec field, e.g.
/// `rho[0][1]`; it is empty for spec-wide problems.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.field.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

/// Outcome of [`validate_spec`]; `violations` is empty for a valid spec.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(
                self.violations.iter().map(ToString::to_string).collect(),
            ))
        }
    }
}

impl PopulationSpec {
    /// Number of auxiliary variates.
    pub fn p(&self) -> usize {
        self.mu.len()
    }

    /// Standard deviation of the true study values.
    pub fn sigma0(&self) -> f64 {
        self.c0 * self.mu0.abs()
    }

    /// Standard deviations of the true auxiliary values.
    pub fn sigma(&self) -> Vec<f64> {
        self.mu
            .iter()
            .zip(&self.c)
            .map(|(m, c)| c * m.abs())
            .collect()
    }

    /// Standard deviation of the error added to the study variate.
    pub fn sigma0_err(&self) -> f64 {
        self.c0_err * self.mu0.abs()
    }

    /// Standard deviations of the errors added to the auxiliaries.
    pub fn sigma_err(&self) -> Vec<f64> {
        self.mu
            .iter()
            .zip(&self.c_err)
            .map(|(m, c)| c * m.abs())
            .collect()
    }

    /// The same population observed without measurement error.
    pub fn error_free(&self) -> PopulationSpec {
        PopulationSpec {
            c0_err: 0.0,
            c_err: vec![0.0; self.p()],
            ..self.clone()
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        validate_spec(self).into_result()
    }
}

/// Checks every invariant of a [`PopulationSpec`] and lists the violations.
pub fn validate_spec(spec: &PopulationSpec) -> ValidationReport {
    let mut v = Vec::new();
    let push = |v: &mut Vec<Violation>, field: String, message: String| {
        v.push(Violation { field, message })
    };
    let p = spec.p();
    if p == 0 {
        push(
            &mut v,
            "mu".into(),
            "at least one auxiliary variate is required".into(),
        );
    }
    for (name, len) in [
        ("c", spec.c.len()),
        ("c_err", spec.c_err.len()),
        ("rho0", spec.rho0.len()),
    ] {
        if len != p {
            push(&mut v, name.into(), format!("length {len}, expected {p}"));
        }
    }
    if spec.rho.nrows() != p || spec.rho.ncols() != p {
        push(
            &mut v,
            "rho".into(),
            format!(
                "{}x{}, expected {p}x{p}",
                spec.rho.nrows(),
                spec.rho.ncols()
            ),
        );
    }
    if !v.is_empty() {
        return ValidationReport { violations: v };
    }

    if !spec.mu0.is_finite() || spec.mu0 == 0.0 {
        push(&mut v, "mu0".into(), "study mean zero or non-finite".into());
    }
    for (i, m) in spec.mu.iter().enumerate() {
        if !m.is_finite() || *m == 0.0 {
            push(
                &mut v,
                format!("mu[{i}]"),
                "auxiliary mean zero or non-finite".into(),
            );
        }
    }
    let cvs = std::iter::once(("c0".to_string(), spec.c0))
        .chain(std::iter::once(("c0_err".to_string(), spec.c0_err)))
        .chain(
            spec.c
                .iter()
                .enumerate()
                .map(|(i, x)| (format!("c[{i}]"), *x)),
        )
        .chain(
            spec.c_err
                .iter()
                .enumerate()
                .map(|(i, x)| (format!("c_err[{i}]"), *x)),
        );
    for (name, cv) in cvs {
        if !cv.is_finite() || cv < 0.0 {
            push(
                &mut v,
                name,
                "coefficient of variation must be finite and nonnegative".into(),
            );
        }
    }
    for (i, r) in spec.rho0.iter().enumerate() {
        if !r.is_finite() || r.abs() > 1.0 {
            push(
                &mut v,
                format!("rho0[{i}]"),
                "correlation outside [-1, 1]".into(),
            );
        }
    }
    for i in 0..p {
        if spec.rho[(i, i)] != 1.0 {
            push(
                &mut v,
                format!("rho[{i}][{i}]"),
                "diagonal entry must be 1".into(),
            );
        }
        for j in 0..p {
            let r = spec.rho[(i, j)];
            if i != j && (!r.is_finite() || r.abs() > 1.0) {
                push(
                    &mut v,
                    format!("rho[{i}][{j}]"),
                    "correlation outside [-1, 1]".into(),
                );
            }
            if j > i && (r - spec.rho[(j, i)]).abs() > SYMMETRY_TOL {
                push(
                    &mut v,
                    format!("rho[{i}][{j}]"),
                    format!("not symmetric: {r} vs rho[{j}][{i}] = {}", spec.rho[(j, i)]),
                );
            }
        }
    }
    if v.is_empty() {
        if let Err(e) = psd_factor(&covariance_unchecked(spec)) {
            push(
                &mut v,
                String::new(),
                format!("augmented correlation matrix not PSD ({e})"),
            );
        }
    }
    ValidationReport { violations: v }
}

/// Second-moment structure of the relative sample means.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrices {
    /// `C_i^2 + C_(i)^2` on the diagonal, `rho_ij C_i C_j` off it.
    pub a: DMatrix<f64>,
    /// Error-free counterpart of `a`.
    pub a_star: DMatrix<f64>,
    /// `b_i = rho_0i C_0 C_i`.
    pub b: DVector<f64>,
    /// Diagonal of `a`.
    pub c_diag: DVector<f64>,
}

impl MomentMatrices {
    pub fn p(&self) -> usize {
        self.b.len()
    }

    /// `A^{-1} b`.
    pub fn a_inv_b(&self) -> Result<DVector<f64>> {
        solve_spd(&self.a, &self.b, "A")
    }

    /// `A*^{-1} b`.
    pub fn a_star_inv_b(&self) -> Result<DVector<f64>> {
        solve_spd(&self.a_star, &self.b, "A*")
    }
}

pub fn build_moments(spec: &PopulationSpec) -> Result<MomentMatrices> {
    spec.ensure_valid()?;
    let p = spec.p();
    let a_star = DMatrix::from_fn(p, p, |i, j| {
        if i == j {
            spec.c[i] * spec.c[i]
        } else {
            spec.rho[(i, j)] * spec.c[i] * spec.c[j]
        }
    });
    let c_diag = DVector::from_fn(p, |i, _| {
        spec.c[i] * spec.c[i] + spec.c_err[i] * spec.c_err[i]
    });
    let mut a = a_star.clone();
    a.set_diagonal(&c_diag);
    let b = DVector::from_fn(p, |i, _| spec.rho0[i] * spec.c0 * spec.c[i]);
    Ok(MomentMatrices {
        a,
        a_star,
        b,
        c_diag,
    })
}

/// Squared multiple correlation of the true study variate on the true
/// auxiliaries, `R^2 = b' A*^{-1} b / C_0^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultipleCorrelation {
    /// `R^2` clamped to `[0, 1]`.
    pub r_squared: f64,
    /// The unclamped value. Differs from `r_squared` only for an inconsistent spec.
    pub raw: f64,
}

impl MultipleCorrelation {
    pub fn clamped(&self) -> bool {
        self.raw != self.r_squared
    }
}

pub fn multiple_correlation_sq(spec: &PopulationSpec) -> Result<MultipleCorrelation> {
    let moments = build_moments(spec)?;
    if spec.c0 <= 0.0 {
        return Err(Error::InvalidSpec(vec![
            "multiple correlation needs a positive c0".to_string(),
        ]));
    }
    let x = moments.a_star_inv_b()?;
    let raw = moments.b.dot(&x) / (spec.c0 * spec.c0);
    Ok(MultipleCorrelation {
        r_squared: raw.clamp(0.0, 1.0),
        raw,
    })
}

/// Covariance of the true values `(Y, X_1, .., X_p)`.
///
/// Correlations are those of the relative deviations `(Y - mu0)/mu0` and
/// `(X_i - mu_i)/mu_i`, so a negative mean flips the sign of the true-value
/// correlations it takes part in. For positive means the two coincide.
pub fn synthesize_covariance(spec: &PopulationSpec) -> Result<DMatrix<f64>> {
    spec.ensure_valid()?;
    let cov = covariance_unchecked(spec);
    psd_factor(&cov)?;
    Ok(cov)
}

fn covariance_unchecked(spec: &PopulationSpec) -> DMatrix<f64> {
    let p = spec.p();
    let mut sd = Vec::with_capacity(p + 1);
    sd.push(spec.c0 * spec.mu0);
    sd.extend(spec.c.iter().zip(&spec.mu).map(|(c, m)| c * m));
    DMatrix::from_fn(p + 1, p + 1, |i, j| {
        let r = match (i, j) {
            _ if i == j => 1.0,
            (0, k) | (k, 0) => spec.rho0[k - 1],
            (k, l) => spec.rho[(k - 1, l - 1)],
        };
        r * sd[i.min(j)] * sd[i.max(j)]
    })
}
