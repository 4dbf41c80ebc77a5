//! First-order (order `1/n`) bias and MSE of family members.
//!
//! All results are available both as the n-free coefficient (`n * value`)
//! and at a given `n`.

use crate::error::{Error, Result};
use crate::estimators::DerivativeProfile;
use crate::population::{MomentMatrices, PopulationSpec};

/// Additive parts of the normalized first-order MSE, `n * MSE / mu0^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseDecomposition {
    /// `C_0^2 + C_(0)^2`
    pub base: f64,
    /// `2 b'd`
    pub cross: f64,
    /// `d'A d`
    pub quadratic: f64,
}

impl MseDecomposition {
    pub fn total(&self) -> f64 {
        self.base + self.cross + self.quadratic
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryResult {
    pub mse: f64,
    pub bias: f64,
    pub n: usize,
    pub decomposition: MseDecomposition,
}

impl TheoryResult {
    pub fn n_mse(&self) -> f64 {
        self.mse * self.n as f64
    }

    pub fn n_bias(&self) -> f64 {
        self.bias * self.n as f64
    }
}

fn check(profile: &DerivativeProfile, moments: &MomentMatrices, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Mismatch("sample size must be at least 1".into()));
    }
    let p = moments.p();
    if profile.d.len() != p || profile.c.len() != p || profile.h.shape() != (p, p) {
        return Err(Error::Mismatch(format!(
            "profile dimension {} does not match moments dimension {p}",
            profile.d.len()
        )));
    }
    Ok(())
}

pub fn mse_decomposition(
    profile: &DerivativeProfile,
    moments: &MomentMatrices,
    spec: &PopulationSpec,
) -> MseDecomposition {
    let d = &profile.d;
    MseDecomposition {
        base: spec.c0 * spec.c0 + spec.c0_err * spec.c0_err,
        cross: 2.0 * moments.b.dot(d),
        quadratic: d.dot(&(&moments.a * d)),
    }
}

/// `(mu0^2 / n) [C_0^2 + C_(0)^2 + 2 b'd + d'A d]`.
pub fn mse_first_order(
    profile: &DerivativeProfile,
    moments: &MomentMatrices,
    spec: &PopulationSpec,
    n: usize,
) -> Result<f64> {
    check(profile, moments, n)?;
    let parts = mse_decomposition(profile, moments, spec);
    Ok(spec.mu0 * spec.mu0 * parts.total() / n as f64)
}

/// `(mu0 / 2n) [tr(H A) + 2 b'c]`.
pub fn bias_first_order(
    profile: &DerivativeProfile,
    moments: &MomentMatrices,
    spec: &PopulationSpec,
    n: usize,
) -> Result<f64> {
    check(profile, moments, n)?;
    let trace = profile.h.component_mul(&moments.a).sum();
    let cross = 2.0 * moments.b.dot(&profile.c);
    Ok(spec.mu0 * (trace + cross) / (2.0 * n as f64))
}

pub fn theory_result(
    profile: &DerivativeProfile,
    moments: &MomentMatrices,
    spec: &PopulationSpec,
    n: usize,
) -> Result<TheoryResult> {
    Ok(TheoryResult {
        mse: mse_first_order(profile, moments, spec, n)?,
        bias: bias_first_order(profile, moments, spec, n)?,
        n,
        decomposition: mse_decomposition(profile, moments, spec),
    })
}

fn positive_n(n: usize) -> Result<f64> {
    if n == 0 {
        Err(Error::Mismatch("sample size must be at least 1".into()))
    } else {
        Ok(n as f64)
    }
}

/// Lower bound `(mu0^2/n) [C_0^2 + C_(0)^2 - b'A^{-1}b]` over the family.
pub fn min_mse(moments: &MomentMatrices, spec: &PopulationSpec, n: usize) -> Result<f64> {
    let n = positive_n(n)?;
    let q = moments.b.dot(&moments.a_inv_b()?);
    Ok(spec.mu0 * spec.mu0 * (spec.c0 * spec.c0 + spec.c0_err * spec.c0_err - q) / n)
}

/// The bound for error-free observations, `(sigma0^2/n)(1 - R^2)`.
pub fn min_mse_no_error(moments: &MomentMatrices, spec: &PopulationSpec, n: usize) -> Result<f64> {
    let n = positive_n(n)?;
    let q = moments.b.dot(&moments.a_star_inv_b()?);
    let value = spec.mu0 * spec.mu0 * (spec.c0 * spec.c0 - q) / n;
    if spec.c0 > 0.0 {
        let r2 = q / (spec.c0 * spec.c0);
        let sigma0 = spec.sigma0();
        let alt = sigma0 * sigma0 * (1.0 - r2) / n;
        debug_assert!((alt - value).abs() <= 1e-9 * (1.0 + value.abs()));
    }
    Ok(value)
}

/// `V(y_bar) = (mu0^2/n)(C_0^2 + C_(0)^2)`.
pub fn variance_plain_mean(spec: &PopulationSpec, n: usize) -> Result<f64> {
    let n = positive_n(n)?;
    Ok(spec.mu0 * spec.mu0 * (spec.c0 * spec.c0 + spec.c0_err * spec.c0_err) / n)
}

/// Increase of the bound caused by measurement error,
/// `(mu0^2/n) [C_(0)^2 + b'A*^{-1}b - b'A^{-1}b]`.
pub fn error_penalty(moments: &MomentMatrices, spec: &PopulationSpec, n: usize) -> Result<f64> {
    let n = positive_n(n)?;
    let with_err = moments.b.dot(&moments.a_inv_b()?);
    let without = moments.b.dot(&moments.a_star_inv_b()?);
    Ok(spec.mu0 * spec.mu0 * (spec.c0_err * spec.c0_err + without - with_err) / n)
}

#[cfg(test)]
mod tests {
    use nalgebra::{DMatrix, DVector};

    use super::*;
    use crate::estimators::{derivative_profile, EstimatorConfig, MemberId};
    use crate::population::build_moments;

    fn two_aux() -> PopulationSpec {
        PopulationSpec {
            mu0: 20.0,
            mu: vec![10.0, 8.0],
            c0: 0.3,
            c: vec![0.2, 0.25],
            c0_err: 0.1,
            c_err: vec![0.1, 0.05],
            rho0: vec![0.6, 0.4],
            rho: DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]),
        }
    }

    // b'A^{-1}b for the two-auxiliary scenario by Cramer's rule
    const BAB: f64 = (0.036 * 0.00159 + 0.03 * 0.0006) / 0.002625;

    #[test]
    fn zero_gradient_is_plain_variance() {
        let spec = two_aux();
        let m = build_moments(&spec).unwrap();
        let v = mse_first_order(&DerivativeProfile::zero(2), &m, &spec, 100).unwrap();
        assert!((v - variance_plain_mean(&spec, 100).unwrap()).abs() < 1e-15);
        assert!((v - 0.4).abs() < 1e-14);
    }

    #[test]
    fn optimum_gradient_attains_bound() {
        let spec = two_aux();
        let m = build_moments(&spec).unwrap();
        let pr = DerivativeProfile {
            d: -m.a_inv_b().unwrap(),
            ..DerivativeProfile::zero(2)
        };
        let v = mse_first_order(&pr, &m, &spec, 100).unwrap();
        let want = 400.0 * (0.1 - BAB) / 100.0;
        assert!((v - want).abs() < 1e-13);
        assert!((v - 0.28534857142857).abs() < 1e-12);
        assert!((min_mse(&m, &spec, 100).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn ratio_member_mse_by_hand() {
        let spec = two_aux();
        let m = build_moments(&spec).unwrap();
        let c = EstimatorConfig::with_omega(MemberId::M1, vec![0.5, 0.5]);
        let pr = derivative_profile(&c, 20.0, &spec.mu).unwrap();
        let r = theory_result(&pr, &m, &spec, 100).unwrap();
        assert!((r.mse - 4.0 * (0.1 - 0.066 + 0.04125)).abs() < 1e-14);
        assert!((r.decomposition.total() - r.mse * 100.0 / 400.0).abs() < 1e-15);
    }

    #[test]
    fn product_member_bias() {
        let spec = two_aux();
        let m = build_moments(&spec).unwrap();
        let c = EstimatorConfig::with_omega(MemberId::M2, vec![0.5, 0.5]);
        let pr = derivative_profile(&c, 20.0, &spec.mu).unwrap();
        let b = bias_first_order(&pr, &m, &spec, 100).unwrap();
        assert!((b - 0.0066).abs() < 1e-15);
    }

    #[test]
    fn difference_member_is_unbiased() {
        let spec = two_aux();
        let m = build_moments(&spec).unwrap();
        let c = EstimatorConfig::with_alpha(MemberId::M18, vec![0.7, -2.0]);
        let pr = derivative_profile(&c, 20.0, &spec.mu).unwrap();
        assert_eq!(bias_first_order(&pr, &m, &spec, 100).unwrap(), 0.0);
    }

    #[test]
    fn identity_hessian_bias_is_half_trace() {
        let mut spec = two_aux();
        spec.rho0 = vec![0.0, 0.0];
        let m = build_moments(&spec).unwrap();
        let pr = DerivativeProfile {
            h: DMatrix::identity(2, 2),
            c: DVector::from_vec(vec![3.0, -1.0]),
            ..DerivativeProfile::zero(2)
        };
        let b = bias_first_order(&pr, &m, &spec, 100).unwrap();
        assert!((b - 0.0115).abs() < 1e-15);
    }

    #[test]
    fn bounds_and_penalty() {
        let spec = two_aux();
        let m = build_moments(&spec).unwrap();
        // A*^{-1} b = (0.8, 0.16) by Cramer's rule
        let ne = min_mse_no_error(&m, &spec, 100).unwrap();
        assert!((ne - 4.0 * (0.09 - 0.0336)).abs() < 1e-14);
        let pen = error_penalty(&m, &spec, 100).unwrap();
        assert!((pen - (min_mse(&m, &spec, 100).unwrap() - ne)).abs() < 1e-14);
        assert!((pen - 0.05974857142857).abs() < 1e-12);

        let free = spec.error_free();
        let mf = build_moments(&free).unwrap();
        assert_eq!(error_penalty(&mf, &free, 100).unwrap(), 0.0);

        let mut nob = spec.clone();
        nob.rho0 = vec![0.0, 0.0];
        let mb = build_moments(&nob).unwrap();
        assert!((error_penalty(&mb, &nob, 100).unwrap() - 4.0 * 0.01).abs() < 1e-15);
        assert_eq!(
            min_mse(&mb, &nob, 100).unwrap(),
            variance_plain_mean(&nob, 100).unwrap()
        );
    }

    #[test]
    fn single_auxiliary_regression_bound() {
        let spec = PopulationSpec {
            mu0: 10.0,
            mu: vec![4.0],
            c0: 0.3,
            c: vec![0.2],
            c0_err: 0.0,
            c_err: vec![0.0],
            rho0: vec![0.5],
            rho: DMatrix::identity(1, 1),
        };
        let m = build_moments(&spec).unwrap();
        let want = 100.0 * 0.09 * 0.75 / 50.0;
        assert!((min_mse(&m, &spec, 50).unwrap() - want).abs() < 1e-14);
        assert!((min_mse_no_error(&m, &spec, 50).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn plain_variance_scales_with_mean_squared() {
        let spec = two_aux();
        let doubled = PopulationSpec {
            mu0: 40.0,
            ..spec.clone()
        };
        let v = variance_plain_mean(&spec, 100).unwrap();
        assert!((variance_plain_mean(&doubled, 100).unwrap() - 4.0 * v).abs() < 1e-14);
        let free = PopulationSpec {
            c0_err: 0.0,
            ..spec.clone()
        };
        assert!((variance_plain_mean(&free, 100).unwrap() - 36.0 / 100.0).abs() < 1e-15);
    }

    #[test]
    fn zero_n_rejected() {
        let spec = two_aux();
        assert!(variance_plain_mean(&spec, 0).is_err());
    }
}
