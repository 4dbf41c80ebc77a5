//! Optimum parameters per member.
//!
//! The first-order MSE is the quadratic `2 b'd + d'A d` in the normalized
//! gradient `d`, minimized without constraint at `d* = -A^{-1} b`. Members
//! whose weights live on the simplex map that simplex to one linear
//! constraint `a'd = 1` on `d`, where the quadratic is minimized exactly by
//! `d = A^{-1}(lambda a - b)`, `lambda = (1 + a'A^{-1}b) / (a'A^{-1}a)`.

use nalgebra::DVector;

use super::{EstimatorConfig, MemberId};
use crate::error::{Error, Result};
use crate::linalg::solve_spd;
use crate::population::{MomentMatrices, PopulationSpec};

/// Parameters of `id` minimizing the first-order MSE.
///
/// M11 needs its split index and goes through [`optimal_split_params`].
pub fn optimal_params(
    id: MemberId,
    spec: &PopulationSpec,
    moments: &MomentMatrices,
) -> Result<EstimatorConfig> {
    let p = check_dims(spec, moments)?;
    let d_star = -moments.a_inv_b()?;
    let ones = DVector::from_element(p, 1.0);

    use MemberId::*;
    let config = match id {
        Plain => return Err(mismatch(id, "PLAIN has no parameters to optimize")),
        M11 => {
            return Err(mismatch(
                id,
                "M11 needs a split index; use optimal_split_params",
            ))
        }
        M1 | M5 | M6 => {
            let d = constrained(moments, &-&ones)?;
            EstimatorConfig::with_omega(id, (-d).as_slice().to_vec())
        }
        M2 | M7 | M8 => {
            let d = constrained(moments, &ones)?;
            EstimatorConfig::with_omega(id, d.as_slice().to_vec())
        }
        M3 | M4 => {
            // d = -/+ w* with w*_i = omega_i mu_i / sum(omega mu); sum(w*) = 1
            let sign = if id == M3 { -1.0 } else { 1.0 };
            let scaled = constrained(moments, &(&ones * sign))? * sign;
            let raw: Vec<f64> = scaled.iter().zip(&spec.mu).map(|(w, m)| w / m).collect();
            let total: f64 = raw.iter().sum();
            if total.abs() < 1e-300 {
                return Err(mismatch(
                    id,
                    "optimum gradient is not representable by simplex weights",
                ));
            }
            EstimatorConfig::with_omega(id, raw.iter().map(|r| r / total).collect())
        }
        M9 | M10 => {
            let sign = if id == M9 { -1.0 } else { 1.0 };
            let mut w: Vec<f64> = d_star.iter().map(|d| sign * d).collect();
            let slack = 1.0 - w.iter().sum::<f64>();
            w.push(slack);
            EstimatorConfig::with_omega(id, w)
        }
        M12 => EstimatorConfig::with_alpha(id, d_star.as_slice().to_vec()),
        M13 => EstimatorConfig::with_alpha(id, (-&d_star).as_slice().to_vec()),
        M14 => EstimatorConfig::with_alpha(id, d_star.iter().map(|d| 1.0 - d).collect()),
        M15 | M16 => EstimatorConfig::with_theta(id, d_star.as_slice().to_vec()),
        M17 => EstimatorConfig::power_mixture(vec![1.0 / p as f64; p], d_star.as_slice().to_vec()),
        M18 => EstimatorConfig::with_alpha(
            id,
            d_star
                .iter()
                .zip(&spec.mu)
                .map(|(d, m)| d * spec.mu0 / m)
                .collect(),
        ),
    };
    Ok(config)
}

/// Optimum weights for M11 with the first `q` auxiliaries in ratio form.
pub fn optimal_split_params(
    q: usize,
    spec: &PopulationSpec,
    moments: &MomentMatrices,
) -> Result<EstimatorConfig> {
    let p = check_dims(spec, moments)?;
    if q == 0 || q >= p {
        return Err(mismatch(
            MemberId::M11,
            "split index must satisfy 1 <= q < p",
        ));
    }
    let signs = DVector::from_fn(p, |i, _| if i < q { -1.0 } else { 1.0 });
    let d = constrained(moments, &signs)?;
    Ok(EstimatorConfig::split(
        q,
        d.component_mul(&signs).as_slice().to_vec(),
    ))
}

fn constrained(moments: &MomentMatrices, a: &DVector<f64>) -> Result<DVector<f64>> {
    let a_inv_b = moments.a_inv_b()?;
    let a_inv_a = solve_spd(&moments.a, a, "A")?;
    let denom = a.dot(&a_inv_a);
    if !(denom.abs() > 0.0) {
        return Err(Error::Singular("A"));
    }
    let lambda = (1.0 + a.dot(&a_inv_b)) / denom;
    Ok(a_inv_a * lambda - a_inv_b)
}

fn check_dims(spec: &PopulationSpec, moments: &MomentMatrices) -> Result<usize> {
    let p = spec.p();
    if moments.p() != p {
        return Err(Error::Mismatch(format!(
            "moments have dimension {}, spec has {p}",
            moments.p()
        )));
    }
    Ok(p)
}

fn mismatch(member: MemberId, reason: &str) -> Error {
    Error::InvalidConfig {
        member,
        reason: reason.to_string(),
    }
}
