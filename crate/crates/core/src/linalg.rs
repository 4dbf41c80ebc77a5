//! Small dense linear algebra helpers shared by the theory and the sampler.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot tolerance for accepting a matrix as positive semidefinite.
pub const PSD_PIVOT_TOL: f64 = 1e-10;

/// Lower-triangular factor `L` with `L Lᵀ = m` for a symmetric positive
/// semidefinite `m`.
///
/// Pivots down to `-PSD_PIVOT_TOL * max_diag` are clamped to zero. A clamped
/// pivot zeroes its column, which is only consistent when the remaining
/// entries of that column are negligible as well; otherwise the matrix has a
/// negative direction and is rejected.
pub fn psd_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotPsd("matrix is not square".into()));
    }
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0_f64, f64::max);
    let pivot_tol = PSD_PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
    let column_tol = (pivot_tol * scale).sqrt();

    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !pivot.is_finite() {
            return Err(Error::NotPsd("non-finite entry".into()));
        }
        if pivot < -pivot_tol {
            return Err(Error::NotPsd(format!(
                "negative pivot {pivot:.3e} at index {j}"
            )));
        }
        if pivot <= pivot_tol {
            for i in (j + 1)..n {
                let mut r = m[(i, j)];
                for k in 0..j {
                    r -= l[(i, k)] * l[(j, k)];
                }
                if r.abs() > column_tol {
                    return Err(Error::NotPsd(format!(
                        "zero pivot at index {j} with nonzero coupling to index {i}"
                    )));
                }
            }
            continue;
        }
        let root = pivot.sqrt();
        l[(j, j)] = root;
        for i in (j + 1)..n {
            let mut r = m[(i, j)];
            for k in 0..j {
                r -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = r / root;
        }
    }
    Ok(l)
}

/// Solves `m x = rhs` for symmetric positive definite `m`.
pub fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
    let chol = m.clone().cholesky().ok_or(Error::Singular(what))?;
    let x = chol.solve(rhs);
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::Singular(what))
    }
}

/// Neumaier-compensated sum; the result depends only on the input order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
