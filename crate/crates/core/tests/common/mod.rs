#![allow(dead_code, clippy::needless_range_loop)]

pub mod table;

use meerr_core::{EstimatorConfig, MemberId, PopulationSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two auxiliaries, moderate correlation, errors on every variate.
pub fn two_aux() -> PopulationSpec {
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

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random correlation matrix of order `k` from a Gram matrix with a ridge,
/// so it is always positive definite.
pub fn random_correlation(rng: &mut ChaCha8Rng, k: usize) -> DMatrix<f64> {
    let g: DMatrix<f64> = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
    let s = &g * g.transpose() + DMatrix::identity(k, k) * 0.2;
    DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            1.0
        } else {
            s[(i, j)] / (s[(i, i)] * s[(j, j)]).sqrt()
        }
    })
}

/// Random valid spec with `p` auxiliaries. `errors` controls whether error
/// CVs are drawn (each may still be zero) or all set to zero.
pub fn random_spec(rng: &mut ChaCha8Rng, p: usize, errors: bool) -> PopulationSpec {
    let corr = random_correlation(rng, p + 1);
    let signed = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        let v: f64 = rng.random_range(lo..hi);
        if rng.random_bool(0.2) {
            -v
        } else {
            v
        }
    };
    let err = |rng: &mut ChaCha8Rng| {
        if errors && rng.random_bool(0.7) {
            rng.random_range(0.01..0.3)
        } else {
            0.0
        }
    };
    PopulationSpec {
        mu0: signed(rng, 1.0, 50.0),
        mu: (0..p).map(|_| signed(rng, 0.5, 30.0)).collect(),
        c0: rng.random_range(0.05..0.5),
        c: (0..p).map(|_| rng.random_range(0.05..0.5)).collect(),
        c0_err: err(rng),
        c_err: (0..p).map(|_| err(rng)).collect(),
        rho0: (0..p).map(|i| corr[(0, i + 1)]).collect(),
        rho: DMatrix::from_fn(p, p, |i, j| corr[(i + 1, j + 1)]),
    }
}

/// Weights on the simplex bounded away from zero.
pub fn simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|r| r / s).collect();
    // make the sum exactly one up to rounding of the last entry
    let head: f64 = w[..k - 1].iter().sum();
    w[k - 1] = 1.0 - head;
    w
}

/// Simplex weights that may be negative (feasible for the constrained optima).
pub fn signed_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..2.0)).collect();
    let head: f64 = w[..k - 1].iter().sum();
    w[k - 1] = 1.0 - head;
    w
}

pub fn coeffs(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Random valid configuration of `id` for the auxiliary means `mu` (two or more for M11).
pub fn random_config(rng: &mut ChaCha8Rng, id: MemberId, mu: &[f64]) -> EstimatorConfig {
    use MemberId::*;
    let p = mu.len();
    match id {
        Plain => EstimatorConfig::plain(),
        M3 | M4 => loop {
            // keep the mean-weighted shares w* bounded
            let w = simplex(rng, p);
            let total: f64 = w.iter().zip(mu).map(|(w, m)| w * m).sum();
            if w.iter().zip(mu).all(|(w, m)| (w * m / total).abs() <= 3.0) {
                break EstimatorConfig::with_omega(id, w);
            }
        },
        M1 | M2 | M5 | M6 | M7 | M8 => EstimatorConfig::with_omega(id, simplex(rng, p)),
        M9 | M10 => EstimatorConfig::with_omega(id, simplex(rng, p + 1)),
        M11 => {
            let q = rng.random_range(1..p);
            EstimatorConfig::split(q, simplex(rng, p))
        }
        M12 | M13 | M18 => EstimatorConfig::with_alpha(id, coeffs(rng, p, 2.0)),
        M14 => EstimatorConfig::with_alpha(id, coeffs(rng, p, 0.9)),
        M15 | M16 => EstimatorConfig::with_theta(id, coeffs(rng, p, 2.0)),
        M17 => EstimatorConfig::power_mixture(simplex(rng, p), coeffs(rng, p, 2.0)),
    }
}
