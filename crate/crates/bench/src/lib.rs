//! Shared fixtures for the benchmarks.

use meerr_core::{
    build_moments, optimal_params, optimal_split_params, EstimatorConfig, MemberId, PopulationSpec,
};
use nalgebra::DMatrix;

/// Two auxiliaries with measurement error on every variable.
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

/// Equicorrelated scenario with `p` auxiliaries.
pub fn equicorrelated(p: usize) -> PopulationSpec {
    PopulationSpec {
        mu0: 50.0,
        mu: (0..p).map(|i| 10.0 + i as f64).collect(),
        c0: 0.4,
        c: vec![0.3; p],
        c0_err: 0.05,
        c_err: vec![0.05; p],
        rho0: vec![0.5; p],
        rho: DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.3 }),
    }
}

/// The MSE-optimal configuration of every member for `spec`.
pub fn optimal_configs(spec: &PopulationSpec) -> Vec<EstimatorConfig> {
    let m = build_moments(spec).expect("valid spec");
    MemberId::members()
        .filter(|id| *id != MemberId::M11 || spec.mu.len() >= 2)
        .map(|id| match id {
            MemberId::M11 => optimal_split_params(1, spec, &m),
            _ => optimal_params(id, spec, &m),
        })
        .collect::<Result<_, _>>()
        .expect("optimum exists")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for spec in [two_aux(), equicorrelated(1), equicorrelated(5)] {
            assert!(meerr_core::validate_spec(&spec).violations.is_empty());
            assert!(!optimal_configs(&spec).is_empty());
        }
    }
}
