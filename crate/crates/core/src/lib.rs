//! Estimators of a population mean that exploit several auxiliary variables
//! observed with additive measurement error.
//!
//! The crate covers the family `g(y_bar, u)` of calibrated functions of the
//! observed study mean and the auxiliary ratios `u_i = x_bar_i / mu_i`:
//!
//! * [`population`]: scenarios given by true and error moments, and the
//!   moment matrices `A`, `A*`, `b`;
//! * [`estimators`]: eighteen classical members, their derivative profiles
//!   and optimum parameters;
//! * [`theory`]: first-order bias and MSE, the family minimum and the
//!   penalty paid for measurement error;
//! * [`sim`]: seeded, thread-count independent Monte Carlo;
//! * [`estimated_optimum`]: the optimum with sample-estimated constants.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod estimated_optimum;
pub mod estimators;
pub mod linalg;
pub mod population;
pub mod sim;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::{
    derivative_profile, evaluate, numeric_profile, optimal_params, optimal_split_params,
    DerivativeProfile, EstimatorConfig, MemberId, SampleSummary,
};
pub use population::{
    build_moments, multiple_correlation_sq, synthesize_covariance, validate_spec, MomentMatrices,
    PopulationSpec, ValidationReport, Violation,
};
pub use sim::{
    compare_theory, draw_sample, run_monte_carlo, ComparisonReport, EmpiricalStats, ObservedSample,
    SimulationScenario, TrueDistribution,
};
pub use theory::{
    bias_first_order, error_penalty, min_mse, min_mse_no_error, mse_first_order, theory_result,
    variance_plain_mean, TheoryResult,
};
