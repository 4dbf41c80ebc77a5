//! Seeded Monte Carlo: sampling with measurement error, empirical bias and
//! MSE, and comparison against the first-order theory.

mod compare;
mod monte_carlo;
pub mod rng;
mod sampler;

pub use compare::{compare_theory, ComparisonReport, ComparisonRow, DEFAULT_Z_THRESHOLD};
pub use monte_carlo::{
    run_monte_carlo, run_monte_carlo_with, simulate, EmpiricalStats, EstimatorStats, Evaluator,
    UNSTABLE_FRACTION,
};
pub use sampler::{draw_sample, ObservedSample, Sampler};

use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::population::PopulationSpec;

/// Law of the true values. Both deliver the spec's means and covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrueDistribution {
    Gaussian,
    Lognormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorDistribution {
    #[default]
    Gaussian,
}

impl TrueDistribution {
    pub fn as_str(self) -> &'static str {
        match self {
            TrueDistribution::Gaussian => "gaussian",
            TrueDistribution::Lognormal => "lognormal",
        }
    }
}

impl ErrorDistribution {
    pub fn as_str(self) -> &'static str {
        "gaussian"
    }
}

pub const MIN_REPLICATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationScenario {
    pub spec: PopulationSpec,
    pub estimators: Vec<EstimatorConfig>,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub distribution: TrueDistribution,
    pub error_distribution: ErrorDistribution,
}

impl SimulationScenario {
    pub fn new(spec: PopulationSpec, n: usize, replications: usize, seed: u64) -> Self {
        SimulationScenario {
            spec,
            estimators: Vec::new(),
            n,
            replications,
            seed,
            distribution: TrueDistribution::Gaussian,
            error_distribution: ErrorDistribution::Gaussian,
        }
    }

    pub fn with_estimators(mut self, estimators: Vec<EstimatorConfig>) -> Self {
        self.estimators = estimators;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.ensure_valid()?;
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::InvalidScenario(format!(
                "replications = {} below the minimum of {MIN_REPLICATIONS}",
                self.replications
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidScenario(format!(
                "sample size n = {} below 2",
                self.n
            )));
        }
        if self.distribution == TrueDistribution::Lognormal
            && (self.spec.mu0 <= 0.0 || self.spec.mu.iter().any(|m| *m <= 0.0))
        {
            return Err(Error::InvalidScenario(
                "lognormal true values require positive means".into(),
            ));
        }
        for e in &self.estimators {
            e.validate(self.spec.p())?;
        }
        Ok(())
    }
}
