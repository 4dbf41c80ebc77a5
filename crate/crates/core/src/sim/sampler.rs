use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng::{substream, Substream};
use super::{SimulationScenario, TrueDistribution};
use crate::error::{Error, Result};
use crate::estimators::SampleSummary;
use crate::linalg::{compensated_sum, psd_factor};
use crate::population::synthesize_covariance;

/// One simple random sample of fallible observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedSample {
    pub y: Vec<f64>,
    /// One column per auxiliary, each of length `n`.
    pub x: Vec<Vec<f64>>,
}

impl ObservedSample {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.len()
    }

    pub fn summary(&self) -> SampleSummary {
        let n = self.n() as f64;
        SampleSummary {
            y_bar: compensated_sum(self.y.iter().copied()) / n,
            x_bar: self
                .x
                .iter()
                .map(|col| compensated_sum(col.iter().copied()) / n)
                .collect(),
            n: self.n(),
        }
    }
}

#[derive(Debug, Clone)]
enum Law {
    Gaussian {
        mean: DVector<f64>,
        factor: DMatrix<f64>,
    },
    /// `exp` of a Gaussian with these log-scale parameters.
    Lognormal {
        log_mean: DVector<f64>,
        log_factor: DMatrix<f64>,
    },
}

/// Precomputed sampling law for a scenario; draws are pure functions of the
/// replication index.
#[derive(Debug, Clone)]
pub struct Sampler {
    law: Law,
    error_sd: Vec<f64>,
    n: usize,
    seed: u64,
}

impl Sampler {
    pub fn new(scenario: &SimulationScenario) -> Result<Self> {
        scenario.validate()?;
        let spec = &scenario.spec;
        let cov = synthesize_covariance(spec)?;
        let mut mean = Vec::with_capacity(spec.p() + 1);
        mean.push(spec.mu0);
        mean.extend_from_slice(&spec.mu);
        let mean = DVector::from_vec(mean);

        let law = match scenario.distribution {
            TrueDistribution::Gaussian => Law::Gaussian {
                factor: psd_factor(&cov)?,
                mean,
            },
            TrueDistribution::Lognormal => {
                let k = mean.len();
                let mut log_cov = DMatrix::zeros(k, k);
                for i in 0..k {
                    for j in 0..k {
                        let arg = 1.0 + cov[(i, j)] / (mean[i] * mean[j]);
                        if arg <= 0.0 {
                            return Err(Error::LognormalInfeasible(format!(
                                "covariance entry ({i}, {j}) too negative for positive variates"
                            )));
                        }
                        log_cov[(i, j)] = arg.ln();
                    }
                }
                let log_factor = psd_factor(&log_cov).map_err(|e| {
                    Error::LognormalInfeasible(format!("implied log-covariance: {e}"))
                })?;
                let log_mean = DVector::from_fn(k, |i, _| mean[i].ln() - 0.5 * log_cov[(i, i)]);
                Law::Lognormal {
                    log_mean,
                    log_factor,
                }
            }
        };
        let mut error_sd = Vec::with_capacity(spec.p() + 1);
        error_sd.push(spec.sigma0_err());
        error_sd.extend(spec.sigma_err());
        Ok(Sampler {
            law,
            error_sd,
            n: scenario.n,
            seed: scenario.seed,
        })
    }

    pub fn draw(&self, replication: u64) -> ObservedSample {
        let k = self.error_sd.len();
        let mut truth_rng = substream(self.seed, replication, Substream::TrueValues);
        let mut error_rng = substream(self.seed, replication, Substream::Errors);
        let mut cols = vec![Vec::with_capacity(self.n); k];
        let mut z = vec![0.0; k];
        let (center, factor, exponentiate) = match &self.law {
            Law::Gaussian { mean, factor } => (mean, factor, false),
            Law::Lognormal {
                log_mean,
                log_factor,
            } => (log_mean, log_factor, true),
        };
        for _ in 0..self.n {
            for zi in z.iter_mut() {
                *zi = truth_rng.sample(StandardNormal);
            }
            for (i, col) in cols.iter_mut().enumerate() {
                let mut v = center[i];
                for (j, zj) in z.iter().enumerate().take(i + 1) {
                    v += factor[(i, j)] * zj;
                }
                let truth = if exponentiate { v.exp() } else { v };
                let noise: f64 = error_rng.sample(StandardNormal);
                col.push(truth + self.error_sd[i] * noise);
            }
        }
        let mut cols = cols.into_iter();
        let y = cols.next().unwrap_or_default();
        ObservedSample {
            y,
            x: cols.collect(),
        }
    }
}

/// Draws replication `replication` of a scenario.
///
/// Builds the sampling law on every call; loops should hold a [`Sampler`].
pub fn draw_sample(scenario: &SimulationScenario, replication: u64) -> Result<ObservedSample> {
    Ok(Sampler::new(scenario)?.draw(replication))
}
