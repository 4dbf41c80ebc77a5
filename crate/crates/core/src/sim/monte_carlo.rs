use rayon::prelude::*;

use super::{ObservedSample, Sampler, SimulationScenario};
use crate::error::{Error, Result};
use crate::estimators::evaluate;
use crate::linalg::compensated_sum;

/// Fraction of failed replications above which a row is flagged unstable.
pub const UNSTABLE_FRACTION: f64 = 0.01;

/// Estimate of one sample, shareable across worker threads.
pub type EstimateFn<'a> = Box<dyn Fn(&ObservedSample) -> Result<f64> + Send + Sync + 'a>;

/// A labelled estimate computed from one observed sample.
pub struct Evaluator<'a> {
    pub label: String,
    pub estimate: EstimateFn<'a>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        label: impl Into<String>,
        estimate: impl Fn(&ObservedSample) -> Result<f64> + Send + Sync + 'a,
    ) -> Self {
        Evaluator {
            label: label.into(),
            estimate: Box::new(estimate),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorStats {
    pub label: String,
    /// Replications that produced an estimate.
    pub evaluated: usize,
    /// Replications excluded because the estimate could not be evaluated.
    pub domain_errors: usize,
    pub mean: f64,
    pub bias: f64,
    pub mse: f64,
    /// Standard error of `mse`, from the replication-level squared errors.
    pub mse_se: f64,
    /// Standard error of `bias`.
    pub bias_se: f64,
    pub unstable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalStats {
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub rows: Vec<EstimatorStats>,
}

/// Runs the scenario's estimators on the global thread pool.
pub fn run_monte_carlo(scenario: &SimulationScenario) -> Result<EmpiricalStats> {
    run_monte_carlo_with(scenario, None)
}

/// Runs the scenario's estimators, optionally on a dedicated pool of
/// `threads` workers. The result does not depend on the thread count.
pub fn run_monte_carlo_with(
    scenario: &SimulationScenario,
    threads: Option<usize>,
) -> Result<EmpiricalStats> {
    scenario.validate()?;
    let mu = scenario.spec.mu.clone();
    let evaluators = scenario
        .estimators
        .iter()
        .map(|config| {
            let mu = mu.clone();
            Evaluator::new(config.id.as_str(), move |s: &ObservedSample| {
                evaluate(config, &s.summary(), &mu)
            })
        })
        .collect::<Vec<_>>();
    simulate(scenario, &evaluators, threads)
}

/// The Monte Carlo engine: draws every replication of `scenario` and feeds
/// each sample to every evaluator.
///
/// Replications run in parallel; per-replication results are stored by
/// index and reduced sequentially in index order with compensated sums, so
/// the output is bit-identical for any degree of concurrency.
pub fn simulate(
    scenario: &SimulationScenario,
    evaluators: &[Evaluator<'_>],
    threads: Option<usize>,
) -> Result<EmpiricalStats> {
    let sampler = Sampler::new(scenario)?;
    let work = || -> Vec<Vec<Option<f64>>> {
        (0..scenario.replications as u64)
            .into_par_iter()
            .map(|r| {
                let sample = sampler.draw(r);
                evaluators
                    .iter()
                    .map(|e| (e.estimate)(&sample).ok())
                    .collect()
            })
            .collect()
    };
    let per_rep = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidScenario(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mu0 = scenario.spec.mu0;
    let rows = evaluators
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let values: Vec<f64> = per_rep.iter().filter_map(|row| row[k]).collect();
            summarize(&e.label, &values, scenario.replications, mu0)
        })
        .collect();
    Ok(EmpiricalStats {
        n: scenario.n,
        replications: scenario.replications,
        seed: scenario.seed,
        rows,
    })
}

fn summarize(label: &str, values: &[f64], replications: usize, mu0: f64) -> EstimatorStats {
    let m = values.len();
    let domain_errors = replications - m;
    let unstable = domain_errors as f64 > UNSTABLE_FRACTION * replications as f64;
    if m < 2 {
        return EstimatorStats {
            label: label.to_string(),
            evaluated: m,
            domain_errors,
            mean: f64::NAN,
            bias: f64::NAN,
            mse: f64::NAN,
            mse_se: f64::NAN,
            bias_se: f64::NAN,
            unstable: true,
        };
    }
    let mf = m as f64;
    let mean = compensated_sum(values.iter().copied()) / mf;
    let sq: Vec<f64> = values.iter().map(|v| (v - mu0) * (v - mu0)).collect();
    let mse = compensated_sum(sq.iter().copied()) / mf;
    let var_est = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (mf - 1.0);
    let var_sq = compensated_sum(sq.iter().map(|s| (s - mse) * (s - mse))) / (mf - 1.0);
    EstimatorStats {
        label: label.to_string(),
        evaluated: m,
        domain_errors,
        mean,
        bias: mean - mu0,
        mse,
        mse_se: (var_sq / mf).sqrt(),
        bias_se: (var_est / mf).sqrt(),
        unstable,
    }
}
