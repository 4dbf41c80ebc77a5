//! Command dispatch: builds report tables and writes them to disk.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use meerr_core::sim::{simulate, Evaluator};
use meerr_core::{
    build_moments, compare_theory, derivative_profile, error_penalty, evaluate, min_mse,
    min_mse_no_error, theory_result, variance_plain_mean, ComparisonReport, EmpiricalStats,
    EstimatorConfig, ObservedSample, PopulationSpec, TheoryResult,
};
use thiserror::Error;

use crate::config::{parse_config, ConfigError, Scenario};
use crate::report::{format_number, Cell, Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Theory,
    Simulate,
    Compare,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Theory => "theory",
            Command::Simulate => "simulate",
            Command::Compare => "compare",
            Command::Sweep => "sweep",
        }
    }
}

/// Quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    C0Err,
    /// Error CV of auxiliary `i` (zero-based).
    CErr(usize),
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" => Ok(Axis::N),
            "c0_err" => Ok(Axis::C0Err),
            _ => s
                .strip_prefix("c_err:")
                .and_then(|i| i.parse().ok())
                .map(Axis::CErr)
                .ok_or_else(|| format!("unknown axis {s:?} (expected n, c0_err or c_err:<i>)")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::N => f.write_str("n"),
            Axis::C0Err => f.write_str("c0_err"),
            Axis::CErr(i) => write!(f, "c_err:{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub config: PathBuf,
    pub command: Command,
    pub out: PathBuf,
    pub format: Format,
    pub z: f64,
    pub sweep: Option<Sweep>,
    /// Worker threads for Monte Carlo; `None` uses all cores.
    pub threads: Option<usize>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] meerr_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(RunError::Usage(format!(
                "--z must be positive, got {}",
                self.z
            )));
        }
        if self.threads == Some(0) {
            return Err(RunError::Usage("--threads must be at least 1".into()));
        }
        match (&self.command, &self.sweep) {
            (Command::Sweep, None) => Err(RunError::Usage("sweep needs --axis and --grid".into())),
            (Command::Sweep, Some(s)) => validate_grid(s),
            (_, Some(_)) => Err(RunError::Usage(
                "--axis and --grid apply to sweep only".into(),
            )),
            _ => Ok(()),
        }
    }
}

fn validate_grid(s: &Sweep) -> Result<(), RunError> {
    if s.grid.is_empty() {
        return Err(RunError::Usage("--grid must not be empty".into()));
    }
    if s.grid.iter().any(|v| !v.is_finite()) {
        return Err(RunError::Usage("--grid values must be finite".into()));
    }
    if s.grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RunError::Usage("--grid must be strictly increasing".into()));
    }
    match s.axis {
        Axis::N if s.grid.iter().any(|v| *v < 1.0 || v.fract() != 0.0) => Err(RunError::Usage(
            "n grid values must be positive integers".into(),
        )),
        Axis::C0Err | Axis::CErr(_) if s.grid.iter().any(|v| *v < 0.0) => Err(RunError::Usage(
            "error CV grid values must be nonnegative".into(),
        )),
        _ => Ok(()),
    }
}

/// Result of a command: the process exit code and a short human summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_COMPARISON_FAILED: i32 = 2;

fn params_text(c: &EstimatorConfig) -> String {
    let list = |v: &[f64]| {
        v.iter()
            .map(|x| format_number(*x))
            .collect::<Vec<_>>()
            .join(";")
    };
    let mut parts = Vec::new();
    if let Some(w) = &c.omega {
        parts.push(format!("omega={}", list(w)));
    }
    if let Some(a) = &c.alpha {
        parts.push(format!("alpha={}", list(a)));
    }
    if let Some(t) = &c.theta {
        parts.push(format!("theta={}", list(t)));
    }
    if let Some(q) = c.q {
        parts.push(format!("q={q}"));
    }
    parts.join(" ")
}

fn theory_for(
    configs: &[(String, EstimatorConfig)],
    spec: &PopulationSpec,
    n: usize,
) -> Result<Vec<TheoryResult>, RunError> {
    let m = build_moments(spec)?;
    configs
        .iter()
        .map(|(_, c)| {
            let prof = derivative_profile(c, spec.mu0, &spec.mu)?;
            Ok(theory_result(&prof, &m, spec, n)?)
        })
        .collect()
}

/// Columns: `name, id, n, n_mse, mse, n_bias, bias, params`. One row per
/// estimator, then the rows `variance_plain_mean`, `min_mse`,
/// `min_mse_no_error` and `error_penalty` with empty bias cells.
pub fn theory_table(s: &Scenario) -> Result<Table, RunError> {
    let configs = s.resolved()?;
    let results = theory_for(&configs, &s.spec, s.n)?;
    let mut t = Table::new([
        "name", "id", "n", "n_mse", "mse", "n_bias", "bias", "params",
    ]);
    for ((label, c), r) in configs.iter().zip(&results) {
        t.push(vec![
            label.as_str().into(),
            c.id.as_str().into(),
            s.n.into(),
            r.n_mse().into(),
            r.mse.into(),
            r.n_bias().into(),
            r.bias.into(),
            params_text(c).into(),
        ]);
    }
    let m = build_moments(&s.spec)?;
    let n = s.n as f64;
    for (name, v) in [
        ("variance_plain_mean", variance_plain_mean(&s.spec, s.n)?),
        ("min_mse", min_mse(&m, &s.spec, s.n)?),
        ("min_mse_no_error", min_mse_no_error(&m, &s.spec, s.n)?),
        ("error_penalty", error_penalty(&m, &s.spec, s.n)?),
    ] {
        t.push(vec![
            name.into(),
            Cell::Empty,
            s.n.into(),
            (v * n).into(),
            v.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    Ok(t)
}

/// Monte Carlo over the scenario's estimators, labelled as in the document.
pub fn simulate_stats(s: &Scenario, threads: Option<usize>) -> Result<EmpiricalStats, RunError> {
    let configs = s.resolved()?;
    let sc = s.simulation()?;
    let mu = s.spec.mu.clone();
    let evaluators: Vec<Evaluator<'_>> = configs
        .iter()
        .map(|(label, c)| {
            let mu = mu.clone();
            Evaluator::new(label.clone(), move |o: &ObservedSample| {
                evaluate(c, &o.summary(), &mu)
            })
        })
        .collect();
    Ok(simulate(&sc, &evaluators, threads)?)
}

/// Columns: `name, n, replications, evaluated, domain_errors, mean, bias,
/// n_bias, bias_se, mse, n_mse, mse_se, unstable`.
pub fn simulate_table(stats: &EmpiricalStats) -> Table {
    let mut t = Table::new([
        "name",
        "n",
        "replications",
        "evaluated",
        "domain_errors",
        "mean",
        "bias",
        "n_bias",
        "bias_se",
        "mse",
        "n_mse",
        "mse_se",
        "unstable",
    ]);
    let n = stats.n as f64;
    for r in &stats.rows {
        t.push(vec![
            r.label.as_str().into(),
            stats.n.into(),
            stats.replications.into(),
            r.evaluated.into(),
            r.domain_errors.into(),
            r.mean.into(),
            r.bias.into(),
            (r.bias * n).into(),
            r.bias_se.into(),
            r.mse.into(),
            (r.mse * n).into(),
            r.mse_se.into(),
            r.unstable.into(),
        ]);
    }
    t
}

pub fn compare_report(
    s: &Scenario,
    z: f64,
    threads: Option<usize>,
) -> Result<ComparisonReport, RunError> {
    let configs = s.resolved()?;
    let theory = theory_for(&configs, &s.spec, s.n)?;
    let stats = simulate_stats(s, threads)?;
    Ok(compare_theory(&stats, &theory, z)?)
}

/// Columns: `name, n, mse_theory, mse_empirical, mse_se, z_mse,
/// n_bias_theory, n_bias_empirical, n_bias_se, z_bias, unstable, pass`.
pub fn compare_table(report: &ComparisonReport) -> Table {
    let mut t = Table::new([
        "name",
        "n",
        "mse_theory",
        "mse_empirical",
        "mse_se",
        "z_mse",
        "n_bias_theory",
        "n_bias_empirical",
        "n_bias_se",
        "z_bias",
        "unstable",
        "pass",
    ]);
    for r in &report.rows {
        t.push(vec![
            r.label.as_str().into(),
            r.n.into(),
            r.mse_theory.into(),
            r.mse_empirical.into(),
            r.mse_se.into(),
            r.z_mse.into(),
            r.n_bias_theory().into(),
            r.n_bias_empirical().into(),
            (r.bias_se * r.n as f64).into(),
            r.z_bias.into(),
            r.unstable.into(),
            r.pass.into(),
        ]);
    }
    t
}

/// Theory along a grid. Columns: `axis, value, n, variance_plain_mean,
/// min_mse, min_mse_no_error, error_penalty`, then `mse:<name>` and
/// `bias:<name>` per estimator. Optimal entries are re-optimized at every
/// grid point.
pub fn sweep_table(s: &Scenario, sweep: &Sweep) -> Result<Table, RunError> {
    validate_grid(sweep)?;
    if let Axis::CErr(i) = sweep.axis {
        if i >= s.spec.p() {
            return Err(RunError::Usage(format!(
                "axis c_err:{i} out of range for {} auxiliaries",
                s.spec.p()
            )));
        }
    }
    let mut columns: Vec<String> = [
        "axis",
        "value",
        "n",
        "variance_plain_mean",
        "min_mse",
        "min_mse_no_error",
        "error_penalty",
    ]
    .map(String::from)
    .to_vec();
    for e in &s.estimators {
        columns.push(format!("mse:{}", e.label));
        columns.push(format!("bias:{}", e.label));
    }
    let mut t = Table::new(columns);
    for &value in &sweep.grid {
        let mut spec = s.spec.clone();
        let mut n = s.n;
        match sweep.axis {
            Axis::N => n = value as usize,
            Axis::C0Err => spec.c0_err = value,
            Axis::CErr(i) => spec.c_err[i] = value,
        }
        let m = build_moments(&spec)?;
        let configs = s.resolved_for(&spec)?;
        let results = theory_for(&configs, &spec, n)?;
        let mut row: Vec<Cell> = vec![
            sweep.axis.to_string().into(),
            value.into(),
            n.into(),
            variance_plain_mean(&spec, n)?.into(),
            min_mse(&m, &spec, n)?.into(),
            min_mse_no_error(&m, &spec, n)?.into(),
            error_penalty(&m, &spec, n)?.into(),
        ];
        for r in &results {
            row.push(r.mse.into());
            row.push(r.bias.into());
        }
        t.push(row);
    }
    Ok(t)
}

fn meta(s: &Scenario) -> Vec<(&'static str, Cell)> {
    vec![
        ("n", s.n.into()),
        ("replications", s.replications.into()),
        ("seed", s.seed.into()),
        ("distribution", s.distribution.as_str().into()),
        ("error_distribution", s.error_distribution.as_str().into()),
    ]
}

fn write(path: &PathBuf, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })
}

/// Reads the scenario, runs the command and writes the report.
pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    cfg.validate()?;
    let text = std::fs::read_to_string(&cfg.config).map_err(|source| RunError::Io {
        path: cfg.config.clone(),
        source,
    })?;
    let s = parse_config(&text)?;
    run_scenario(cfg, &s)
}

/// Runs the command on an already parsed scenario.
pub fn run_scenario(cfg: &RunConfig, s: &Scenario) -> Result<Outcome, RunError> {
    cfg.validate()?;
    let command = cfg.command.as_str();
    let mut meta = meta(s);
    let (table, exit_code, summary) = match cfg.command {
        Command::Theory => {
            let t = theory_table(s)?;
            let summary = format!("theory: {} estimators at n = {}", s.estimators.len(), s.n);
            (t, EXIT_OK, summary)
        }
        Command::Simulate => {
            let stats = simulate_stats(s, cfg.threads)?;
            let unstable = stats.rows.iter().filter(|r| r.unstable).count();
            let summary = format!(
                "simulate: {} estimators, {} replications, {unstable} unstable",
                stats.rows.len(),
                stats.replications
            );
            (simulate_table(&stats), EXIT_OK, summary)
        }
        Command::Compare => {
            let report = compare_report(s, cfg.z, cfg.threads)?;
            meta.push(("z_threshold", cfg.z.into()));
            let failed: Vec<_> = report
                .rows
                .iter()
                .filter(|r| !r.pass)
                .map(|r| r.label.as_str())
                .collect();
            let (code, summary) = if failed.is_empty() {
                (
                    EXIT_OK,
                    format!(
                        "compare: all {} rows pass at z = {}",
                        report.rows.len(),
                        cfg.z
                    ),
                )
            } else {
                (
                    EXIT_COMPARISON_FAILED,
                    format!("compare: failed rows: {}", failed.join(", ")),
                )
            };
            (compare_table(&report), code, summary)
        }
        Command::Sweep => {
            let sweep = cfg.sweep.as_ref().expect("validated");
            meta.push(("axis", sweep.axis.to_string().into()));
            let t = sweep_table(s, sweep)?;
            let summary = format!(
                "sweep: {} grid points over {}",
                sweep.grid.len(),
                sweep.axis
            );
            (t, EXIT_OK, summary)
        }
    };
    write(&cfg.out, &table.render(cfg.format, command, &meta))?;
    Ok(Outcome { exit_code, summary })
}
