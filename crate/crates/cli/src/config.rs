//! Scenario documents: JSON schema, validation with JSON paths, and emission.

use std::fmt;

use meerr_core::sim::ErrorDistribution;
use meerr_core::{
    build_moments, optimal_params, optimal_split_params, validate_spec, EstimatorConfig, MemberId,
    PopulationSpec, SimulationScenario, TrueDistribution,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// On-disk form of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub population: PopulationDoc,
    pub estimators: Vec<EstimatorDoc>,
    pub simulation: SimulationDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationDoc {
    pub mu0: f64,
    pub mu: Vec<f64>,
    pub c0: f64,
    pub c: Vec<f64>,
    pub c0_err: f64,
    pub c_err: Vec<f64>,
    pub rho0: Vec<f64>,
    pub rho: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Use the MSE-minimizing parameters for the population instead of
    /// explicit ones.
    #[serde(default, skip_serializing_if = "is_false")]
    pub optimal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionTag {
    #[default]
    Gaussian,
    Lognormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorDistributionTag {
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationDoc {
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub distribution: DistributionTag,
    #[serde(default)]
    pub error_distribution: ErrorDistributionTag,
}

/// A schema violation located by its JSON path.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("malformed document at {path}: {message}")]
    Malformed { path: String, message: String },
    #[error("invalid document:\n{}", join_issues(.0))]
    Schema(Vec<SchemaIssue>),
}

fn join_issues(issues: &[SchemaIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl ConfigError {
    pub fn issues(&self) -> &[SchemaIssue] {
        match self {
            ConfigError::Schema(v) => v,
            ConfigError::Malformed { .. } => &[],
        }
    }
}

/// How an estimator's parameters are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum EntryKind {
    Fixed(EstimatorConfig),
    /// Parameters minimizing the first-order MSE for the current population;
    /// `q` is the ratio/product split for M11.
    Optimal {
        id: MemberId,
        q: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorEntry {
    pub label: String,
    pub kind: EntryKind,
}

impl EstimatorEntry {
    pub fn id(&self) -> MemberId {
        match &self.kind {
            EntryKind::Fixed(c) => c.id,
            EntryKind::Optimal { id, .. } => *id,
        }
    }

    fn default_label(&self) -> String {
        match &self.kind {
            EntryKind::Fixed(c) => c.id.to_string(),
            EntryKind::Optimal { id, .. } => format!("{id}_OPT"),
        }
    }

    /// Concrete parameters for `spec`.
    pub fn resolve(&self, spec: &PopulationSpec) -> meerr_core::Result<EstimatorConfig> {
        match &self.kind {
            EntryKind::Fixed(c) => Ok(c.clone()),
            EntryKind::Optimal { id, q } => {
                let m = build_moments(spec)?;
                match (id, q) {
                    (MemberId::M11, Some(q)) => optimal_split_params(*q, spec, &m),
                    _ => optimal_params(*id, spec, &m),
                }
            }
        }
    }
}

/// A validated scenario document.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: PopulationSpec,
    pub estimators: Vec<EstimatorEntry>,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub distribution: TrueDistribution,
    pub error_distribution: ErrorDistribution,
}

impl Scenario {
    /// Labels with concrete parameters for the scenario's population.
    pub fn resolved(&self) -> meerr_core::Result<Vec<(String, EstimatorConfig)>> {
        self.resolved_for(&self.spec)
    }

    pub fn resolved_for(
        &self,
        spec: &PopulationSpec,
    ) -> meerr_core::Result<Vec<(String, EstimatorConfig)>> {
        self.estimators
            .iter()
            .map(|e| Ok((e.label.clone(), e.resolve(spec)?)))
            .collect()
    }

    pub fn simulation(&self) -> meerr_core::Result<SimulationScenario> {
        let configs = self.resolved()?.into_iter().map(|(_, c)| c).collect();
        let mut sc =
            SimulationScenario::new(self.spec.clone(), self.n, self.replications, self.seed)
                .with_estimators(configs);
        sc.distribution = self.distribution;
        sc.error_distribution = self.error_distribution;
        Ok(sc)
    }
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ConfigDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Malformed {
            path: if path == "." { "$".into() } else { path },
            message: e.into_inner().to_string(),
        }
    })?;
    from_document(&doc)
}

/// Validates an already deserialized document.
pub fn from_document(doc: &ConfigDocument) -> Result<Scenario, ConfigError> {
    let mut issues = Vec::new();
    let mut issue = |path: String, message: String| issues.push(SchemaIssue { path, message });

    let pop = &doc.population;
    let p = pop.mu.len();
    let mut shape_ok = true;
    for (name, len) in [
        ("c", pop.c.len()),
        ("c_err", pop.c_err.len()),
        ("rho0", pop.rho0.len()),
        ("rho", pop.rho.len()),
    ] {
        if len != p {
            issue(
                format!("population.{name}"),
                format!("length {len}, expected {p} (the length of population.mu)"),
            );
            shape_ok = false;
        }
    }
    for (i, row) in pop.rho.iter().enumerate() {
        if row.len() != p {
            issue(
                format!("population.rho[{i}]"),
                format!("length {}, expected {p}", row.len()),
            );
            shape_ok = false;
        }
    }
    let spec = PopulationSpec {
        mu0: pop.mu0,
        mu: pop.mu.clone(),
        c0: pop.c0,
        c: pop.c.clone(),
        c0_err: pop.c0_err,
        c_err: pop.c_err.clone(),
        rho0: pop.rho0.clone(),
        rho: if shape_ok {
            DMatrix::from_fn(p, p, |i, j| pop.rho[i][j])
        } else {
            DMatrix::zeros(0, 0)
        },
    };
    if shape_ok {
        for v in validate_spec(&spec).violations {
            let path = if v.field.is_empty() {
                "population".to_string()
            } else {
                format!("population.{}", v.field)
            };
            issue(path, v.message);
        }
    }

    if doc.estimators.is_empty() {
        issue(
            "estimators".into(),
            "at least one estimator is required".into(),
        );
    }
    let mut estimators = Vec::with_capacity(doc.estimators.len());
    for (k, e) in doc.estimators.iter().enumerate() {
        let at = |field: &str| format!("estimators[{k}].{field}");
        let id: MemberId = match e.id.parse() {
            Ok(id) => id,
            Err(err) => {
                issue(at("id"), err.to_string());
                continue;
            }
        };
        let kind = if e.optimal {
            let stray = [
                ("omega", e.omega.is_some()),
                ("alpha", e.alpha.is_some()),
                ("theta", e.theta.is_some()),
            ];
            for (name, present) in stray {
                if present {
                    issue(at(name), "must be omitted when optimal is true".into());
                }
            }
            match (id, e.q) {
                (MemberId::Plain, _) => {
                    issue(at("optimal"), "PLAIN has no parameters to optimize".into());
                    continue;
                }
                (MemberId::M11, None) => {
                    issue(at("q"), "q is required for M11".into());
                    continue;
                }
                (MemberId::M11, Some(q)) if q == 0 || q >= p => {
                    issue(at("q"), format!("q = {q} must satisfy 1 <= q < p = {p}"));
                    continue;
                }
                (MemberId::M11, q) => EntryKind::Optimal { id, q },
                (_, Some(_)) => {
                    issue(at("q"), "q is only used by M11".into());
                    continue;
                }
                (_, None) => EntryKind::Optimal { id, q: None },
            }
        } else {
            let config = EstimatorConfig {
                id,
                omega: e.omega.clone(),
                alpha: e.alpha.clone(),
                theta: e.theta.clone(),
                q: e.q,
            };
            if let Err(err) = config.validate(p) {
                let reason = match err {
                    meerr_core::Error::InvalidConfig { reason, .. } => reason,
                    other => other.to_string(),
                };
                issue(at(field_of(&reason)), reason);
                continue;
            }
            EntryKind::Fixed(config)
        };
        let mut entry = EstimatorEntry {
            label: String::new(),
            kind,
        };
        entry.label = match &e.label {
            Some(l) if l.trim().is_empty() => {
                issue(at("label"), "label must not be empty".into());
                continue;
            }
            Some(l) => l.clone(),
            None => entry.default_label(),
        };
        if estimators
            .iter()
            .any(|x: &EstimatorEntry| x.label == entry.label)
        {
            issue(
                format!("estimators[{k}]"),
                format!("duplicate label {:?}; set a distinct label", entry.label),
            );
            continue;
        }
        estimators.push(entry);
    }

    let sim = &doc.simulation;
    if sim.n < 2 {
        issue(
            "simulation.n".into(),
            format!("n = {} must be at least 2", sim.n),
        );
    }
    if sim.replications < meerr_core::sim::MIN_REPLICATIONS {
        issue(
            "simulation.replications".into(),
            format!(
                "{} below the minimum of {}",
                sim.replications,
                meerr_core::sim::MIN_REPLICATIONS
            ),
        );
    }
    let distribution = match sim.distribution {
        DistributionTag::Gaussian => TrueDistribution::Gaussian,
        DistributionTag::Lognormal => {
            if pop.mu0 <= 0.0 || pop.mu.iter().any(|m| *m <= 0.0) {
                issue(
                    "simulation.distribution".into(),
                    "lognormal requires all means positive".into(),
                );
            }
            TrueDistribution::Lognormal
        }
    };

    if !issues.is_empty() {
        return Err(ConfigError::Schema(issues));
    }
    Ok(Scenario {
        spec,
        estimators,
        n: sim.n,
        replications: sim.replications,
        seed: sim.seed,
        distribution,
        error_distribution: ErrorDistribution::Gaussian,
    })
}

/// The parameter a validation message refers to; messages start with it.
fn field_of(reason: &str) -> &'static str {
    ["omega", "alpha", "theta", "q"]
        .into_iter()
        .find(|f| {
            reason
                .strip_prefix(f)
                .is_some_and(|rest| rest.starts_with(' '))
        })
        .unwrap_or(if reason.starts_with("M17 weights") {
            "omega"
        } else {
            "id"
        })
}

/// Document form of a scenario.
pub fn to_document(s: &Scenario) -> ConfigDocument {
    let p = s.spec.p();
    ConfigDocument {
        population: PopulationDoc {
            mu0: s.spec.mu0,
            mu: s.spec.mu.clone(),
            c0: s.spec.c0,
            c: s.spec.c.clone(),
            c0_err: s.spec.c0_err,
            c_err: s.spec.c_err.clone(),
            rho0: s.spec.rho0.clone(),
            rho: (0..p)
                .map(|i| (0..p).map(|j| s.spec.rho[(i, j)]).collect())
                .collect(),
        },
        estimators: s
            .estimators
            .iter()
            .map(|e| {
                let label = (e.label != e.default_label()).then(|| e.label.clone());
                match &e.kind {
                    EntryKind::Fixed(c) => EstimatorDoc {
                        id: c.id.to_string(),
                        omega: c.omega.clone(),
                        alpha: c.alpha.clone(),
                        theta: c.theta.clone(),
                        q: c.q,
                        optimal: false,
                        label,
                    },
                    EntryKind::Optimal { id, q } => EstimatorDoc {
                        id: id.to_string(),
                        omega: None,
                        alpha: None,
                        theta: None,
                        q: *q,
                        optimal: true,
                        label,
                    },
                }
            })
            .collect(),
        simulation: SimulationDoc {
            n: s.n,
            replications: s.replications,
            seed: s.seed,
            distribution: match s.distribution {
                TrueDistribution::Gaussian => DistributionTag::Gaussian,
                TrueDistribution::Lognormal => DistributionTag::Lognormal,
            },
            error_distribution: ErrorDistributionTag::Gaussian,
        },
    }
}

/// Pretty-printed JSON that [`parse_config`] reads back to the same scenario.
pub fn emit(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&to_document(s)).expect("documents serialize");
    out.push('\n');
    out
}
