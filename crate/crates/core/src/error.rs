use thiserror::Error;

use crate::estimators::MemberId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid population spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),

    #[error("invalid estimator config for {member}: {reason}")]
    InvalidConfig { member: MemberId, reason: String },

    /// An estimator could not be evaluated at the given sample means.
    #[error("evaluation domain error in {member}{}: {reason}", variate_suffix(*.variate))]
    Domain {
        member: MemberId,
        /// Zero-based index of the offending auxiliary, when one is to blame.
        variate: Option<usize>,
        reason: &'static str,
    },

    #[error("degenerate auxiliary correlation: {0} is singular")]
    Singular(&'static str),

    #[error("spec not PSD: {0}")]
    NotPsd(String),

    #[error("lognormal moment matching infeasible: {0}")]
    LognormalInfeasible(String),

    #[error("invalid simulation scenario: {0}")]
    InvalidScenario(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),
}

fn variate_suffix(variate: Option<usize>) -> String {
    match variate {
        Some(i) => format!(" (auxiliary {})", i + 1),
        None => String::new(),
    }
}
