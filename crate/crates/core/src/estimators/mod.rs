//! The eighteen catalogued members of the estimator family plus the plain
//! sample mean, as point-estimate functions of the sample means.
//!
//! Every member is a function `g(y_bar, u)` of the observed study mean and
//! the ratios `u_i = x_bar_i / mu_i`, calibrated so that `g(mu0, e) = mu0`.

mod optimum;
mod profile;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use optimum::{optimal_params, optimal_split_params};
pub use profile::{derivative_profile, numeric_profile, DerivativeProfile};

/// Tolerance on weight vectors that must sum to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Magnitudes below this are treated as zero denominators.
const TINY: f64 = 1e-300;

/// Stable external name of a family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemberId {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    M8,
    M9,
    M10,
    M11,
    M12,
    M13,
    M14,
    M15,
    M16,
    M17,
    M18,
    Plain,
}

impl MemberId {
    pub const ALL: [MemberId; 19] = [
        MemberId::M1,
        MemberId::M2,
        MemberId::M3,
        MemberId::M4,
        MemberId::M5,
        MemberId::M6,
        MemberId::M7,
        MemberId::M8,
        MemberId::M9,
        MemberId::M10,
        MemberId::M11,
        MemberId::M12,
        MemberId::M13,
        MemberId::M14,
        MemberId::M15,
        MemberId::M16,
        MemberId::M17,
        MemberId::M18,
        MemberId::Plain,
    ];

    /// The eighteen members with free parameters.
    pub fn members() -> impl Iterator<Item = MemberId> {
        Self::ALL.into_iter().filter(|m| *m != MemberId::Plain)
    }

    pub fn as_str(self) -> &'static str {
        use MemberId::*;
        match self {
            M1 => "M1",
            M2 => "M2",
            M3 => "M3",
            M4 => "M4",
            M5 => "M5",
            M6 => "M6",
            M7 => "M7",
            M8 => "M8",
            M9 => "M9",
            M10 => "M10",
            M11 => "M11",
            M12 => "M12",
            M13 => "M13",
            M14 => "M14",
            M15 => "M15",
            M16 => "M16",
            M17 => "M17",
            M18 => "M18",
            Plain => "PLAIN",
        }
    }

    fn params(self) -> ParamShape {
        use MemberId::*;
        match self {
            M1 | M2 | M3 | M4 | M5 | M6 | M7 | M8 => ParamShape::SIMPLEX,
            M9 | M10 => ParamShape {
                omega: Some(WeightLen::PPlusOne),
                ..ParamShape::NONE
            },
            M11 => ParamShape {
                q: true,
                ..ParamShape::SIMPLEX
            },
            M12 | M13 | M14 | M18 => ParamShape {
                alpha: true,
                ..ParamShape::NONE
            },
            M15 | M16 => ParamShape {
                theta: true,
                ..ParamShape::NONE
            },
            M17 => ParamShape {
                theta: true,
                ..ParamShape::SIMPLEX
            },
            Plain => ParamShape::NONE,
        }
    }
}

impl fmt::Display for MemberId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMember(pub String);

impl fmt::Display for UnknownMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown estimator id {:?} (expected M1..M18 or PLAIN)",
            self.0
        )
    }
}

impl std::error::Error for UnknownMember {}

impl FromStr for MemberId {
    type Err = UnknownMember;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        MemberId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownMember(s.to_string()))
    }
}

#[derive(Clone, Copy)]
enum WeightLen {
    P,
    PPlusOne,
}

#[derive(Clone, Copy)]
struct ParamShape {
    omega: Option<WeightLen>,
    alpha: bool,
    theta: bool,
    q: bool,
}

impl ParamShape {
    const NONE: ParamShape = ParamShape {
        omega: None,
        alpha: false,
        theta: false,
        q: false,
    };
    const SIMPLEX: ParamShape = ParamShape {
        omega: Some(WeightLen::P),
        ..ParamShape::NONE
    };
}

/// Which member to use and its parameters. Parameters a member does not use
/// must be `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub id: MemberId,
    pub omega: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub theta: Option<Vec<f64>>,
    /// Number of leading auxiliaries used in ratio form (M11 only).
    pub q: Option<usize>,
}

impl EstimatorConfig {
    pub fn plain() -> Self {
        Self::bare(MemberId::Plain)
    }

    fn bare(id: MemberId) -> Self {
        EstimatorConfig {
            id,
            omega: None,
            alpha: None,
            theta: None,
            q: None,
        }
    }

    pub fn with_omega(id: MemberId, omega: Vec<f64>) -> Self {
        EstimatorConfig {
            omega: Some(omega),
            ..Self::bare(id)
        }
    }

    pub fn with_alpha(id: MemberId, alpha: Vec<f64>) -> Self {
        EstimatorConfig {
            alpha: Some(alpha),
            ..Self::bare(id)
        }
    }

    pub fn with_theta(id: MemberId, theta: Vec<f64>) -> Self {
        EstimatorConfig {
            theta: Some(theta),
            ..Self::bare(id)
        }
    }

    /// M11 with the first `q` auxiliaries in ratio form.
    pub fn split(q: usize, omega: Vec<f64>) -> Self {
        EstimatorConfig {
            omega: Some(omega),
            q: Some(q),
            ..Self::bare(MemberId::M11)
        }
    }

    /// M17.
    pub fn power_mixture(omega: Vec<f64>, theta: Vec<f64>) -> Self {
        EstimatorConfig {
            omega: Some(omega),
            theta: Some(theta),
            ..Self::bare(MemberId::M17)
        }
    }

    /// Checks the parameters against the member's shape for `p` auxiliaries.
    pub fn validate(&self, p: usize) -> Result<()> {
        let shape = self.id.params();
        let fail = |reason: String| Error::InvalidConfig {
            member: self.id,
            reason,
        };

        match (shape.omega, &self.omega) {
            (None, Some(_)) => return Err(fail("omega is not used by this member".into())),
            (Some(_), None) => return Err(fail("omega is required".into())),
            (Some(len), Some(w)) => {
                let want = match len {
                    WeightLen::P => p,
                    WeightLen::PPlusOne => p + 1,
                };
                if w.len() != want {
                    return Err(fail(format!(
                        "omega has length {}, expected {want}",
                        w.len()
                    )));
                }
                if w.iter().any(|x| !x.is_finite()) {
                    return Err(fail("omega has non-finite entries".into()));
                }
                let sum: f64 = w.iter().sum();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(fail(format!("omega sums to {sum}, expected 1")));
                }
            }
            (None, None) => {}
        }
        for (name, used, value) in [
            ("alpha", shape.alpha, &self.alpha),
            ("theta", shape.theta, &self.theta),
        ] {
            match (used, value) {
                (false, Some(_)) => return Err(fail(format!("{name} is not used by this member"))),
                (true, None) => return Err(fail(format!("{name} is required"))),
                (true, Some(v)) => {
                    if v.len() != p {
                        return Err(fail(format!("{name} has length {}, expected {p}", v.len())));
                    }
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(fail(format!("{name} has non-finite entries")));
                    }
                }
                (false, None) => {}
            }
        }
        match (shape.q, self.q) {
            (false, Some(_)) => return Err(fail("q is not used by this member".into())),
            (true, None) => return Err(fail("q is required".into())),
            (true, Some(q)) if q == 0 || q >= p => {
                return Err(fail(format!("q = {q} must satisfy 1 <= q < p = {p}")))
            }
            _ => {}
        }
        if self.id == MemberId::M17 && self.omega().contains(&0.0) {
            return Err(fail("M17 weights must be nonzero".into()));
        }
        Ok(())
    }

    pub(crate) fn omega(&self) -> &[f64] {
        self.omega.as_deref().unwrap_or(&[])
    }

    pub(crate) fn alpha(&self) -> &[f64] {
        self.alpha.as_deref().unwrap_or(&[])
    }

    pub(crate) fn theta(&self) -> &[f64] {
        self.theta.as_deref().unwrap_or(&[])
    }
}

/// Sample means of the observed (error-contaminated) values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub y_bar: f64,
    pub x_bar: Vec<f64>,
    pub n: usize,
}

impl SampleSummary {
    /// Ratios `u_i = x_bar_i / mu_i`.
    pub fn ratios(&self, mu: &[f64]) -> Vec<f64> {
        self.x_bar.iter().zip(mu).map(|(x, m)| x / m).collect()
    }
}

struct Guard {
    member: MemberId,
}

impl Guard {
    fn err(&self, variate: Option<usize>, reason: &'static str) -> Error {
        Error::Domain {
            member: self.member,
            variate,
            reason,
        }
    }

    fn div(&self, num: f64, den: f64, variate: Option<usize>) -> Result<f64> {
        if !(den.abs() >= TINY) {
            return Err(self.err(variate, "zero denominator"));
        }
        self.finite(num / den, variate)
    }

    fn pow(&self, base: f64, exp: f64, variate: usize) -> Result<f64> {
        if exp == 0.0 {
            return Ok(1.0);
        }
        if base < 0.0 && exp.fract() != 0.0 {
            return Err(self.err(Some(variate), "non-integer power of a negative ratio"));
        }
        if base.abs() < TINY && exp < 0.0 {
            return Err(self.err(Some(variate), "negative power of a zero ratio"));
        }
        self.finite(base.powf(exp), Some(variate))
    }

    fn ln(&self, x: f64, variate: usize) -> Result<f64> {
        if x <= 0.0 {
            return Err(self.err(Some(variate), "logarithm of a nonpositive ratio"));
        }
        Ok(x.ln())
    }

    fn finite(&self, x: f64, variate: Option<usize>) -> Result<f64> {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(self.err(variate, "non-finite intermediate"))
        }
    }
}

/// Point estimate of `mu0` from the sample means.
pub fn evaluate(config: &EstimatorConfig, summary: &SampleSummary, mu: &[f64]) -> Result<f64> {
    let p = mu.len();
    config.validate(p)?;
    if summary.x_bar.len() != p {
        return Err(Error::Mismatch(format!(
            "sample has {} auxiliary means, expected {p}",
            summary.x_bar.len()
        )));
    }
    let g = Guard { member: config.id };
    let y = summary.y_bar;
    let xb = &summary.x_bar;
    let mut u = Vec::with_capacity(p);
    for i in 0..p {
        u.push(g.div(xb[i], mu[i], Some(i))?);
    }
    // mu_i / x_bar_i
    let inv = |i: usize| g.div(mu[i], xb[i], Some(i));
    let w = config.omega();
    let a = config.alpha();
    let t = config.theta();

    use MemberId::*;
    let value = match config.id {
        Plain => y,
        M1 => {
            let mut s = 0.0;
            for i in 0..p {
                s += w[i] * inv(i)?;
            }
            y * s
        }
        M2 => y * dot(w, &u),
        M3 => y * g.div(dot(w, mu), dot(w, xb), None)?,
        M4 => y * g.div(dot(w, xb), dot(w, mu), None)?,
        M5 => {
            let mut prod = 1.0;
            for i in 0..p {
                prod *= g.pow(inv(i)?, w[i], i)?;
            }
            y * prod
        }
        M6 => g.div(y, dot(w, &u), None)?,
        M7 => {
            let mut prod = 1.0;
            for i in 0..p {
                prod *= g.pow(u[i], w[i], i)?;
            }
            y * prod
        }
        M8 => {
            let mut s = 0.0;
            for i in 0..p {
                s += w[i] * inv(i)?;
            }
            g.div(y, s, None)?
        }
        M9 => {
            let mut s = w[p];
            for i in 0..p {
                s += w[i] * inv(i)?;
            }
            y * s
        }
        M10 => y * (w[p] + dot(&w[..p], &u)),
        M11 => {
            let q = config.q.unwrap_or(0);
            let mut s = 0.0;
            for i in 0..p {
                s += if i < q { w[i] * inv(i)? } else { w[i] * u[i] };
            }
            y * s
        }
        M12 => {
            let mut prod = 1.0;
            for i in 0..p {
                prod *= g.pow(u[i], a[i], i)?;
            }
            y * prod
        }
        M13 => {
            let mut prod = 1.0;
            for i in 0..p {
                prod *= 2.0 - g.pow(u[i], a[i], i)?;
            }
            y * prod
        }
        M14 => {
            let mut prod = 1.0;
            for i in 0..p {
                prod *= g.div(u[i], 1.0 + a[i] * (u[i] - 1.0), Some(i))?;
            }
            y * prod
        }
        M15 => {
            let mut s = 0.0;
            for i in 0..p {
                s += t[i] * g.ln(u[i], i)?;
            }
            y * s.exp()
        }
        M16 => y * dot(t, &u.iter().map(|v| v - 1.0).collect::<Vec<_>>()).exp(),
        M17 => {
            let mut s = 0.0;
            for i in 0..p {
                s += w[i] * g.pow(u[i], t[i] / w[i], i)?;
            }
            y * s
        }
        M18 => {
            y + a
                .iter()
                .zip(xb)
                .zip(mu)
                .map(|((a, x), m)| a * (x - m))
                .sum::<f64>()
        }
    };
    g.finite(value, None)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
