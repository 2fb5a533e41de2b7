//! JSON scenario files: a domain, named lotteries and utilities, and
//! command parameters.
//!
//! ```json
//! {
//!   "domain": {"lo": 0, "hi": 200, "unit": "$"},
//!   "lotteries": [{"name": "tri", "kind": "triangular"}],
//!   "utilities": [{"name": "exp", "kind": "exponential", "gamma": 0.03}]
//! }
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curves::{Curve, CurveKind, Domain, Role};
use crate::report::Reference;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario field `{path}`: {message}")]
    Schema { path: String, message: String },
}

impl ScenarioError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    lo: f64,
    hi: f64,
    #[serde(default)]
    unit: String,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawKind {
    Uniform,
    Linear,
    Triangular {
        #[serde(default)]
        mode: Option<f64>,
    },
    ScaledBeta {
        alpha: f64,
        beta: f64,
    },
    #[serde(alias = "exponential")]
    ExponentialNormalized {
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default)]
        risk_tolerance: Option<f64>,
    },
    TruncatedGaussian {
        mu: f64,
        sigma: f64,
    },
    LogWealth {
        wealth: f64,
    },
    Step {
        at: f64,
    },
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Deserialize)]
struct RawCurve {
    name: String,
    #[serde(flatten)]
    kind: RawKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaRange {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

/// Command parameters; each command reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Explicit risk-aversion grid for `sweep`.
    #[serde(default)]
    pub gamma_grid: Option<Vec<f64>>,
    /// Evenly spaced alternative to `gamma_grid`.
    #[serde(default)]
    pub gamma_range: Option<GammaRange>,
    /// Lottery used by single-lottery commands; defaults to the first.
    #[serde(default)]
    pub lottery: Option<String>,
    #[serde(default)]
    pub target: Option<f64>,
    #[serde(default)]
    pub old_lottery: Option<String>,
    #[serde(default)]
    pub new_lottery: Option<String>,
    /// Ordered pair for `dominance`, looked up among utilities then lotteries.
    #[serde(default)]
    pub compare: Option<[String; 2]>,
    #[serde(default)]
    pub terms: Option<usize>,
    #[serde(default)]
    pub fractile: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    description: Option<String>,
    domain: RawDomain,
    #[serde(default)]
    lotteries: Vec<RawCurve>,
    #[serde(default)]
    utilities: Vec<RawCurve>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    references: Vec<Reference>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub description: Option<String>,
    pub domain: Domain,
    pub unit: String,
    pub lotteries: Vec<(String, Curve)>,
    pub utilities: Vec<(String, Curve)>,
    pub params: Params,
    /// Published values printed next to the computed ones.
    pub references: Vec<Reference>,
}

fn build_curve(domain: Domain, raw: RawKind) -> Result<Curve, String> {
    let kind = match raw {
        RawKind::Uniform => CurveKind::Uniform,
        RawKind::Linear => CurveKind::Linear,
        RawKind::Triangular { mode } => CurveKind::Triangular {
            mode: mode.unwrap_or_else(|| domain.midpoint()),
        },
        RawKind::ScaledBeta { alpha, beta } => CurveKind::ScaledBeta { alpha, beta },
        RawKind::ExponentialNormalized { gamma, risk_tolerance } => match (gamma, risk_tolerance) {
            (Some(gamma), None) => CurveKind::ExponentialNormalized { gamma },
            (None, Some(rho)) => {
                return Curve::exponential_with_tolerance(domain, rho).map_err(|e| e.to_string());
            }
            _ => return Err("exponential needs exactly one of `gamma` or `risk_tolerance`".into()),
        },
        RawKind::TruncatedGaussian { mu, sigma } => CurveKind::TruncatedGaussian { mu, sigma },
        RawKind::LogWealth { wealth } => CurveKind::LogWealth { wealth },
        RawKind::Step { at } => CurveKind::Step { at },
        RawKind::PiecewiseLinear { knots } => CurveKind::PiecewiseLinear { knots },
    };
    Curve::new(domain, kind).map_err(|e| e.to_string())
}

fn build_list(
    domain: Domain,
    raw: Vec<RawCurve>,
    field: &str,
    role: Role,
) -> Result<Vec<(String, Curve)>, ScenarioError> {
    let mut seen = HashSet::new();
    raw.into_iter()
        .enumerate()
        .map(|(i, c)| {
            let path = format!("{field}[{i}]");
            if c.name.is_empty() {
                return Err(ScenarioError::schema(format!("{path}.name"), "name must not be empty"));
            }
            if !seen.insert(c.name.clone()) {
                return Err(ScenarioError::schema(
                    format!("{path}.name"),
                    format!("duplicate name `{}`", c.name),
                ));
            }
            let curve = build_curve(domain, c.kind).map_err(|m| ScenarioError::schema(path, m))?;
            Ok((c.name, curve.with_role(role)))
        })
        .collect()
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ScenarioError::schema(path, e.into_inner().to_string())
        })?;
        let domain =
            Domain::new(raw.domain.lo, raw.domain.hi).map_err(|e| ScenarioError::schema("domain", e.to_string()))?;
        let lotteries = build_list(domain, raw.lotteries, "lotteries", Role::Lottery)?;
        let utilities = build_list(domain, raw.utilities, "utilities", Role::Utility)?;
        if let Some(t) = raw.params.target {
            if !t.is_finite() {
                return Err(ScenarioError::schema("params.target", "target must be finite"));
            }
        }
        Ok(Self {
            description: raw.description,
            domain,
            unit: raw.domain.unit,
            lotteries,
            utilities,
            params: raw.params,
            references: raw.references,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn lottery(&self, name: &str) -> Option<&Curve> {
        self.lotteries.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn utility(&self, name: &str) -> Option<&Curve> {
        self.utilities.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}
