use thiserror::Error;

/// Which end of a curve's domain a limit argument ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Lower => write!(f, "lower bound of lottery"),
            Bound::Upper => write!(f, "upper bound of lottery"),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("curves live on different domains: [{lo_a}, {hi_a}] vs [{lo_b}, {hi_b}]")]
    DomainMismatch { lo_a: f64, hi_a: f64, lo_b: f64, hi_b: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step curves are not supported here: {0}")]
    UnsupportedStep(&'static str),

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("root is not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    RootNotBracketed { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("root finder did not converge on [{lo}, {hi}]")]
    RootNonConvergence { lo: f64, hi: f64 },

    #[error("density is not normalized: total mass {mass}")]
    NotNormalized { mass: f64 },

    #[error("target {target} sits at the {bound}; no finite risk-aversion coefficient reaches it")]
    TargetAtBound { target: f64, bound: Bound },

    #[error("target {target} needs |gamma| * span beyond {cap}")]
    UnattainableTarget { target: f64, cap: f64 },

    #[error("curvature is undefined at the kink x = {x}")]
    UndefinedCurvature { x: f64 },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cell ({row}, {col}): {source}")]
    Cell {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("first curve does not dominate the second")]
    NotDominant,

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
