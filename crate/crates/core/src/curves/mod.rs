//! Normalized nondecreasing curves on a bounded domain.
//!
//! The same type stores a cumulative distribution `F` (a lottery) and a
//! normalized utility function `U`: both rise from 0 at the lower bound to
//! 1 at the upper bound, and both have a nonnegative density that
//! integrates to one. Which role a curve plays is decided by the caller;
//! [`Role`] is only a reporting hint.

pub mod catalog;

use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::numerics::{self, find_root, QuadratureSpec, RootBracket};

/// Closed outcome interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "domain needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Evenly spaced grid of `n >= 2` points including both bounds.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let h = self.span() / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { self.hi } else { self.lo + h * i as f64 })
            .collect()
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    pub(crate) fn ensure_same(&self, other: &Domain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                lo_a: self.lo,
                hi_a: self.hi,
                lo_b: other.lo,
                hi_b: other.hi,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Lottery,
    Utility,
}

/// Parametric family and its parameters. Parameters are in outcome units
/// unless noted; `scaled_beta` maps the standard Beta on `[0, 1]` affinely
/// onto the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Uniform,
    Linear,
    Triangular {
        mode: f64,
    },
    ScaledBeta {
        alpha: f64,
        beta: f64,
    },
    /// `(1 − e^{−γ(x−a)}) / (1 − e^{−γ(b−a)})`; γ < 0 is risk seeking.
    ExponentialNormalized {
        gamma: f64,
    },
    TruncatedGaussian {
        mu: f64,
        sigma: f64,
    },
    /// `ln(w + x)` renormalized onto the domain; needs `w + a > 0`.
    LogWealth {
        wealth: f64,
    },
    Step {
        at: f64,
    },
    /// `(x, value)` knots, first at `(a, 0)` and last at `(b, 1)`.
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
}

/// Risk tolerance `1/γ` or spread tolerance; infinite means "no curvature".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Tolerance {
    Finite(f64),
    Infinite,
}

impl Tolerance {
    /// `−½ · variance / tolerance`, zero for infinite tolerance.
    pub fn correction(&self, variance: f64) -> f64 {
        match self {
            Tolerance::Finite(t) => -0.5 * variance / t,
            Tolerance::Infinite => 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Tolerance::Finite(t) => *t,
            Tolerance::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Tolerance::Infinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Norm {
    c0: f64,
    c1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    domain: Domain,
    #[serde(flatten)]
    kind: CurveKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    role: Option<Role>,
    #[serde(skip)]
    norm: Norm,
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

// Normalized exponential with s > 0 on [0, span].
fn exp_value_pos(s: f64, y: f64, span: f64) -> f64 {
    (-s * y).exp_m1() / (-s * span).exp_m1()
}

fn exp_density_pos(s: f64, y: f64, span: f64) -> f64 {
    s * (-s * y).exp() / -(-s * span).exp_m1()
}

fn exp_quantile_pos(s: f64, p: f64, span: f64) -> f64 {
    (-(p * (-s * span).exp_m1()).ln_1p() / s).clamp(0.0, span)
}

/// Smallest floating-point `x` in `[a, b]` with `value(x) ≥ p`, starting
/// from a root estimate `r`. Where the computed value is flat the root
/// finder may stop anywhere on the plateau; this walks to its left edge.
fn leftmost_at_least(value: impl Fn(f64) -> f64, p: f64, r: f64, a: f64, b: f64) -> f64 {
    let tiny = f64::EPSILON * (b - a).max(f64::MIN_POSITIVE);
    let mut hi = r;
    let mut step = tiny;
    while value(hi) < p {
        if hi >= b {
            return b;
        }
        hi = (r + step).min(b);
        step *= 2.0;
    }
    let mut lo = hi;
    step = tiny;
    loop {
        if lo <= a {
            if value(a) >= p {
                return a;
            }
            lo = a;
            break;
        }
        lo = (hi - step).max(a);
        if value(lo) < p {
            break;
        }
        hi = lo;
        step *= 2.0;
    }
    // value(lo) < p <= value(hi)
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if value(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

impl Curve {
    pub fn new(domain: Domain, kind: CurveKind) -> Result<Self> {
        let domain = Domain::new(domain.lo, domain.hi)?;
        let (a, b) = (domain.lo, domain.hi);
        let mut norm = Norm::default();
        match &kind {
            CurveKind::Uniform | CurveKind::Linear => {}
            CurveKind::Triangular { mode } => {
                if !(mode.is_finite() && domain.contains(*mode)) {
                    return Err(invalid(format!("triangular mode {mode} outside [{a}, {b}]")));
                }
            }
            CurveKind::ScaledBeta { alpha, beta } => {
                if !(alpha.is_finite() && beta.is_finite() && *alpha >= 1.0 && *beta >= 1.0) {
                    return Err(invalid(format!(
                        "scaled_beta needs finite alpha, beta >= 1, got ({alpha}, {beta})"
                    )));
                }
                norm.c0 = ln_beta(*alpha, *beta);
            }
            CurveKind::ExponentialNormalized { gamma } => {
                if *gamma == 0.0 {
                    return Err(invalid("gamma = 0 is the linear kind; use `linear` instead".into()));
                }
                if !gamma.is_finite() {
                    return Err(invalid(format!("gamma must be finite, got {gamma}")));
                }
            }
            CurveKind::TruncatedGaussian { mu, sigma } => {
                if !(mu.is_finite() && sigma.is_finite() && *sigma > 0.0) {
                    return Err(invalid(format!(
                        "truncated_gaussian needs finite mu and sigma > 0, got ({mu}, {sigma})"
                    )));
                }
                let lo = std_normal_cdf((a - mu) / sigma);
                let mass = std_normal_cdf((b - mu) / sigma) - lo;
                if !(mass > 0.0) {
                    return Err(invalid(format!("truncated_gaussian has no mass on [{a}, {b}]")));
                }
                norm = Norm { c0: lo, c1: mass };
            }
            CurveKind::LogWealth { wealth } => {
                if !(wealth.is_finite() && wealth + a > 0.0) {
                    return Err(invalid(format!(
                        "log_wealth needs wealth + lo > 0, got wealth {wealth}"
                    )));
                }
                norm.c0 = ((b - a) / (wealth + a)).ln_1p();
            }
            CurveKind::Step { at } => {
                if !(at.is_finite() && domain.contains(*at)) {
                    return Err(invalid(format!("step location {at} outside [{a}, {b}]")));
                }
            }
            CurveKind::PiecewiseLinear { knots } => validate_knots(knots, &domain)?,
        }
        Ok(Self {
            domain,
            kind,
            role: None,
            norm,
        })
    }

    pub fn uniform(domain: Domain) -> Result<Self> {
        Self::new(domain, CurveKind::Uniform)
    }

    pub fn linear(domain: Domain) -> Result<Self> {
        Self::new(domain, CurveKind::Linear)
    }

    pub fn triangular(domain: Domain, mode: f64) -> Result<Self> {
        Self::new(domain, CurveKind::Triangular { mode })
    }

    pub fn symmetric_triangular(domain: Domain) -> Result<Self> {
        Self::triangular(domain, domain.midpoint())
    }

    pub fn scaled_beta(domain: Domain, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(domain, CurveKind::ScaledBeta { alpha, beta })
    }

    pub fn exponential(domain: Domain, gamma: f64) -> Result<Self> {
        Self::new(domain, CurveKind::ExponentialNormalized { gamma })
    }

    /// Exponential curve parameterized by risk tolerance `ρ = 1/γ`.
    pub fn exponential_with_tolerance(domain: Domain, risk_tolerance: f64) -> Result<Self> {
        if !(risk_tolerance.is_finite() && risk_tolerance != 0.0) {
            return Err(invalid(format!(
                "risk tolerance must be finite and nonzero, got {risk_tolerance}"
            )));
        }
        Self::exponential(domain, 1.0 / risk_tolerance)
    }

    /// Exponential for any γ, falling back to the linear kind at γ = 0.
    pub fn exponential_or_linear(domain: Domain, gamma: f64) -> Result<Self> {
        if gamma == 0.0 {
            Self::linear(domain)
        } else {
            Self::exponential(domain, gamma)
        }
    }

    pub fn truncated_gaussian(domain: Domain, mu: f64, sigma: f64) -> Result<Self> {
        Self::new(domain, CurveKind::TruncatedGaussian { mu, sigma })
    }

    pub fn log_wealth(domain: Domain, wealth: f64) -> Result<Self> {
        Self::new(domain, CurveKind::LogWealth { wealth })
    }

    pub fn step(domain: Domain, at: f64) -> Result<Self> {
        Self::new(domain, CurveKind::Step { at })
    }

    pub fn piecewise_linear(domain: Domain, knots: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(domain, CurveKind::PiecewiseLinear { knots })
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = Some(role);
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn role(&self) -> Option<Role> {
        self.role
    }

    pub fn is_step(&self) -> bool {
        matches!(self.kind, CurveKind::Step { .. })
    }

    pub fn step_location(&self) -> Option<f64> {
        match self.kind {
            CurveKind::Step { at } => Some(at),
            _ => None,
        }
    }

    /// γ for exponential curves.
    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            CurveKind::ExponentialNormalized { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Interior points where the curve's density is not smooth.
    pub fn knots(&self) -> Vec<f64> {
        let (a, b) = (self.domain.lo, self.domain.hi);
        match &self.kind {
            CurveKind::Triangular { mode } if *mode > a && *mode < b => vec![*mode],
            CurveKind::Step { at } => vec![*at],
            CurveKind::PiecewiseLinear { knots } => knots.iter().map(|k| k[0]).filter(|&x| x > a && x < b).collect(),
            _ => Vec::new(),
        }
    }

    /// Curve value at `x`.
    pub fn value(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        Ok(self.value_at(x))
    }

    /// Density (derivative of the value). Step curves have no density.
    pub fn density(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        if self.is_step() {
            return Err(Error::UnsupportedStep("a step curve has a point-mass density"));
        }
        Ok(self.density_at(x))
    }

    /// Derivative of the density, `f′(x)` or `u′(x)`.
    pub fn density_slope(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        let (a, b) = (self.domain.lo, self.domain.hi);
        let span = b - a;
        let y = x - a;
        Ok(match &self.kind {
            CurveKind::Uniform | CurveKind::Linear => 0.0,
            CurveKind::Triangular { mode } => {
                let c = *mode;
                if x == c && c > a && c < b {
                    return Err(Error::UndefinedCurvature { x });
                }
                if x < c {
                    2.0 / (span * (c - a))
                } else {
                    -2.0 / (span * (b - c))
                }
            }
            CurveKind::ScaledBeta { alpha, beta } => {
                let t = y / span;
                let rise = if *alpha == 1.0 {
                    0.0
                } else {
                    (alpha - 1.0) * t.powf(alpha - 2.0) * (1.0 - t).powf(beta - 1.0)
                };
                let fall = if *beta == 1.0 {
                    0.0
                } else {
                    (beta - 1.0) * t.powf(alpha - 1.0) * (1.0 - t).powf(beta - 2.0)
                };
                (rise - fall) * (-self.norm.c0).exp() / (span * span)
            }
            CurveKind::ExponentialNormalized { gamma } => -gamma * self.density_at(x),
            CurveKind::TruncatedGaussian { mu, sigma } => -(x - mu) / (sigma * sigma) * self.density_at(x),
            CurveKind::LogWealth { wealth } => -1.0 / ((wealth + x).powi(2) * self.norm.c0),
            CurveKind::Step { .. } => {
                return Err(Error::UnsupportedStep("a step curve has no density slope"));
            }
            CurveKind::PiecewiseLinear { knots } => {
                if knots.iter().any(|k| k[0] == x && x > a && x < b) {
                    return Err(Error::UndefinedCurvature { x });
                }
                0.0
            }
        })
    }

    /// `−f(x)/f′(x)`: risk tolerance when the curve is a utility, spread
    /// tolerance when it is a lottery. Zero slope gives the infinite
    /// sentinel.
    pub fn curvature_tolerance(&self, x: f64) -> Result<Tolerance> {
        if let CurveKind::ExponentialNormalized { gamma } = self.kind {
            self.domain.check(x)?;
            return Ok(Tolerance::Finite(1.0 / gamma));
        }
        let slope = self.density_slope(x)?;
        if slope == 0.0 {
            return Ok(Tolerance::Infinite);
        }
        Ok(Tolerance::Finite(-self.density_at(x) / slope))
    }

    /// Generalized inverse `inf{x : value(x) >= p}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("probability level {p} outside [0, 1]")));
        }
        let (a, b) = (self.domain.lo, self.domain.hi);
        let span = b - a;
        if p == 0.0 {
            return Ok(a);
        }
        let x = match &self.kind {
            CurveKind::Uniform | CurveKind::Linear => a + p * span,
            CurveKind::Triangular { mode } => {
                let c = *mode;
                if p <= (c - a) / span {
                    a + (p * span * (c - a)).sqrt()
                } else {
                    b - ((1.0 - p) * span * (b - c)).sqrt()
                }
            }
            CurveKind::ExponentialNormalized { gamma } => {
                if *gamma > 0.0 {
                    a + exp_quantile_pos(*gamma, p, span)
                } else {
                    b - exp_quantile_pos(-gamma, 1.0 - p, span)
                }
            }
            CurveKind::LogWealth { wealth } => a + (wealth + a) * (p * self.norm.c0).exp_m1(),
            CurveKind::Step { at } => *at,
            CurveKind::PiecewiseLinear { knots } => {
                let k = knots.iter().position(|k| k[1] >= p).unwrap_or(knots.len() - 1);
                let (x1, y1) = (knots[k][0], knots[k][1]);
                if k == 0 {
                    x1
                } else {
                    let (x0, y0) = (knots[k - 1][0], knots[k - 1][1]);
                    x0 + (p - y0) / (y1 - y0) * (x1 - x0)
                }
            }
            CurveKind::ScaledBeta { .. } | CurveKind::TruncatedGaussian { .. } => {
                let r = find_root(|x| self.value_at(x) - p, RootBracket::with_tolerance(a, b, 0.0)?)?;
                leftmost_at_least(|x| self.value_at(x), p, r, a, b)
            }
        };
        Ok(x.clamp(a, b))
    }

    /// Mean and variance of the density.
    pub fn density_moments(&self, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let k = self.cumulants(2, spec)?;
        Ok((k[0], k[1]))
    }

    /// Cumulants of the density; a step curve is a point mass.
    pub fn cumulants(&self, order: usize, spec: &QuadratureSpec) -> Result<Vec<f64>> {
        if let Some(at) = self.step_location() {
            if order == 0 || order > numerics::MAX_CUMULANT_ORDER {
                return Err(invalid(format!("cumulant order {order} out of range")));
            }
            let mut k = vec![0.0; order];
            k[0] = at;
            return Ok(k);
        }
        numerics::cumulants(
            |x| self.density_at(x),
            self.domain.lo,
            self.domain.hi,
            order,
            &self.knots(),
            spec,
        )
    }

    /// Value with `x` clamped into the domain; for integrands.
    pub(crate) fn value_at(&self, x: f64) -> f64 {
        let (a, b) = (self.domain.lo, self.domain.hi);
        let x = x.clamp(a, b);
        let span = b - a;
        let y = x - a;
        match &self.kind {
            CurveKind::Uniform | CurveKind::Linear => y / span,
            CurveKind::Triangular { mode } => {
                let c = *mode;
                if x <= c && c > a {
                    y * y / (span * (c - a))
                } else if c < b {
                    1.0 - (b - x).powi(2) / (span * (b - c))
                } else {
                    1.0
                }
            }
            CurveKind::ScaledBeta { alpha, beta } => beta_reg(*alpha, *beta, (y / span).clamp(0.0, 1.0)),
            CurveKind::ExponentialNormalized { gamma } => {
                if *gamma > 0.0 {
                    exp_value_pos(*gamma, y, span)
                } else {
                    1.0 - exp_value_pos(-gamma, b - x, span)
                }
            }
            CurveKind::TruncatedGaussian { mu, sigma } => {
                ((std_normal_cdf((x - mu) / sigma) - self.norm.c0) / self.norm.c1).clamp(0.0, 1.0)
            }
            CurveKind::LogWealth { wealth } => (y / (wealth + a)).ln_1p() / self.norm.c0,
            CurveKind::Step { at } => {
                if x >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            CurveKind::PiecewiseLinear { knots } => interpolate(knots, x),
        }
    }

    /// Density with `x` clamped into the domain; NaN for step curves.
    pub(crate) fn density_at(&self, x: f64) -> f64 {
        let (a, b) = (self.domain.lo, self.domain.hi);
        let x = x.clamp(a, b);
        let span = b - a;
        let y = x - a;
        match &self.kind {
            CurveKind::Uniform | CurveKind::Linear => 1.0 / span,
            CurveKind::Triangular { mode } => {
                let c = *mode;
                if x < c || c == b {
                    2.0 * y / (span * (c - a))
                } else {
                    2.0 * (b - x) / (span * (b - c))
                }
            }
            CurveKind::ScaledBeta { alpha, beta } => {
                let t = y / span;
                t.powf(alpha - 1.0) * (1.0 - t).powf(beta - 1.0) * (-self.norm.c0).exp() / span
            }
            CurveKind::ExponentialNormalized { gamma } => {
                if *gamma > 0.0 {
                    exp_density_pos(*gamma, y, span)
                } else {
                    exp_density_pos(-gamma, b - x, span)
                }
            }
            CurveKind::TruncatedGaussian { mu, sigma } => std_normal_pdf((x - mu) / sigma) / (sigma * self.norm.c1),
            CurveKind::LogWealth { wealth } => 1.0 / ((wealth + x) * self.norm.c0),
            CurveKind::Step { .. } => f64::NAN,
            CurveKind::PiecewiseLinear { knots } => {
                let k = match knots.iter().position(|k| k[0] > x) {
                    Some(0) => 1,
                    Some(k) => k,
                    None => knots.len() - 1,
                };
                (knots[k][1] - knots[k - 1][1]) / (knots[k][0] - knots[k - 1][0])
            }
        }
    }
}

fn interpolate(knots: &[[f64; 2]], x: f64) -> f64 {
    match knots.iter().position(|k| k[0] >= x) {
        None => 1.0,
        Some(0) => knots[0][1],
        Some(k) => {
            let ([x0, y0], [x1, y1]) = (knots[k - 1], knots[k]);
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

fn validate_knots(knots: &[[f64; 2]], domain: &Domain) -> Result<()> {
    if knots.len() < 2 {
        return Err(invalid("piecewise_linear needs at least two knots".into()));
    }
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if first != [domain.lo, 0.0] || last != [domain.hi, 1.0] {
        return Err(invalid(format!(
            "piecewise_linear must start at ({}, 0) and end at ({}, 1)",
            domain.lo, domain.hi
        )));
    }
    for w in knots.windows(2) {
        if !(w[1][0] > w[0][0]) {
            return Err(invalid("piecewise_linear knot positions must strictly increase".into()));
        }
        if !(w[1][1] >= w[0][1]) {
            return Err(invalid("piecewise_linear knot values must be nondecreasing".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        Domain::unit()
    }

    #[test]
    fn exponential_value_closed_form() {
        let d = Domain::new(0.0, 200.0).unwrap();
        let u = Curve::exponential(d, 0.03).unwrap();
        let expected = (1.0 - (-3.0f64).exp()) / (1.0 - (-6.0f64).exp());
        assert!((u.value(100.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.9525).abs() < 1e-4);
    }

    #[test]
    fn uniform_value() {
        assert_eq!(Curve::uniform(unit()).unwrap().value(0.25).unwrap(), 0.25);
    }

    #[test]
    fn step_value_and_quantile() {
        let d = Domain::new(0.0, 10.0).unwrap();
        let s = Curve::step(d, 5.0).unwrap();
        assert_eq!(s.value(4.9).unwrap(), 0.0);
        assert_eq!(s.value(5.0).unwrap(), 1.0);
        for p in [1e-9, 0.3, 1.0] {
            assert_eq!(s.quantile(p).unwrap(), 5.0);
        }
        assert!(matches!(s.density(5.0), Err(Error::UnsupportedStep(_))));
        let (m, v) = s.density_moments(&QuadratureSpec::default()).unwrap();
        assert_eq!((m, v), (5.0, 0.0));
    }

    #[test]
    fn value_outside_domain_is_an_error() {
        let u = Curve::uniform(unit()).unwrap();
        assert!(matches!(u.value(1.5), Err(Error::OutsideDomain { .. })));
        assert!(u.density(-0.1).is_err());
    }

    #[test]
    fn exponential_density_at_lower_bound() {
        let u = Curve::exponential(unit(), 5.0).unwrap();
        let expected = 5.0 / (1.0 - (-5.0f64).exp());
        assert!((u.density(0.0).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 5.034).abs() < 1e-3);
    }

    #[test]
    fn symmetric_triangular_peak() {
        let d = Domain::new(0.0, 200.0).unwrap();
        let t = Curve::symmetric_triangular(d).unwrap();
        assert!((t.density(100.0).unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn beta_2_3_density_matches_polynomial() {
        let f = Curve::scaled_beta(unit(), 2.0, 3.0).unwrap();
        for x in [0.0, 0.1, 0.19, 0.5, 0.77, 1.0] {
            let expected = 12.0 * x * (1.0f64 - x).powi(2);
            assert!((f.density(x).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn quantiles() {
        assert!((Curve::uniform(unit()).unwrap().quantile(0.5).unwrap() - 0.5).abs() < 1e-15);
        let d = Domain::new(0.0, 200.0).unwrap();
        let t = Curve::symmetric_triangular(d).unwrap();
        let q = t.quantile(0.101).unwrap();
        assert!((q - (0.101f64 * 20000.0).sqrt()).abs() < 1e-12);
        assert!((q - 44.9).abs() < 0.05);
    }

    #[test]
    fn density_moments_of_catalog_examples() {
        let spec = QuadratureSpec::default();
        let (m, v) = Curve::exponential(unit(), 5.0).unwrap().density_moments(&spec).unwrap();
        assert!((m - 0.19).abs() < 0.005);
        assert!((v - 0.033).abs() < 0.001);

        let d = Domain::new(2.0, 5.0).unwrap();
        let (m, v) = Curve::uniform(d).unwrap().density_moments(&spec).unwrap();
        assert!((m - 3.5).abs() < 1e-12);
        assert!((v - 9.0 / 12.0).abs() < 1e-12);

        let (m, _) = Curve::scaled_beta(unit(), 2.0, 8.0)
            .unwrap()
            .density_moments(&spec)
            .unwrap();
        assert!((m - 0.2).abs() < 1e-10);
    }

    #[test]
    fn gamma_zero_points_to_linear() {
        let err = Curve::exponential(unit(), 0.0).unwrap_err();
        assert!(err.to_string().contains("linear"));
        assert_eq!(
            Curve::exponential_or_linear(unit(), 0.0).unwrap().kind(),
            &CurveKind::Linear
        );
    }

    #[test]
    fn risk_seeking_exponential_is_well_defined() {
        let d = Domain::new(0.0, 200.0).unwrap();
        let u = Curve::exponential(d, -0.5).unwrap();
        assert_eq!(u.value(0.0).unwrap(), 0.0);
        assert!((u.value(200.0).unwrap() - 1.0).abs() < 1e-15);
        let x = u.quantile(0.3).unwrap();
        assert!((u.value(x).unwrap() - 0.3).abs() < 1e-12);
        assert!(u.density(199.0).unwrap().is_finite());
    }

    #[test]
    fn tiny_gamma_approaches_linear() {
        let e = Curve::exponential(unit(), 1e-6).unwrap();
        let worst = unit()
            .grid(1001)
            .into_iter()
            .map(|x| (e.value(x).unwrap() - x).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-5);
    }

    #[test]
    fn log_wealth_closed_forms() {
        let u = Curve::log_wealth(unit(), 1.0).unwrap();
        let x = 0.4;
        let expected = (1.4f64).ln() / 2.0f64.ln();
        assert!((u.value(x).unwrap() - expected).abs() < 1e-15);
        assert!((u.quantile(expected).unwrap() - x).abs() < 1e-12);
        match u.curvature_tolerance(x).unwrap() {
            Tolerance::Finite(t) => assert!((t - 1.4).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn piecewise_linear_generalized_inverse() {
        let c = Curve::piecewise_linear(unit(), vec![[0.0, 0.0], [0.2, 0.5], [0.6, 0.5], [1.0, 1.0]]).unwrap();
        // flat stretch at 0.5: smallest x reaching it
        assert!((c.quantile(0.5).unwrap() - 0.2).abs() < 1e-15);
        assert!((c.quantile(0.75).unwrap() - 0.8).abs() < 1e-15);
        assert!((c.value(0.1).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(c.density(0.3).unwrap(), 0.0);
        assert!(matches!(c.density_slope(0.2), Err(Error::UndefinedCurvature { .. })));
    }

    #[test]
    fn constructor_rejections() {
        assert!(Curve::scaled_beta(unit(), 0.5, 2.0).is_err());
        assert!(Curve::triangular(unit(), 1.5).is_err());
        assert!(Curve::truncated_gaussian(unit(), 0.5, 0.0).is_err());
        assert!(Curve::log_wealth(unit(), 0.0).is_err());
        assert!(Curve::step(unit(), 2.0).is_err());
        assert!(Curve::piecewise_linear(unit(), vec![[0.0, 0.0], [1.0, 0.9]]).is_err());
        assert!(Curve::piecewise_linear(unit(), vec![[0.0, 0.0], [0.5, 0.7], [0.5, 0.8], [1.0, 1.0]]).is_err());
        assert!(Domain::new(1.0, 1.0).is_err());
    }

    #[test]
    fn triangular_mode_is_a_kink() {
        let t = Curve::symmetric_triangular(unit()).unwrap();
        assert_eq!(t.knots(), vec![0.5]);
        assert!(matches!(
            t.curvature_tolerance(0.5),
            Err(Error::UndefinedCurvature { .. })
        ));
        assert!(t.curvature_tolerance(0.25).is_ok());
    }

    #[test]
    fn uniform_has_infinite_tolerance() {
        assert_eq!(
            Curve::uniform(unit()).unwrap().curvature_tolerance(0.3).unwrap(),
            Tolerance::Infinite
        );
        assert_eq!(
            Curve::linear(unit()).unwrap().curvature_tolerance(0.3).unwrap(),
            Tolerance::Infinite
        );
    }

    #[test]
    fn exponential_tolerance_is_constant() {
        let d = Domain::new(0.0, 200.0).unwrap();
        let u = Curve::exponential(d, 0.03).unwrap();
        for x in [1.0, 50.0, 199.0] {
            assert!((u.curvature_tolerance(x).unwrap().as_f64() - 100.0 / 3.0).abs() < 1e-12);
        }
    }
}
