//! Standard sets of named curves on a common domain, used by the property
//! suites and the CLI's built-in fixtures.

use super::{Curve, Domain, Role};
use crate::error::Result;

/// Affine map of a unit-domain coordinate onto `domain`.
fn at(domain: Domain, t: f64) -> f64 {
    domain.lo + t * domain.span()
}

/// Nine continuous lotteries spanning symmetric, skewed, concave, convex
/// and kinked shapes.
pub fn lotteries(domain: Domain) -> Result<Vec<(String, Curve)>> {
    let s = domain.span();
    let curves = vec![
        ("uniform".to_string(), Curve::uniform(domain)?),
        ("triangular(mid)".to_string(), Curve::symmetric_triangular(domain)?),
        (
            "triangular(0.3)".to_string(),
            Curve::triangular(domain, at(domain, 0.3))?,
        ),
        ("beta(2,8)".to_string(), Curve::scaled_beta(domain, 2.0, 8.0)?),
        ("beta(4,8)".to_string(), Curve::scaled_beta(domain, 4.0, 8.0)?),
        ("beta(2,3)".to_string(), Curve::scaled_beta(domain, 2.0, 3.0)?),
        ("beta(5,2)".to_string(), Curve::scaled_beta(domain, 5.0, 2.0)?),
        (
            "gaussian(0.55,0.15)".to_string(),
            Curve::truncated_gaussian(domain, at(domain, 0.55), 0.15 * s)?,
        ),
        ("exponential(4)".to_string(), Curve::exponential(domain, 4.0 / s)?),
        (
            "piecewise".to_string(),
            Curve::piecewise_linear(
                domain,
                vec![
                    [domain.lo, 0.0],
                    [at(domain, 0.25), 0.1],
                    [at(domain, 0.7), 0.8],
                    [domain.hi, 1.0],
                ],
            )?,
        ),
    ];
    Ok(curves
        .into_iter()
        .map(|(n, c)| (n, c.with_role(Role::Lottery)))
        .collect())
}

/// Nine continuous utilities: risk neutral, risk averse and risk seeking
/// exponentials, log wealth, and S-shaped members.
pub fn utilities(domain: Domain) -> Result<Vec<(String, Curve)>> {
    let s = domain.span();
    let curves = vec![
        ("linear".to_string(), Curve::linear(domain)?),
        ("exp(3)".to_string(), Curve::exponential(domain, 3.0 / s)?),
        ("exp(6)".to_string(), Curve::exponential(domain, 6.0 / s)?),
        ("exp(9)".to_string(), Curve::exponential(domain, 9.0 / s)?),
        ("exp(-2)".to_string(), Curve::exponential(domain, -2.0 / s)?),
        ("exp(0.5)".to_string(), Curve::exponential(domain, 0.5 / s)?),
        ("log(w=1)".to_string(), Curve::log_wealth(domain, s - domain.lo)?),
        (
            "log(w=10)".to_string(),
            Curve::log_wealth(domain, 10.0 * s - domain.lo)?,
        ),
        (
            "gaussian(0.4,0.2)".to_string(),
            Curve::truncated_gaussian(domain, at(domain, 0.4), 0.2 * s)?,
        ),
        ("beta(3,3)".to_string(), Curve::scaled_beta(domain, 3.0, 3.0)?),
    ];
    Ok(curves
        .into_iter()
        .map(|(n, c)| (n, c.with_role(Role::Utility)))
        .collect())
}
