use super::quadrature::{integrate_with_knots, QuadratureSpec};
use crate::error::{Error, Result};

pub const MAX_CUMULANT_ORDER: usize = 8;
const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Cumulants `κ₁..κ_order` of a density on `[a, b]`.
///
/// Moments are taken about the mean so the recursion does not cancel
/// catastrophically on wide domains; cumulants of order two and up are
/// shift invariant and `κ₁` is shifted back.
pub fn cumulants<F: Fn(f64) -> f64>(
    density: F,
    a: f64,
    b: f64,
    order: usize,
    knots: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    if order == 0 || order > MAX_CUMULANT_ORDER {
        return Err(Error::InvalidParameter(format!(
            "cumulant order must be in 1..={MAX_CUMULANT_ORDER}, got {order}"
        )));
    }
    let mass = integrate_with_knots(&density, a, b, knots, spec)?;
    if (mass - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { mass });
    }
    let mean = integrate_with_knots(|x| x * density(x), a, b, knots, spec)?;

    // central moments mu[0..=order], mu[0] = 1
    let mut mu = vec![1.0; order + 1];
    for (k, m) in mu.iter_mut().enumerate().skip(1) {
        *m = integrate_with_knots(|x| (x - mean).powi(k as i32) * density(x), a, b, knots, spec)?;
    }

    let mut kappa = cumulants_from_moments(&mu);
    kappa[0] += mean;
    Ok(kappa)
}

/// Moment-to-cumulant recursion
/// `κₙ = mₙ − Σ_{j=1}^{n−1} C(n−1, j−1) κⱼ m_{n−j}`.
/// `moments[0]` must be 1; returns `κ₁..κ_{len-1}`.
pub fn cumulants_from_moments(moments: &[f64]) -> Vec<f64> {
    let order = moments.len() - 1;
    let mut kappa = vec![0.0; order + 1];
    for n in 1..=order {
        let mut k = moments[n];
        for j in 1..n {
            k -= binomial(n - 1, j - 1) * kappa[j] * moments[n - j];
        }
        kappa[n] = k;
    }
    kappa.remove(0);
    kappa
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
