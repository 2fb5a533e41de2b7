//! Quadrature, root finding, differentiation and cumulants shared by every
//! other module. All functions are pure.

mod moments;
mod quadrature;
mod roots;

pub use moments::{cumulants, cumulants_from_moments, MAX_CUMULANT_ORDER};
pub use quadrature::{integrate, integrate_with_knots, QuadratureSpec};
pub use roots::{find_root, RootBracket};

/// Central difference `(f(x+h) − f(x−h)) / 2h`.
///
/// When `x ± h` leaves `[lo, hi]` the matching one-sided second-order
/// stencil is used instead.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(h > 0.0);
    if x - h < lo {
        (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
    } else if x + h > hi {
        (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)
    } else {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }
}

/// Default step for [`central_difference`]: `1e-5` of the domain span.
pub fn default_step(lo: f64, hi: f64) -> f64 {
    1e-5 * (hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_square() {
        let d = central_difference(|x| x * x, 1.0, 1e-5, -10.0, 10.0);
        assert!((d - 2.0).abs() < 1e-8);
    }

    #[test]
    fn derivative_of_beta_2_3_density() {
        let f = |x: f64| 12.0 * x * (1.0 - x).powi(2);
        let x = 0.19;
        let d = central_difference(f, x, 1e-5, 0.0, 1.0);
        let analytic = 12.0 * (1.0 - x) * (1.0 - 3.0 * x);
        assert!((d - analytic).abs() < 1e-7);
        assert!((d - 4.18).abs() < 0.01);
    }

    #[test]
    fn constant_has_zero_slope() {
        assert_eq!(central_difference(|_| 3.5, 0.5, 1e-5, 0.0, 1.0), 0.0);
    }

    #[test]
    fn one_sided_near_bounds() {
        let f = |x: f64| x * x * x;
        let left = central_difference(f, 0.0, 1e-4, 0.0, 1.0);
        assert!(left.abs() < 1e-7);
        let right = central_difference(f, 1.0, 1e-4, 0.0, 1.0);
        assert!((right - 3.0).abs() < 1e-7);
    }
}
