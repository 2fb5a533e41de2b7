//! Bracketed root finding (Brent's method).

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub value_tolerance: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::with_tolerance(lo, hi, 1e-10)
    }

    pub fn with_tolerance(lo: f64, hi: f64, value_tolerance: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "bracket needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(value_tolerance >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "value tolerance must be nonnegative, got {value_tolerance}"
            )));
        }
        Ok(Self {
            lo,
            hi,
            value_tolerance,
        })
    }
}

/// Finds `x` in the bracket with `|g(x)| <= value_tolerance`.
///
/// Bisection safeguards secant and inverse-quadratic steps. If `g` jumps
/// across zero the bracket shrinks to machine resolution around the jump
/// and that point is returned.
pub fn find_root<G: Fn(f64) -> f64>(g: G, bracket: RootBracket) -> Result<f64> {
    let tol = bracket.value_tolerance;
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (g(a), g(b));

    if fa.is_nan() || fb.is_nan() {
        return Err(Error::RootNotBracketed {
            lo: a,
            hi: b,
            g_lo: fa,
            g_hi: fb,
        });
    }
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootNotBracketed {
            lo: a,
            hi: b,
            g_lo: fa,
            g_hi: fb,
        });
    }

    // b is the best estimate, a the previous one, c the contrapoint.
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let x_tol = 2.0 * f64::EPSILON * b.abs() + f64::MIN_POSITIVE;
        let half = 0.5 * (c - b);
        if fb.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if half.abs() <= x_tol {
            return Ok(b);
        }

        if e.abs() >= x_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (x_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > x_tol { d } else { x_tol.copysign(half) };
        fb = g(b);
        if fb.is_nan() {
            return Err(Error::RootNonConvergence {
                lo: bracket.lo,
                hi: bracket.hi,
            });
        }
    }
    Err(Error::RootNonConvergence {
        lo: bracket.lo,
        hi: bracket.hi,
    })
}
