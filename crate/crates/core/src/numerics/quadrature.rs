//! Adaptive composite Simpson quadrature.
//!
//! Each panel is bisected until the two-halves estimate agrees with the
//! whole-panel estimate to within its share of the tolerance; the accepted
//! value carries the usual Richardson correction `(S2 - S1) / 15`.
//! Callers that know where their integrand has kinks pass them as `knots`
//! so panels never straddle a corner.

use crate::error::{Error, Result};

/// Panels per knot-free segment before adaptive refinement starts.
const INITIAL_PANELS: usize = 8;
/// Levels every initial panel is split through before its error estimate
/// is trusted; guards against coincidental agreement on peaked integrands.
const MIN_REFINEMENT: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivision_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-9,
            absolute_tolerance: 1e-12,
            max_subdivision_depth: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn new(relative_tolerance: f64, absolute_tolerance: f64, max_subdivision_depth: u32) -> Result<Self> {
        let spec = Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivision_depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_relative_tolerance(mut self, tol: f64) -> Result<Self> {
        self.relative_tolerance = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.relative_tolerance > 0.0
            && self.relative_tolerance.is_finite()
            && self.absolute_tolerance > 0.0
            && self.absolute_tolerance.is_finite()
            && self.max_subdivision_depth >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive and depth >= 1, got {self:?}"
            )))
        }
    }
}

struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Self {
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        Self::from_values(a, m, b, fa, fm, fb)
    }

    fn from_values(a: f64, m: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Self {
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        Self {
            a,
            m,
            b,
            fa,
            fm,
            fb,
            whole,
        }
    }
}

struct Accumulator {
    estimate: f64,
    error_bound: f64,
    converged: bool,
}

fn refine<F: Fn(f64) -> f64>(f: &F, panel: Panel, eps: f64, depth: u32, forced: u32, acc: &mut Accumulator) {
    let lm = 0.5 * (panel.a + panel.m);
    let rm = 0.5 * (panel.m + panel.b);
    let left = Panel::from_values(panel.a, lm, panel.m, panel.fa, f(lm), panel.fm);
    let right = Panel::from_values(panel.m, rm, panel.b, panel.fm, f(rm), panel.fb);
    let split = left.whole + right.whole;
    let delta = split - panel.whole;

    if forced == 0 && (delta.abs() <= 15.0 * eps || !delta.is_finite()) {
        acc.estimate += split + delta / 15.0;
        acc.error_bound += delta.abs() / 15.0;
        return;
    }
    if depth == 0 {
        acc.converged = false;
        acc.estimate += split + delta / 15.0;
        acc.error_bound += delta.abs() / 15.0;
        return;
    }
    let forced = forced.saturating_sub(1);
    refine(f, left, 0.5 * eps, depth - 1, forced, acc);
    refine(f, right, 0.5 * eps, depth - 1, forced, acc);
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_knots(f, a, b, &[], spec)
}

/// Integrates `f` over `[a, b]`, splitting first at every knot strictly
/// inside the interval.
pub fn integrate_with_knots<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    knots: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }

    let mut breaks = vec![a];
    let mut inner: Vec<f64> = knots.iter().copied().filter(|&k| k > a && k < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    breaks.extend(inner);
    breaks.push(b);

    let mut panels = Vec::with_capacity(INITIAL_PANELS * (breaks.len() - 1));
    for w in breaks.windows(2) {
        let h = (w[1] - w[0]) / INITIAL_PANELS as f64;
        for k in 0..INITIAL_PANELS {
            let lo = w[0] + h * k as f64;
            let hi = if k + 1 == INITIAL_PANELS { w[1] } else { lo + h };
            panels.push(Panel::new(&f, lo, hi));
        }
    }

    let coarse: f64 = panels.iter().map(|p| p.whole).sum();
    let total_tol = (spec.relative_tolerance * coarse.abs()).max(spec.absolute_tolerance);
    let span = b - a;

    let mut acc = Accumulator {
        estimate: 0.0,
        error_bound: 0.0,
        converged: true,
    };
    for p in panels {
        let eps = total_tol * (p.b - p.a) / span;
        refine(&f, p, eps, spec.max_subdivision_depth, MIN_REFINEMENT, &mut acc);
    }

    if !acc.estimate.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            estimate: acc.estimate,
            error_bound: f64::INFINITY,
        });
    }
    let allowed = (spec.relative_tolerance * acc.estimate.abs()).max(spec.absolute_tolerance);
    if !acc.converged && acc.error_bound > allowed {
        return Err(Error::QuadratureNonConvergence {
            estimate: acc.estimate,
            error_bound: acc.error_bound,
        });
    }
    Ok(acc.estimate)
}
