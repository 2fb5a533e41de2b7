//! Dominance between curves, certified on a dense grid plus every knot.
//!
//! For utilities, "A utility-dominates B" means `U_A ≤ U_B` everywhere with
//! a strict gap somewhere: A then has the higher expected disutility and
//! aspiration equivalent and the lower expected utility for every lottery.
//! For lotteries the same pointwise test `F_A ≤ F_B` is first-order
//! stochastic dominance. The second-order test integrates the gap.

use serde::Serialize;

use crate::curves::{Curve, Role};
use crate::duality::Evaluator;
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_knots, QuadratureSpec};

pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const MIN_GRID_POINTS: usize = 64;
/// Largest wrong-signed gap still treated as zero, and the smallest gap
/// that counts as strict.
pub const GRID_TOLERANCE: f64 = 1e-9;
/// Slack on the EU/EDU orderings implied by dominance.
pub const IMPLICATION_TOLERANCE: f64 = 2e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceOrder {
    First,
    /// Integrated-gap analog of second-order stochastic dominance.
    SecondAnalog,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceVerdict {
    pub order: DominanceOrder,
    pub dominates: bool,
    pub strict_witness: Option<f64>,
    pub max_violation: f64,
    pub relation: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicationMargins {
    /// `EDU_A − EDU_B`
    pub edu: f64,
    /// `AE_A − AE_B`
    pub ae: f64,
    /// `EU_B − EU_A`
    pub eu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicationReport {
    pub margins: Vec<ImplicationMargins>,
    /// `mean_u(A) − mean_u(B)`
    pub first_moment_margin: f64,
    /// `(lottery index, link)` for every ordering broken beyond tolerance.
    pub violations: Vec<(usize, &'static str)>,
}

impl ImplicationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainReport {
    pub gamma_a: f64,
    pub gamma_b: f64,
    /// `min_x (U_B − U_A)`
    pub pointwise: f64,
    /// `EU_B − EU_A`
    pub eu: f64,
    /// `AE_A − AE_B`
    pub ae: f64,
    /// `CE_A − CE_B`
    pub ce: f64,
}

impl ChainReport {
    pub fn min_margin(&self) -> f64 {
        self.pointwise.min(self.eu).min(self.ae).min(self.ce)
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.min_margin() >= -tolerance
    }
}

fn relation_name(role: Option<Role>, order: DominanceOrder) -> &'static str {
    match (role, order) {
        (Some(Role::Lottery), DominanceOrder::First) => "first-order stochastic dominance",
        (Some(Role::Lottery), DominanceOrder::SecondAnalog) => "second-order stochastic dominance",
        (_, DominanceOrder::First) => "first-order utility dominance",
        (_, DominanceOrder::SecondAnalog) => "second-order utility dominance (integrated-gap analog)",
    }
}

fn certification_grid(a: &Curve, b: &Curve, points: usize) -> Result<Vec<f64>> {
    if points < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "dominance grid needs at least {MIN_GRID_POINTS} points, got {points}"
        )));
    }
    let d = a.domain();
    d.ensure_same(&b.domain())?;
    let mut grid = d.grid(points);
    grid.extend(a.knots());
    grid.extend(b.knots());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

fn verdict(order: DominanceOrder, role: Option<Role>, gaps: impl Iterator<Item = (f64, f64)>) -> DominanceVerdict {
    let mut max_violation: f64 = 0.0;
    let mut strict_witness = None;
    for (x, gap) in gaps {
        max_violation = max_violation.max(gap);
        if strict_witness.is_none() && gap < -GRID_TOLERANCE {
            strict_witness = Some(x);
        }
    }
    DominanceVerdict {
        order,
        dominates: max_violation <= GRID_TOLERANCE && strict_witness.is_some(),
        strict_witness,
        max_violation,
        relation: relation_name(role, order),
    }
}

/// `A(x) ≤ B(x)` on the grid with at least one gap beyond the strictness
/// threshold.
pub fn first_order_dominates(a: &Curve, b: &Curve, grid_points: usize) -> Result<DominanceVerdict> {
    let grid = certification_grid(a, b, grid_points)?;
    Ok(verdict(
        DominanceOrder::First,
        a.role(),
        grid.into_iter().map(|x| (x, a.value_at(x) - b.value_at(x))),
    ))
}

/// `∫ₐˣ (A − B) dt ≤ 0` for every grid `x`, strict somewhere.
pub fn second_order_dominates(
    a: &Curve,
    b: &Curve,
    grid_points: usize,
    spec: &QuadratureSpec,
) -> Result<DominanceVerdict> {
    let grid = certification_grid(a, b, grid_points)?;
    let mut running = 0.0;
    let mut cumulative = Vec::with_capacity(grid.len());
    cumulative.push((grid[0], 0.0));
    for w in grid.windows(2) {
        running += integrate_with_knots(|t| a.value_at(t) - b.value_at(t), w[0], w[1], &[], spec)?;
        cumulative.push((w[1], running));
    }
    Ok(verdict(DominanceOrder::SecondAnalog, a.role(), cumulative.into_iter()))
}

/// Checks the orderings that `U_A ≤ U_B` forces on every test lottery.
pub fn dominance_implications(
    eval: &Evaluator,
    a: &Curve,
    b: &Curve,
    lotteries: &[Curve],
) -> Result<ImplicationReport> {
    let v = first_order_dominates(a, b, DEFAULT_GRID_POINTS)?;
    if v.max_violation > GRID_TOLERANCE {
        return Err(Error::NotDominant);
    }
    let span = a.domain().span();
    let mut margins = Vec::with_capacity(lotteries.len());
    let mut violations = Vec::new();
    for (i, f) in lotteries.iter().enumerate() {
        let ra = eval.evaluate_pair(f, a)?;
        let rb = eval.evaluate_pair(f, b)?;
        let m = ImplicationMargins {
            edu: ra.expected_disutility - rb.expected_disutility,
            ae: ra.aspiration_equivalent - rb.aspiration_equivalent,
            eu: rb.expected_utility - ra.expected_utility,
        };
        if m.edu < -IMPLICATION_TOLERANCE {
            violations.push((i, "expected disutility"));
        }
        if m.ae < -1e-7 * span {
            violations.push((i, "aspiration equivalent"));
        }
        if m.eu < -IMPLICATION_TOLERANCE {
            violations.push((i, "expected utility"));
        }
        margins.push(m);
    }
    let first_moment_margin =
        first_moment_by_equal_areas(a, &eval.quadrature)? - first_moment_by_equal_areas(b, &eval.quadrature)?;
    if first_moment_margin < -IMPLICATION_TOLERANCE * span {
        violations.push((usize::MAX, "first moment"));
    }
    Ok(ImplicationReport {
        margins,
        first_moment_margin,
        violations,
    })
}

/// Margins of the exponential-utility chain
/// `γ_A ≤ γ_B ⟹ U_A ≤ U_B ⟹ EU_A ≤ EU_B ⟹ AE_A ≥ AE_B`, plus `CE_A ≥ CE_B`.
pub fn exponential_chain(eval: &Evaluator, gamma_a: f64, gamma_b: f64, lottery: &Curve) -> Result<ChainReport> {
    if !(gamma_a <= gamma_b) {
        return Err(Error::InvalidParameter(format!(
            "chain needs gamma_a <= gamma_b, got {gamma_a} > {gamma_b}"
        )));
    }
    let d = lottery.domain();
    let ua = Curve::exponential_or_linear(d, gamma_a)?;
    let ub = Curve::exponential_or_linear(d, gamma_b)?;
    let pointwise = d
        .grid(DEFAULT_GRID_POINTS)
        .into_iter()
        .map(|x| ub.value_at(x) - ua.value_at(x))
        .fold(f64::INFINITY, f64::min);
    let ra = eval.evaluate_pair(lottery, &ua)?;
    let rb = eval.evaluate_pair(lottery, &ub)?;
    Ok(ChainReport {
        gamma_a,
        gamma_b,
        pointwise,
        eu: rb.expected_utility - ra.expected_utility,
        ae: ra.aspiration_equivalent - rb.aspiration_equivalent,
        ce: ra.certain_equivalent - rb.certain_equivalent,
    })
}

/// Mean of the density as `b − ∫ₐᵇ U(x) dx`.
pub fn first_moment_by_equal_areas(curve: &Curve, spec: &QuadratureSpec) -> Result<f64> {
    if curve.is_step() {
        return Err(Error::UnsupportedStep("equal-areas moment needs a continuous curve"));
    }
    let d = curve.domain();
    let area = integrate_with_knots(|x| curve.value_at(x), d.lo, d.hi, &curve.knots(), spec)?;
    Ok(d.hi - area)
}
