//! Expected utility, expected disutility, certain equivalent and
//! aspiration equivalent of a (lottery, utility) pair, and the effective
//! risk-aversion inverse problem.
//!
//! With `F` the lottery's cumulative distribution and `U` the normalized
//! utility on the same domain `[a, b]`:
//!
//! ```text
//! EU  = ∫ U dF = ∫ f(x) U(x) dx        CE = U⁻¹(EU)
//! EDU = ∫ F dU = ∫ u(x) F(x) dx        AE = F⁻¹(EDU)
//! EU + EDU = 1,   1 − F(AE) = EU
//! ```
//!
//! EDU is always integrated on its own so the identity is a check rather
//! than a definition.

use serde::Serialize;

use crate::curves::{Curve, Domain};
use crate::error::{Bound, Error, Result};
use crate::numerics::{find_root, integrate_with_knots, QuadratureSpec, RootBracket};

/// Cap on `|γ| · (b − a)` while bracketing the effective risk aversion.
pub const GAMMA_SPAN_CAP: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityResult {
    pub expected_utility: f64,
    pub expected_disutility: f64,
    pub certain_equivalent: f64,
    pub aspiration_equivalent: f64,
}

/// Evaluation settings shared by every duality computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluator {
    pub quadrature: QuadratureSpec,
    /// Value tolerance for the effective-γ root search.
    pub gamma_tolerance: f64,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            gamma_tolerance: 1e-13,
        }
    }
}

fn shared_domain(lottery: &Curve, utility: &Curve) -> Result<Domain> {
    let d = lottery.domain();
    d.ensure_same(&utility.domain())?;
    Ok(d)
}

fn merged_knots(a: &Curve, b: &Curve) -> Vec<f64> {
    let mut k = a.knots();
    k.extend(b.knots());
    k
}

impl Evaluator {
    pub fn new(quadrature: QuadratureSpec) -> Self {
        Self {
            quadrature,
            ..Self::default()
        }
    }

    /// `∫ U dF`.
    pub fn expected_utility(&self, lottery: &Curve, utility: &Curve) -> Result<f64> {
        let d = shared_domain(lottery, utility)?;
        match (lottery.step_location(), utility.step_location()) {
            (Some(_), Some(_)) => Err(Error::UnsupportedStep("lottery and utility cannot both be steps")),
            (Some(x0), None) => Ok(utility.value_at(x0)),
            (None, Some(x0)) => Ok(1.0 - lottery.value_at(x0)),
            (None, None) => integrate_with_knots(
                |x| lottery.density_at(x) * utility.value_at(x),
                d.lo,
                d.hi,
                &merged_knots(lottery, utility),
                &self.quadrature,
            ),
        }
    }

    /// `∫ F dU`, integrated independently of [`Self::expected_utility`].
    pub fn expected_disutility(&self, lottery: &Curve, utility: &Curve) -> Result<f64> {
        let d = shared_domain(lottery, utility)?;
        match (lottery.step_location(), utility.step_location()) {
            (Some(_), Some(_)) => Err(Error::UnsupportedStep("lottery and utility cannot both be steps")),
            (Some(x0), None) => Ok(1.0 - utility.value_at(x0)),
            (None, Some(x0)) => Ok(lottery.value_at(x0)),
            (None, None) => integrate_with_knots(
                |x| utility.density_at(x) * lottery.value_at(x),
                d.lo,
                d.hi,
                &merged_knots(lottery, utility),
                &self.quadrature,
            ),
        }
    }

    /// `U⁻¹(EU)` under the generalized-inverse convention.
    pub fn certain_equivalent(&self, lottery: &Curve, utility: &Curve) -> Result<f64> {
        if utility.is_step() {
            return Err(Error::UnsupportedStep("certain equivalent needs a continuous utility"));
        }
        let eu = self.expected_utility(lottery, utility)?;
        utility.quantile(eu.clamp(0.0, 1.0))
    }

    /// `F⁻¹(EDU)` under the generalized-inverse convention.
    pub fn aspiration_equivalent(&self, lottery: &Curve, utility: &Curve) -> Result<f64> {
        if lottery.is_step() {
            return Err(Error::UnsupportedStep(
                "aspiration equivalent needs a continuous lottery",
            ));
        }
        let edu = self.expected_disutility(lottery, utility)?;
        lottery.quantile(edu.clamp(0.0, 1.0))
    }

    pub fn evaluate_pair(&self, lottery: &Curve, utility: &Curve) -> Result<DualityResult> {
        if lottery.is_step() || utility.is_step() {
            return Err(Error::UnsupportedStep("pair evaluation needs continuous curves"));
        }
        let eu = self.expected_utility(lottery, utility)?;
        let edu = self.expected_disutility(lottery, utility)?;
        Ok(DualityResult {
            expected_utility: eu,
            expected_disutility: edu,
            certain_equivalent: utility.quantile(eu.clamp(0.0, 1.0))?,
            aspiration_equivalent: lottery.quantile(edu.clamp(0.0, 1.0))?,
        })
    }

    /// Expected disutility against the exponential utility with coefficient
    /// `gamma` (linear at zero).
    pub fn exponential_disutility(&self, lottery: &Curve, gamma: f64) -> Result<f64> {
        let u = Curve::exponential_or_linear(lottery.domain(), gamma)?;
        self.expected_disutility(lottery, &u)
    }

    /// The γ whose exponential utility gives `lottery` the aspiration
    /// equivalent `target`.
    ///
    /// EDU falls as γ rises, so the search starts at `γ ∈ [−1, 1]/(b − a)`
    /// and widens fourfold until `EDU(γ) − F(target)` changes sign.
    pub fn effective_gamma(&self, lottery: &Curve, target: f64) -> Result<f64> {
        if lottery.is_step() {
            return Err(Error::UnsupportedStep("effective gamma needs a continuous lottery"));
        }
        let d = lottery.domain();
        if target <= d.lo {
            return Err(Error::TargetAtBound {
                target,
                bound: Bound::Lower,
            });
        }
        if target >= d.hi {
            return Err(Error::TargetAtBound {
                target,
                bound: Bound::Upper,
            });
        }
        let level = lottery.value_at(target);
        let span = d.span();
        let objective = |g: f64| self.exponential_disutility(lottery, g).map(|edu| edu - level);

        let mut reach = 1.0;
        let (lo, hi) = loop {
            let (lo, hi) = (-reach / span, reach / span);
            let (g_lo, g_hi) = (objective(lo)?, objective(hi)?);
            if g_lo.abs() <= self.gamma_tolerance {
                return Ok(lo);
            }
            if g_hi.abs() <= self.gamma_tolerance {
                return Ok(hi);
            }
            if g_lo.signum() != g_hi.signum() {
                // Narrow to the half that holds the crossing.
                let g_mid = objective(0.0)?;
                if g_mid.abs() <= self.gamma_tolerance {
                    return Ok(0.0);
                }
                break if g_mid.signum() == g_lo.signum() {
                    (0.0, hi)
                } else {
                    (lo, 0.0)
                };
            }
            if reach >= GAMMA_SPAN_CAP {
                return Err(Error::UnattainableTarget {
                    target,
                    cap: GAMMA_SPAN_CAP,
                });
            }
            reach = (reach * 4.0).min(GAMMA_SPAN_CAP);
        };

        // Errors inside the closure cannot escape find_root; stash the first.
        let failure = std::cell::RefCell::new(None);
        let gamma = find_root(
            |g| match objective(g) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            RootBracket::with_tolerance(lo, hi, self.gamma_tolerance)?,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        gamma
    }
}

pub fn expected_utility(lottery: &Curve, utility: &Curve) -> Result<f64> {
    Evaluator::default().expected_utility(lottery, utility)
}

pub fn expected_disutility(lottery: &Curve, utility: &Curve) -> Result<f64> {
    Evaluator::default().expected_disutility(lottery, utility)
}

pub fn certain_equivalent(lottery: &Curve, utility: &Curve) -> Result<f64> {
    Evaluator::default().certain_equivalent(lottery, utility)
}

pub fn aspiration_equivalent(lottery: &Curve, utility: &Curve) -> Result<f64> {
    Evaluator::default().aspiration_equivalent(lottery, utility)
}

pub fn evaluate_pair(lottery: &Curve, utility: &Curve) -> Result<DualityResult> {
    Evaluator::default().evaluate_pair(lottery, utility)
}

pub fn effective_gamma(lottery: &Curve, target: f64) -> Result<f64> {
    Evaluator::default().effective_gamma(lottery, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        Domain::unit()
    }

    /// Composite Gauss–Legendre (5 points) on a uniform partition; an
    /// oracle independent of the adaptive Simpson path.
    fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        const NODES: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let c = a + h * (k as f64 + 0.5);
                NODES
                    .iter()
                    .zip(WEIGHTS)
                    .map(|(n, w)| w * f(c + 0.5 * h * n))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }

    #[test]
    fn linear_uniform_is_one_half_everywhere() {
        let r = evaluate_pair(&Curve::uniform(unit()).unwrap(), &Curve::linear(unit()).unwrap()).unwrap();
        for v in [
            r.expected_utility,
            r.expected_disutility,
            r.certain_equivalent,
            r.aspiration_equivalent,
        ] {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn triangular_example_matches_independent_oracle() {
        let d = Domain::new(0.0, 200.0).unwrap();
        let f = Curve::symmetric_triangular(d).unwrap();
        let u = Curve::exponential(d, 0.03).unwrap();
        let norm = 1.0 - (-6.0f64).exp();
        let uu = |x: f64| (1.0 - (-0.03 * x).exp()) / norm;
        let oracle = gauss_legendre(|x| x / 10_000.0 * uu(x), 0.0, 100.0, 400)
            + gauss_legendre(|x| (200.0 - x) / 10_000.0 * uu(x), 100.0, 200.0, 400);
        let r = evaluate_pair(&f, &u).unwrap();
        assert!((r.expected_utility - oracle).abs() < 1e-10);
        // CE by closed-form inversion of the exponential
        let ce = -(1.0 - oracle * norm).ln() / 0.03;
        assert!((r.certain_equivalent - ce).abs() < 1e-8);
        // AE by closed-form inversion of the triangular CDF at EDU = 1 − EU
        let ae = ((1.0 - oracle) * 20_000.0).sqrt();
        assert!((r.aspiration_equivalent - ae).abs() < 1e-6);
    }

    #[test]
    fn uniform_lottery_edu_is_density_mean() {
        let u = Curve::exponential(unit(), 5.0).unwrap();
        let edu = expected_disutility(&Curve::uniform(unit()).unwrap(), &u).unwrap();
        let g: f64 = 5.0;
        let mean = 1.0 / g - (-g).exp() / (1.0 - (-g).exp());
        assert!((edu - mean).abs() < 1e-12);
        assert!((edu - 0.193).abs() < 5e-4);
    }

    #[test]
    fn step_shortcuts() {
        let f = Curve::scaled_beta(unit(), 2.0, 3.0).unwrap();
        let u = Curve::exponential(unit(), 2.0).unwrap();
        let step_u = Curve::step(unit(), 0.3).unwrap();
        let step_f = Curve::step(unit(), 0.3).unwrap();
        assert!((expected_utility(&f, &step_u).unwrap() - (1.0 - f.value(0.3).unwrap())).abs() < 1e-15);
        assert_eq!(expected_utility(&step_f, &u).unwrap(), u.value(0.3).unwrap());
        assert_eq!(
            expected_disutility(&f, &Curve::step(unit(), 0.0).unwrap()).unwrap(),
            0.0
        );
        assert!(matches!(
            expected_utility(&step_f, &step_u),
            Err(Error::UnsupportedStep(_))
        ));
        assert!(certain_equivalent(&f, &step_u).is_err());
        assert!(aspiration_equivalent(&step_f, &u).is_err());
    }

    #[test]
    fn mismatched_domains_are_rejected() {
        let f = Curve::uniform(unit()).unwrap();
        let u = Curve::linear(Domain::new(0.0, 2.0).unwrap()).unwrap();
        assert!(matches!(expected_utility(&f, &u), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn linear_utility_ce_is_lottery_mean() {
        let f = Curve::scaled_beta(unit(), 2.0, 8.0).unwrap();
        let ce = certain_equivalent(&f, &Curve::linear(unit()).unwrap()).unwrap();
        assert!((ce - 0.2).abs() < 1e-9);
    }

    #[test]
    fn effective_gamma_round_trip() {
        let f = Curve::scaled_beta(unit(), 2.0, 3.0).unwrap();
        let u = Curve::exponential(unit(), 5.0).unwrap();
        let ae = aspiration_equivalent(&f, &u).unwrap();
        let g = effective_gamma(&f, ae).unwrap();
        assert!((g - 5.0).abs() < 1e-6, "{g}");
    }

    #[test]
    fn effective_gamma_of_symmetric_mean_is_zero() {
        let f = Curve::symmetric_triangular(unit()).unwrap();
        let g = effective_gamma(&f, 0.5).unwrap();
        assert!(g.abs() < 1e-6, "{g}");
    }

    #[test]
    fn effective_gamma_rejects_bounds() {
        let f = Curve::scaled_beta(unit(), 2.0, 3.0).unwrap();
        assert!(matches!(
            effective_gamma(&f, 0.0),
            Err(Error::TargetAtBound {
                bound: Bound::Lower,
                ..
            })
        ));
        assert!(matches!(
            effective_gamma(&f, 1.0),
            Err(Error::TargetAtBound {
                bound: Bound::Upper,
                ..
            })
        ));
    }

    #[test]
    fn effective_gamma_unattainable_near_bound() {
        // F(target) so small that no |γ| <= 500 reaches it
        let f = Curve::scaled_beta(unit(), 2.0, 8.0).unwrap();
        assert!(matches!(
            effective_gamma(&f, 1e-5),
            Err(Error::UnattainableTarget { .. })
        ));
    }
}
