//! Second-order approximations of the certain and aspiration equivalents,
//! and the cumulant form of the aspiration equivalent for exponential
//! lotteries.
//!
//! ```text
//! CE ≈ mean_F − ½ var_F / ρ_U(mean_F),   ρ_U = −U′/U″  (risk tolerance)
//! AE ≈ mean_u − ½ var_u / τ_F(mean_u),   τ_F = −F′/F″  (spread tolerance)
//! spread premium = mean_u − AE
//! ```
//!
//! For `F(x) ∝ 1 − e^{−λ(x−a)}` the aspiration equivalent is exactly
//! `a − (1/λ) ln E_u[e^{−λ(x−a)}]`, whose expansion in the cumulants of
//! the utility density is `a + Σ κ′ₖ (−λ)^{k−1} / k!` with `κ′₁ = κ₁ − a`.

use serde::Serialize;

use crate::curves::{Curve, Tolerance};
use crate::duality::Evaluator;
use crate::error::{Error, Result};
use crate::numerics::{self, central_difference, integrate_with_knots};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxReport {
    pub exact: f64,
    pub approx: f64,
    pub first_moment: f64,
    pub central_second_moment: f64,
    pub tolerance: Tolerance,
    /// `−½ · central_second_moment / tolerance`
    pub tolerance_term: f64,
    /// `first_moment − approx` (risk premium for CE, spread premium for AE)
    pub premium: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub closed_form: f64,
    pub series: f64,
    pub terms: Vec<f64>,
    pub cumulants: Vec<f64>,
    /// Term magnitudes grow again past the third term.
    pub diverging: bool,
}

fn interior(curve: &Curve, x: f64) -> Result<()> {
    let d = curve.domain();
    if x > d.lo && x < d.hi {
        Ok(())
    } else {
        Err(Error::OutsideDomain { x, lo: d.lo, hi: d.hi })
    }
}

/// `−U′(x)/U″(x)`; exactly `1/γ` for exponential utilities and infinite
/// where `U″` vanishes.
pub fn risk_tolerance(utility: &Curve, x: f64) -> Result<Tolerance> {
    interior(utility, x)?;
    utility.curvature_tolerance(x)
}

/// `−F′(x)/F″(x) = −f(x)/f′(x)`; infinite where `f′` vanishes, an error
/// at a kink.
pub fn spread_tolerance(lottery: &Curve, x: f64) -> Result<Tolerance> {
    interior(lottery, x)?;
    lottery.curvature_tolerance(x)
}

/// `−f(x)/f′(x)` with `f′` from central differences of the density.
pub fn spread_tolerance_numeric(curve: &Curve, x: f64) -> Result<Tolerance> {
    interior(curve, x)?;
    let d = curve.domain();
    let f = curve.density(x)?;
    let slope = central_difference(
        |t| curve.density_at(t),
        x,
        numerics::default_step(d.lo, d.hi),
        d.lo,
        d.hi,
    );
    if slope == 0.0 {
        Ok(Tolerance::Infinite)
    } else {
        Ok(Tolerance::Finite(-f / slope))
    }
}

fn report(exact: f64, mean: f64, variance: f64, tolerance: Tolerance) -> ApproxReport {
    let term = tolerance.correction(variance);
    let approx = mean + term;
    ApproxReport {
        exact,
        approx,
        first_moment: mean,
        central_second_moment: variance,
        tolerance,
        tolerance_term: term,
        premium: mean - approx,
    }
}

/// Second-order certain equivalent, risk tolerance taken at the lottery mean.
pub fn ce_taylor2(eval: &Evaluator, lottery: &Curve, utility: &Curve) -> Result<ApproxReport> {
    let exact = eval.certain_equivalent(lottery, utility)?;
    let (mean, var) = lottery.density_moments(&eval.quadrature)?;
    let tol = utility.curvature_tolerance(mean)?;
    Ok(report(exact, mean, var, tol))
}

/// Second-order aspiration equivalent, spread tolerance taken at the
/// utility density mean.
pub fn ae_taylor2(eval: &Evaluator, lottery: &Curve, utility: &Curve) -> Result<ApproxReport> {
    let exact = eval.aspiration_equivalent(lottery, utility)?;
    let (mean, var) = utility.density_moments(&eval.quadrature)?;
    let tol = lottery.curvature_tolerance(mean).map_err(|e| match e {
        Error::UndefinedCurvature { x } => Error::InvalidParameter(format!(
            "spread tolerance undefined at the lottery kink x = {x}; near a uniform lottery use the first moment of the utility density"
        )),
        other => other,
    })?;
    Ok(report(exact, mean, var, tol))
}

/// Aspiration equivalent of an exponential-CDF lottery against `utility`:
/// the closed log-Laplace form and its truncated cumulant series.
pub fn ae_cumulant_series(eval: &Evaluator, lottery: &Curve, utility: &Curve, terms: usize) -> Result<SeriesReport> {
    let lambda = match lottery.gamma() {
        Some(l) if l > 0.0 => l,
        _ => {
            return Err(Error::InvalidParameter(
                "cumulant series needs an exponential lottery with positive rate".into(),
            ))
        }
    };
    if utility.is_step() {
        return Err(Error::UnsupportedStep("cumulant series needs a continuous utility"));
    }
    let d = lottery.domain();
    d.ensure_same(&utility.domain())?;
    if terms == 0 || terms > numerics::MAX_CUMULANT_ORDER {
        return Err(Error::InvalidParameter(format!(
            "term count must be in 1..={}, got {terms}",
            numerics::MAX_CUMULANT_ORDER
        )));
    }

    let laplace = integrate_with_knots(
        |x| utility.density_at(x) * (-lambda * (x - d.lo)).exp(),
        d.lo,
        d.hi,
        &utility.knots(),
        &eval.quadrature,
    )?;
    let closed_form = d.lo - laplace.ln() / lambda;

    let cumulants = utility.cumulants(terms, &eval.quadrature)?;
    let mut factorial = 1.0;
    let series_terms: Vec<f64> = cumulants
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let order = i + 1;
            factorial *= order as f64;
            let kappa = if order == 1 { k - d.lo } else { k };
            kappa * (-lambda).powi(order as i32 - 1) / factorial
        })
        .collect();
    let diverging = series_terms.windows(2).skip(2).any(|w| w[1].abs() > w[0].abs());

    Ok(SeriesReport {
        closed_form,
        series: d.lo + series_terms.iter().sum::<f64>(),
        terms: series_terms,
        cumulants,
        diverging,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Domain;

    fn unit() -> Domain {
        Domain::unit()
    }

    #[test]
    fn exponential_risk_tolerance_is_inverse_gamma() {
        let d = Domain::new(0.0, 200.0).unwrap();
        let u = Curve::exponential(d, 0.03).unwrap();
        match risk_tolerance(&u, 120.0).unwrap() {
            Tolerance::Finite(t) => assert!((t - 33.333_333_333).abs() < 1e-6),
            t => panic!("{t:?}"),
        }
        assert_eq!(
            risk_tolerance(&Curve::linear(d).unwrap(), 10.0).unwrap(),
            Tolerance::Infinite
        );
    }

    #[test]
    fn log_wealth_risk_tolerance_is_wealth_plus_x() {
        let d = Domain::new(0.0, 5.0).unwrap();
        let u = Curve::log_wealth(d, 2.0).unwrap();
        for x in [0.5, 2.0, 4.5] {
            assert!((risk_tolerance(&u, x).unwrap().as_f64() - (2.0 + x)).abs() < 1e-12);
        }
    }

    #[test]
    fn spread_tolerance_cases() {
        assert_eq!(
            spread_tolerance(&Curve::uniform(unit()).unwrap(), 0.4).unwrap(),
            Tolerance::Infinite
        );
        let b = Curve::scaled_beta(unit(), 2.0, 3.0).unwrap();
        let x = 0.19;
        let oracle = -(12.0 * x * (1.0f64 - x).powi(2)) / (12.0 * (1.0 - x) * (1.0 - 3.0 * x));
        assert!((spread_tolerance(&b, x).unwrap().as_f64() - oracle).abs() < 1e-12);
        assert!((spread_tolerance_numeric(&b, x).unwrap().as_f64() - oracle).abs() < 1e-6);

        let d = Domain::new(0.0, 50.0).unwrap();
        let e = Curve::exponential(d, 2.0).unwrap();
        assert!((spread_tolerance(&e, 7.0).unwrap().as_f64() - 0.5).abs() < 1e-12);

        let t = Curve::symmetric_triangular(unit()).unwrap();
        assert!(matches!(
            spread_tolerance(&t, 0.5),
            Err(Error::UndefinedCurvature { .. })
        ));
        assert!(spread_tolerance(&b, 0.0).is_err());
    }

    #[test]
    fn linear_utility_ce_taylor_is_mean() {
        let f = Curve::scaled_beta(unit(), 2.0, 3.0).unwrap();
        let r = ce_taylor2(&Evaluator::default(), &f, &Curve::linear(unit()).unwrap()).unwrap();
        assert!((r.approx - 0.4).abs() < 1e-9);
        assert_eq!(r.tolerance_term, 0.0);
        assert!((r.exact - r.approx).abs() < 1e-9);
    }

    #[test]
    fn triangular_ce_taylor() {
        let d = Domain::new(0.0, 200.0).unwrap();
        let f = Curve::symmetric_triangular(d).unwrap();
        let u = Curve::exponential(d, 0.03).unwrap();
        let r = ce_taylor2(&Evaluator::default(), &f, &u).unwrap();
        let var = 200.0f64 * 200.0 / 24.0;
        assert!((r.central_second_moment - var).abs() < 1e-6);
        assert!((r.approx - (100.0 - 0.5 * var * 0.03)).abs() < 1e-6);
        assert!((r.approx - 75.0).abs() < 1e-6);
        assert!((r.premium - 25.0).abs() < 1e-6);
    }

    #[test]
    fn uniform_lottery_ae_taylor_is_exact() {
        for u in [
            Curve::exponential(unit(), 5.0).unwrap(),
            Curve::log_wealth(unit(), 1.0).unwrap(),
            Curve::truncated_gaussian(unit(), 0.3, 0.2).unwrap(),
        ] {
            let r = ae_taylor2(&Evaluator::default(), &Curve::uniform(unit()).unwrap(), &u).unwrap();
            assert!((r.approx - r.exact).abs() < 1e-9);
            assert_eq!(r.premium, 0.0);
        }
    }

    #[test]
    fn cumulant_series_rejects_non_exponential_lottery() {
        let eval = Evaluator::default();
        let u = Curve::linear(unit()).unwrap();
        assert!(ae_cumulant_series(&eval, &Curve::uniform(unit()).unwrap(), &u, 4).is_err());
        assert!(ae_cumulant_series(&eval, &Curve::exponential(unit(), -1.0).unwrap(), &u, 4).is_err());
        assert!(ae_cumulant_series(&eval, &Curve::exponential(unit(), 1.0).unwrap(), &u, 9).is_err());
    }

    #[test]
    fn flat_exponential_series_is_density_mean() {
        let eval = Evaluator::default();
        let f = Curve::exponential(unit(), 1e-4).unwrap();
        let u = Curve::exponential(unit(), 5.0).unwrap();
        let r = ae_cumulant_series(&eval, &f, &u, 6).unwrap();
        let (mean, _) = u.density_moments(&eval.quadrature).unwrap();
        assert!((r.series - mean).abs() < 1e-5);
        assert!((r.closed_form - mean).abs() < 1e-5);
        assert!(!r.diverging);
    }

    #[test]
    fn closed_form_matches_direct_aspiration_equivalent() {
        let eval = Evaluator::default();
        let d = Domain::new(0.0, 3.0).unwrap();
        let f = Curve::exponential(d, 5.0).unwrap();
        let u = Curve::exponential(d, 2.0).unwrap();
        let r = ae_cumulant_series(&eval, &f, &u, 6).unwrap();
        let ae = eval.aspiration_equivalent(&f, &u).unwrap();
        assert!((r.closed_form - ae).abs() < 1e-6 * d.span());
    }

    #[test]
    fn series_converges_when_rate_is_small_against_utility_spread() {
        let eval = Evaluator::default();
        let d = Domain::new(0.0, 3.0).unwrap();
        let f = Curve::exponential(d, 2.0).unwrap();
        let u = Curve::exponential(d, 5.0).unwrap();
        let r = ae_cumulant_series(&eval, &f, &u, 6).unwrap();
        assert!((r.series - r.closed_form).abs() < 1e-3);
        assert!(!r.diverging);
    }
}
