use proptest::prelude::*;

use utility_duality::approximations::ae_taylor2;
use utility_duality::curves::catalog;
use utility_duality::delegation::{choose_by_aspiration, choose_by_eu, update_target};
use utility_duality::dominance::{exponential_chain, first_moment_by_equal_areas};
use utility_duality::report::fmt_sig;
use utility_duality::{Curve, Domain, Evaluator};

fn domain(wide: bool) -> Domain {
    if wide {
        Domain::new(0.0, 200.0).unwrap()
    } else {
        Domain::unit()
    }
}

fn beta() -> impl Strategy<Value = (f64, f64)> {
    (1.0f64..12.0, 1.0f64..12.0)
}

fn nonzero_gamma() -> impl Strategy<Value = f64> {
    prop_oneof![-8.0f64..-0.05, 0.05f64..12.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn duality_identity_on_catalog(li in 0usize..10, ui in 0usize..10, wide in any::<bool>()) {
        let d = domain(wide);
        let f = &catalog::lotteries(d).unwrap()[li].1;
        let u = &catalog::utilities(d).unwrap()[ui].1;
        let eval = Evaluator::default();
        let eu = eval.expected_utility(f, u).unwrap();
        let edu = eval.expected_disutility(f, u).unwrap();
        prop_assert!((eu + edu - 1.0).abs() <= 2e-9, "eu {eu} edu {edu}");
    }

    #[test]
    fn duality_identity_random_pairs((a, b) in beta(), g in nonzero_gamma()) {
        let d = Domain::unit();
        let f = Curve::scaled_beta(d, a, b).unwrap();
        let u = Curve::exponential(d, g).unwrap();
        let r = Evaluator::default().evaluate_pair(&f, &u).unwrap();
        prop_assert!((r.expected_utility + r.expected_disutility - 1.0).abs() <= 2e-9);
    }

    #[test]
    fn galois_inequalities(ci in 0usize..20, p in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let d = Domain::new(-3.0, 7.0).unwrap();
        let mut all = catalog::lotteries(d).unwrap();
        all.extend(catalog::utilities(d).unwrap());
        let c = &all[ci].1;
        let q = c.quantile(p).unwrap();
        prop_assert!(c.value(q).unwrap() >= p - 1e-10, "value(quantile({p})) = {}", c.value(q).unwrap());
        let x = d.lo + t * d.span();
        let back = c.quantile(c.value(x).unwrap()).unwrap();
        prop_assert!(back <= x + 1e-9 * d.span(), "quantile(value({x})) = {back}");
    }

    #[test]
    fn pointwise_order_in_gamma(g1 in nonzero_gamma(), g2 in nonzero_gamma(), t in 0.0f64..=1.0) {
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let d = Domain::unit();
        let a = Curve::exponential(d, lo).unwrap();
        let b = Curve::exponential(d, hi).unwrap();
        prop_assert!(a.value(t).unwrap() <= b.value(t).unwrap() + 1e-15);
    }

    #[test]
    fn exponential_chain_holds(g1 in -6.0f64..10.0, g2 in -6.0f64..10.0, (a, b) in beta()) {
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let f = Curve::scaled_beta(Domain::unit(), a, b).unwrap();
        let r = exponential_chain(&Evaluator::default(), lo, hi, &f).unwrap();
        prop_assert!(r.holds(2e-9), "{r:?}");
    }

    #[test]
    fn win_win_argmax(shapes in proptest::collection::vec(beta(), 3), g in nonzero_gamma()) {
        let d = Domain::unit();
        let lotteries: Vec<Curve> = shapes.iter().map(|&(a, b)| Curve::scaled_beta(d, a, b).unwrap()).collect();
        let u = Curve::exponential(d, g).unwrap();
        let eval = Evaluator::default();
        let by_eu = choose_by_eu(&eval, &lotteries, &u).unwrap();
        let by_ae = choose_by_aspiration(&eval, &lotteries, &u).unwrap();
        prop_assert_eq!(by_eu, by_ae.index);
        for (f, p) in lotteries.iter().zip(&by_ae.exceedance) {
            let eu = eval.expected_utility(f, &u).unwrap();
            prop_assert!((p - eu).abs() <= 2e-9, "exceedance {p} vs eu {eu}");
        }
    }

    #[test]
    fn target_update_idempotent((a, b) in beta(), t in 0.15f64..0.85) {
        let d = Domain::new(0.0, 10.0).unwrap();
        let f = Curve::scaled_beta(d, a, b).unwrap();
        let target = 10.0 * t;
        let p = f.value(target).unwrap();
        prop_assume!(p > 1e-6 && p < 1.0 - 1e-6);
        match update_target(&Evaluator::default(), &f, target, &f) {
            Ok(up) => prop_assert!((up.new_target - target).abs() <= 1e-6 * d.span(), "{up:?}"),
            // Extreme fractiles can need |gamma|·span beyond the search cap.
            Err(utility_duality::Error::UnattainableTarget { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn dominant_forecast_raises_exceedance(a in 1.0f64..6.0, shift in 0.5f64..4.0, t in 0.25f64..0.6) {
        let d = Domain::new(0.0, 10.0).unwrap();
        let old = Curve::scaled_beta(d, a, 6.0).unwrap();
        let new = Curve::scaled_beta(d, a + shift, 6.0).unwrap();
        let target = old.quantile(t).unwrap();
        let up = update_target(&Evaluator::default(), &old, target, &new).unwrap();
        prop_assert!(up.new_exceed_prob >= up.old_exceed_prob - 1e-9, "{up:?}");
    }

    #[test]
    fn equal_areas_first_moment(ci in 0usize..20) {
        let d = Domain::new(2.0, 12.0).unwrap();
        let mut all = catalog::lotteries(d).unwrap();
        all.extend(catalog::utilities(d).unwrap());
        let c = &all[ci].1;
        let spec = Evaluator::default().quadrature;
        let (mean, _) = c.density_moments(&spec).unwrap();
        let by_areas = first_moment_by_equal_areas(c, &spec).unwrap();
        prop_assert!((mean - by_areas).abs() <= 1e-8 * d.span(), "{mean} vs {by_areas}");
    }

    #[test]
    fn uniform_lottery_ae_is_utility_mean(g in nonzero_gamma()) {
        let d = Domain::unit();
        let f = Curve::uniform(d).unwrap();
        let u = Curve::exponential(d, g).unwrap();
        let r = ae_taylor2(&Evaluator::default(), &f, &u).unwrap();
        prop_assert!((r.exact - r.first_moment).abs() <= 1e-9);
        prop_assert_eq!(r.approx, r.first_moment);
    }

    #[test]
    fn taylor_premium_sign_follows_density_slope((a, b) in beta(), g in 0.5f64..8.0) {
        // f′ < 0 at the evaluation point gives a positive spread tolerance,
        // hence approx below the utility mean; f′ > 0 the reverse.
        let d = Domain::unit();
        let f = Curve::scaled_beta(d, a, b).unwrap();
        let u = Curve::exponential(d, g).unwrap();
        let r = ae_taylor2(&Evaluator::default(), &f, &u).unwrap();
        let slope = f.density_slope(r.first_moment).unwrap();
        if slope < -1e-9 {
            prop_assert!(r.approx < r.first_moment && r.premium > 0.0);
        } else if slope > 1e-9 {
            prop_assert!(r.approx > r.first_moment && r.premium < 0.0);
        }
    }

    #[test]
    fn formatting_keeps_nine_digits(x in -1e12f64..1e12) {
        prop_assume!(x != 0.0);
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-9);
        prop_assert_eq!(fmt_sig(back), fmt_sig(x));
    }
}
