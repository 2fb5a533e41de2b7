//! Target setting for a principal delegating a choice among lotteries to
//! an agent who maximizes the probability of beating a target.
//!
//! Both parties agree on the probabilities. With the aspiration equivalent
//! as the target, `1 − F(AE) = EU`, so the agent's exceedance ranking and
//! the principal's expected-utility ranking coincide.

use serde::Serialize;

use crate::curves::{Curve, Domain};
use crate::duality::Evaluator;
use crate::error::{Error, Result};
use crate::selection::argmax;

#[derive(Debug, Clone, Serialize)]
pub struct TargetUpdate {
    pub old_lottery: Curve,
    pub new_lottery: Curve,
    pub old_target: f64,
    pub effective_gamma: f64,
    pub new_target: f64,
    pub old_exceed_prob: f64,
    pub new_exceed_prob: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AspirationChoice {
    pub index: usize,
    pub targets: Vec<f64>,
    pub exceedance: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum TargetRule {
    Fractile { level: f64 },
    CertainEquivalent,
    AspirationEquivalent,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleOutcome {
    pub rule: TargetRule,
    pub targets: Vec<f64>,
    pub exceedance: Vec<f64>,
    pub agent_choice: usize,
    /// Desideratum (i): the target carries the principal's utility.
    pub uses_utility: bool,
    /// Desideratum (ii): the exceedance-maximizing agent picks the
    /// principal's expected-utility choice.
    pub aligned_with_principal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesiderataReport {
    pub principal_choice: usize,
    pub expected_utilities: Vec<f64>,
    pub rules: Vec<RuleOutcome>,
}

/// A lottery set on which the certain-equivalent target misleads the agent.
#[derive(Debug, Clone, Serialize)]
pub struct CeDisagreement {
    pub betas: Vec<(f64, f64)>,
    pub gamma: f64,
    pub principal_choice: usize,
    pub agent_choice: usize,
    pub expected_utilities: Vec<f64>,
    pub ce_exceedance: Vec<f64>,
}

fn ensure_nonempty(lotteries: &[Curve]) -> Result<()> {
    if lotteries.is_empty() {
        Err(Error::Empty("lottery list"))
    } else {
        Ok(())
    }
}

/// Principal's choice: highest expected utility, lowest index on ties.
pub fn choose_by_eu(eval: &Evaluator, lotteries: &[Curve], utility: &Curve) -> Result<usize> {
    ensure_nonempty(lotteries)?;
    let eu = lotteries
        .iter()
        .map(|f| eval.expected_utility(f, utility))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmax(&eu).expect("nonempty"))
}

/// Agent's choice under aspiration-equivalent targets: highest
/// probability of exceeding the lottery's own aspiration equivalent.
pub fn choose_by_aspiration(eval: &Evaluator, lotteries: &[Curve], utility: &Curve) -> Result<AspirationChoice> {
    ensure_nonempty(lotteries)?;
    let mut targets = Vec::with_capacity(lotteries.len());
    let mut exceedance = Vec::with_capacity(lotteries.len());
    for f in lotteries {
        let ae = eval.aspiration_equivalent(f, utility)?;
        exceedance.push(1.0 - f.value(ae)?);
        targets.push(ae);
    }
    Ok(AspirationChoice {
        index: argmax(&exceedance).expect("nonempty"),
        targets,
        exceedance,
    })
}

/// Revises a target for a new forecast while holding the effective risk
/// aversion implied by the old target fixed.
pub fn update_target(
    eval: &Evaluator,
    old_lottery: &Curve,
    old_target: f64,
    new_lottery: &Curve,
) -> Result<TargetUpdate> {
    old_lottery.domain().ensure_same(&new_lottery.domain())?;
    let gamma = eval.effective_gamma(old_lottery, old_target)?;
    let utility = Curve::exponential_or_linear(new_lottery.domain(), gamma)?;
    let new_target = eval.aspiration_equivalent(new_lottery, &utility)?;
    Ok(TargetUpdate {
        old_lottery: old_lottery.clone(),
        new_lottery: new_lottery.clone(),
        old_target,
        effective_gamma: gamma,
        new_target,
        old_exceed_prob: 1.0 - old_lottery.value(old_target)?,
        new_exceed_prob: 1.0 - new_lottery.value(new_target)?,
    })
}

fn rule_outcome(
    rule: TargetRule,
    lotteries: &[Curve],
    targets: Vec<f64>,
    principal: usize,
    uses_utility: bool,
) -> Result<RuleOutcome> {
    let exceedance = lotteries
        .iter()
        .zip(&targets)
        .map(|(f, &t)| f.value(t).map(|v| 1.0 - v))
        .collect::<Result<Vec<_>>>()?;
    let agent_choice = argmax(&exceedance).expect("nonempty");
    Ok(RuleOutcome {
        rule,
        targets,
        exceedance,
        agent_choice,
        uses_utility,
        aligned_with_principal: agent_choice == principal,
    })
}

/// Compares fractile, certain-equivalent and aspiration-equivalent targets
/// against the principal's expected-utility choice.
pub fn desiderata_report(
    eval: &Evaluator,
    lotteries: &[Curve],
    utility: &Curve,
    fractile: f64,
) -> Result<DesiderataReport> {
    if lotteries.len() < 2 {
        return Err(Error::InvalidParameter(
            "desiderata comparison needs at least two lotteries".into(),
        ));
    }
    if !(fractile > 0.0 && fractile < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fractile level must lie in (0, 1), got {fractile}"
        )));
    }
    let results = lotteries
        .iter()
        .map(|f| eval.evaluate_pair(f, utility))
        .collect::<Result<Vec<_>>>()?;
    let eu: Vec<f64> = results.iter().map(|r| r.expected_utility).collect();
    let principal = argmax(&eu).expect("nonempty");

    let fractiles = lotteries
        .iter()
        .map(|f| f.quantile(fractile))
        .collect::<Result<Vec<_>>>()?;
    let rules = vec![
        rule_outcome(
            TargetRule::Fractile { level: fractile },
            lotteries,
            fractiles,
            principal,
            false,
        )?,
        rule_outcome(
            TargetRule::CertainEquivalent,
            lotteries,
            results.iter().map(|r| r.certain_equivalent).collect(),
            principal,
            true,
        )?,
        rule_outcome(
            TargetRule::AspirationEquivalent,
            lotteries,
            results.iter().map(|r| r.aspiration_equivalent).collect(),
            principal,
            true,
        )?,
    ];
    Ok(DesiderataReport {
        principal_choice: principal,
        expected_utilities: eu,
        rules,
    })
}

/// Scans pairs of scaled-Beta lotteries against exponential utilities for
/// a case where certain-equivalent targets steer the agent away from the
/// principal's choice. Returns the first hit in scan order.
pub fn find_ce_disagreement(
    eval: &Evaluator,
    domain: Domain,
    shapes: &[f64],
    gammas: &[f64],
) -> Result<Option<CeDisagreement>> {
    let mut betas = Vec::new();
    for &a in shapes {
        for &b in shapes {
            betas.push((a, b));
        }
    }
    for &gamma in gammas {
        let u = Curve::exponential_or_linear(domain, gamma)?;
        for (i, &p) in betas.iter().enumerate() {
            for &q in &betas[i + 1..] {
                let set = [
                    Curve::scaled_beta(domain, p.0, p.1)?,
                    Curve::scaled_beta(domain, q.0, q.1)?,
                ];
                let mut eu = Vec::with_capacity(2);
                let mut exceed = Vec::with_capacity(2);
                for f in &set {
                    let r = eval.evaluate_pair(f, &u)?;
                    eu.push(r.expected_utility);
                    exceed.push(1.0 - f.value(r.certain_equivalent)?);
                }
                let (principal, agent) = (argmax(&eu).expect("two"), argmax(&exceed).expect("two"));
                // Require a clear margin on both sides so noise cannot fake a hit.
                let clear = (eu[0] - eu[1]).abs() > 1e-3 && (exceed[0] - exceed[1]).abs() > 1e-3;
                if principal != agent && clear {
                    return Ok(Some(CeDisagreement {
                        betas: vec![p, q],
                        gamma,
                        principal_choice: principal,
                        agent_choice: agent,
                        expected_utilities: eu,
                        ce_exceedance: exceed,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        Domain::unit()
    }

    #[test]
    fn single_lottery_choices() {
        let eval = Evaluator::default();
        let f = Curve::scaled_beta(unit(), 2.0, 8.0).unwrap();
        let u = Curve::exponential(unit(), 3.0).unwrap();
        assert_eq!(choose_by_eu(&eval, std::slice::from_ref(&f), &u).unwrap(), 0);
        let c = choose_by_aspiration(&eval, std::slice::from_ref(&f), &u).unwrap();
        assert_eq!(c.index, 0);
        let eu = eval.expected_utility(&f, &u).unwrap();
        assert!((c.exceedance[0] - eu).abs() < 2e-9);
    }

    #[test]
    fn identical_lotteries_tie_to_first() {
        let eval = Evaluator::default();
        let f = Curve::scaled_beta(unit(), 2.0, 8.0).unwrap();
        let u = Curve::exponential(unit(), 3.0).unwrap();
        assert_eq!(choose_by_eu(&eval, &[f.clone(), f.clone()], &u).unwrap(), 0);
        assert_eq!(choose_by_aspiration(&eval, &[f.clone(), f], &u).unwrap().index, 0);
    }

    #[test]
    fn empty_lists_are_errors() {
        let eval = Evaluator::default();
        let u = Curve::linear(unit()).unwrap();
        assert!(matches!(choose_by_eu(&eval, &[], &u), Err(Error::Empty(_))));
        assert!(choose_by_aspiration(&eval, &[], &u).is_err());
    }

    #[test]
    fn unchanged_forecast_keeps_target() {
        let eval = Evaluator::default();
        let d = Domain::new(0.0, 10.0).unwrap();
        let f = Curve::scaled_beta(d, 4.0, 6.0).unwrap();
        let up = update_target(&eval, &f, 3.0, &f).unwrap();
        assert!((up.new_target - 3.0).abs() < 1e-6 * d.span());
        assert!((up.new_exceed_prob - up.old_exceed_prob).abs() < 1e-6);
    }

    #[test]
    fn dominating_forecast_raises_exceedance() {
        let eval = Evaluator::default();
        let d = Domain::new(0.0, 10.0).unwrap();
        let old = Curve::scaled_beta(d, 4.0, 6.0).unwrap();
        let new = Curve::scaled_beta(d, 6.0, 3.0).unwrap();
        let up = update_target(&eval, &old, 3.0, &new).unwrap();
        assert!(up.new_exceed_prob >= up.old_exceed_prob - 1e-9);
        assert!(up.new_target > up.old_target);
        // exceedance equals the expected utility at the effective γ
        let u = Curve::exponential(d, up.effective_gamma).unwrap();
        let eu_new = eval.expected_utility(&new, &u).unwrap();
        assert!((up.new_exceed_prob - eu_new).abs() < 1e-8);
    }

    #[test]
    fn desiderata_rules() {
        let eval = Evaluator::default();
        let lots: Vec<Curve> = [(2.0, 8.0), (3.0, 12.0), (4.0, 8.0)]
            .iter()
            .map(|&(a, b)| Curve::scaled_beta(unit(), a, b).unwrap())
            .collect();
        let u = Curve::exponential(unit(), 3.0).unwrap();
        let r = desiderata_report(&eval, &lots, &u, 0.5).unwrap();
        assert_eq!(r.principal_choice, 2);
        let fractile = &r.rules[0];
        assert!(!fractile.uses_utility);
        for e in &fractile.exceedance {
            assert!((e - 0.5).abs() < 1e-9);
        }
        let ae = &r.rules[2];
        assert!(ae.aligned_with_principal);
        for (e, eu) in ae.exceedance.iter().zip(&r.expected_utilities) {
            assert!((e - eu).abs() < 1e-8);
        }
        assert!(desiderata_report(&eval, &lots[..1], &u, 0.5).is_err());
        assert!(desiderata_report(&eval, &lots, &u, 1.0).is_err());
    }
}
