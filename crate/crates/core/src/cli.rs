//! Batch commands behind the `duality` binary. Each command turns a
//! scenario into an [`Output`]: one CSV table, extra text sections, a JSON
//! document and named quantities for comparison with published values.

use serde::Serialize;
use serde_json::{json, Value};

use crate::approximations::{ae_cumulant_series, ae_taylor2, ce_taylor2};
use crate::curves::{catalog, Curve, Role};
use crate::delegation::{desiderata_report, update_target, TargetRule};
use crate::dominance::{self, dominance_implications, first_order_dominates, second_order_dominates};
use crate::duality::Evaluator;
use crate::numerics::QuadratureSpec;
use crate::report::{compare, comparison_table, fmt_sig, Cell, Comparison, Table};
use crate::scenario::{Scenario, ScenarioError};
use crate::selection::{allocation_sums, evaluate_matrix, find_pure_saddle, saddle_allocate};

/// Round-trip slack for a target update, as a fraction of the domain span.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for input and schema problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 3,
            CliError::Scenario(_) | CliError::Input(_) | CliError::Write { .. } => 2,
        }
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Sweep,
    UpdateTarget,
    SolveGamma,
    Matrix,
    Allocate,
    Dominance,
    Approx,
    Delegate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Sweep => "sweep",
            Command::UpdateTarget => "update-target",
            Command::SolveGamma => "solve-gamma",
            Command::Matrix => "matrix",
            Command::Allocate => "allocate",
            Command::Dominance => "dominance",
            Command::Approx => "approx",
            Command::Delegate => "delegate",
        }
    }
}

/// Command-line overrides of scenario parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Options {
    /// Relative quadrature tolerance.
    pub tolerance: Option<f64>,
    /// Sweep points or dominance grid points.
    pub grid: Option<usize>,
    pub terms: Option<usize>,
    pub fractile: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Output {
    pub command: &'static str,
    pub title: String,
    pub table: Table,
    pub sections: Vec<(String, Table)>,
    pub notes: Vec<String>,
    pub quantities: Vec<(String, f64)>,
    pub comparisons: Vec<Comparison>,
    pub data: Value,
}

impl Output {
    fn new(command: Command, title: impl Into<String>, table: Table, data: Value) -> Self {
        Self {
            command: command.name(),
            title: title.into(),
            table,
            sections: Vec::new(),
            notes: Vec::new(),
            quantities: Vec::new(),
            comparisons: Vec::new(),
            data,
        }
    }

    fn quantity(&mut self, name: impl Into<String>, value: f64) {
        self.quantities.push((name.into(), value));
    }

    pub fn to_csv(&self) -> String {
        self.table.to_csv()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        out.push_str(&self.table.to_text());
        for (heading, table) in &self.sections {
            out.push_str(&format!("\n-- {heading} --\n"));
            out.push_str(&table.to_text());
        }
        if !self.comparisons.is_empty() {
            out.push_str("\n-- published values --\n");
            out.push_str(&comparison_table(&self.comparisons).to_text());
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for n in &self.notes {
                out.push_str(&format!("note: {n}\n"));
            }
        }
        out
    }

    /// Pretty JSON with every float rounded to nine significant digits.
    pub fn to_json(&self) -> String {
        let doc = json!({
            "command": self.command,
            "title": self.title,
            "result": self.data,
            "comparisons": self.comparisons,
            "notes": self.notes,
        });
        let mut s = serde_json::to_string_pretty(&round_floats(doc)).expect("serializable");
        s.push('\n');
        s
    }
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            fmt_sig(x)
                .parse::<f64>()
                .ok()
                .and_then(|r| serde_json::Number::from_f64(r + 0.0))
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

pub fn evaluator(options: &Options) -> Result<Evaluator, CliError> {
    let mut spec = QuadratureSpec::default();
    if let Some(t) = options.tolerance {
        spec = spec
            .with_relative_tolerance(t)
            .map_err(|e| input(format!("--tol: {e}")))?;
    }
    Ok(Evaluator::new(spec))
}

pub fn run(command: Command, scenario: &Scenario, options: &Options) -> Result<Output, CliError> {
    let eval = evaluator(options)?;
    let mut out = match command {
        Command::Eval => cmd_eval(&eval, scenario)?,
        Command::Sweep => cmd_sweep(&eval, scenario, options)?,
        Command::UpdateTarget => cmd_update_target(&eval, scenario)?,
        Command::SolveGamma => cmd_solve_gamma(&eval, scenario)?,
        Command::Matrix => cmd_matrix(&eval, scenario)?,
        Command::Allocate => cmd_allocate(&eval, scenario)?,
        Command::Dominance => cmd_dominance(&eval, scenario, options)?,
        Command::Approx => cmd_approx(&eval, scenario, options)?,
        Command::Delegate => cmd_delegate(&eval, scenario, options)?,
    };
    // References name quantities of several commands; keep the ones this
    // command produced.
    out.comparisons = compare(&scenario.references, &out.quantities)
        .into_iter()
        .filter(|c| c.computed.is_some())
        .collect();
    Ok(out)
}

fn require_lotteries(s: &Scenario) -> Result<(), CliError> {
    if s.lotteries.is_empty() {
        Err(CliError::Scenario(ScenarioError::schema(
            "lotteries",
            "at least one lottery is required",
        )))
    } else {
        Ok(())
    }
}

fn require_utilities(s: &Scenario) -> Result<(), CliError> {
    if s.utilities.is_empty() {
        Err(CliError::Scenario(ScenarioError::schema(
            "utilities",
            "at least one utility is required",
        )))
    } else {
        Ok(())
    }
}

fn named_lottery<'a>(s: &'a Scenario, name: Option<&str>, field: &str) -> Result<(&'a str, &'a Curve), CliError> {
    require_lotteries(s)?;
    match name {
        None => Ok((s.lotteries[0].0.as_str(), &s.lotteries[0].1)),
        Some(n) => s
            .lotteries
            .iter()
            .find(|(m, _)| m == n)
            .map(|(m, c)| (m.as_str(), c))
            .ok_or_else(|| CliError::Scenario(ScenarioError::schema(field, format!("no lottery named `{n}`")))),
    }
}

fn target(s: &Scenario) -> Result<f64, CliError> {
    s.params
        .target
        .ok_or_else(|| CliError::Scenario(ScenarioError::schema("params.target", "this command needs a target")))
}

fn cmd_eval(eval: &Evaluator, s: &Scenario) -> Result<Output, CliError> {
    require_lotteries(s)?;
    require_utilities(s)?;
    let mut table = Table::new([
        "lottery",
        "utility",
        "expected_utility",
        "expected_disutility",
        "certain_equivalent",
        "aspiration_equivalent",
    ]);
    let mut rows = Vec::new();
    let mut quantities = Vec::new();
    for (ln, f) in &s.lotteries {
        for (un, u) in &s.utilities {
            let r = eval.evaluate_pair(f, u)?;
            table.push(vec![
                ln.as_str().into(),
                un.as_str().into(),
                r.expected_utility.into(),
                r.expected_disutility.into(),
                r.certain_equivalent.into(),
                r.aspiration_equivalent.into(),
            ]);
            for (q, v) in [
                ("eu", r.expected_utility),
                ("edu", r.expected_disutility),
                ("ce", r.certain_equivalent),
                ("ae", r.aspiration_equivalent),
                ("eu_plus_edu", r.expected_utility + r.expected_disutility),
            ] {
                quantities.push((format!("{q}:{ln}:{un}"), v));
            }
            rows.push(json!({"lottery": ln, "utility": un, "result": r}));
        }
    }
    let mut out = Output::new(
        Command::Eval,
        "expected utility and disutility",
        table,
        Value::Array(rows),
    );
    out.quantities = quantities;
    Ok(out)
}

fn gamma_grid(s: &Scenario, options: &Options) -> Result<Vec<f64>, CliError> {
    let grid = match (&s.params.gamma_grid, &s.params.gamma_range) {
        (Some(g), None) => g.clone(),
        (None, Some(r)) => {
            let n = options.grid.unwrap_or(r.points);
            if n == 0 {
                return Err(input("gamma range needs at least one point"));
            }
            if n == 1 {
                vec![r.from]
            } else {
                (0..n)
                    .map(|i| r.from + (r.to - r.from) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Scenario(ScenarioError::schema(
                "params",
                "give either gamma_grid or gamma_range, not both",
            )))
        }
        (None, None) => {
            return Err(CliError::Scenario(ScenarioError::schema(
                "params.gamma_grid",
                "sweep needs gamma_grid or gamma_range",
            )))
        }
    };
    if grid.is_empty() || grid.iter().any(|g| !g.is_finite()) {
        return Err(input("gamma grid must be nonempty and finite"));
    }
    Ok(grid)
}

fn cmd_sweep(eval: &Evaluator, s: &Scenario, options: &Options) -> Result<Output, CliError> {
    let (name, f) = named_lottery(s, s.params.lottery.as_deref(), "params.lottery")?;
    let grid = gamma_grid(s, options)?;
    let mut table = Table::new(["gamma", "certain_equivalent", "aspiration_equivalent"]);
    let mut rows = Vec::new();
    let mut out_q = Vec::new();
    for g in grid {
        let u = Curve::exponential_or_linear(s.domain, g)?;
        let r = eval.evaluate_pair(f, &u)?;
        table.push(vec![
            g.into(),
            r.certain_equivalent.into(),
            r.aspiration_equivalent.into(),
        ]);
        out_q.push((format!("ce:{}", fmt_sig(g)), r.certain_equivalent));
        out_q.push((format!("ae:{}", fmt_sig(g)), r.aspiration_equivalent));
        rows.push(json!({"gamma": g, "certain_equivalent": r.certain_equivalent, "aspiration_equivalent": r.aspiration_equivalent}));
    }
    let mut out = Output::new(
        Command::Sweep,
        format!("risk-aversion sweep of `{name}`"),
        table,
        json!({"lottery": name, "rows": rows}),
    );
    out.quantities = out_q;
    Ok(out)
}

fn cmd_update_target(eval: &Evaluator, s: &Scenario) -> Result<Output, CliError> {
    require_lotteries(s)?;
    let old_name = s.params.old_lottery.as_deref().unwrap_or(&s.lotteries[0].0);
    let default_new = s.lotteries.get(1).map_or(old_name, |(n, _)| n.as_str());
    let new_name = s.params.new_lottery.as_deref().unwrap_or(default_new);
    let (old_name, old) = named_lottery(s, Some(old_name), "params.old_lottery")?;
    let (new_name, new) = named_lottery(s, Some(new_name), "params.new_lottery")?;
    let t = target(s)?;

    let up = update_target(eval, old, t, new)?;
    let check = Curve::exponential_or_linear(s.domain, up.effective_gamma)?;
    let residual = (eval.aspiration_equivalent(old, &check)? - t).abs();
    let allowed = ROUND_TRIP_TOLERANCE * s.domain.span();
    let pass = residual <= allowed;

    let mut table = Table::new(["field", "value"]);
    let fields = [
        ("old_target", up.old_target),
        ("old_cdf_at_target", 1.0 - up.old_exceed_prob),
        ("old_exceed_prob", up.old_exceed_prob),
        ("effective_gamma", up.effective_gamma),
        ("risk_tolerance", 1.0 / up.effective_gamma),
        ("new_target", up.new_target),
        ("new_exceed_prob", up.new_exceed_prob),
        ("round_trip_residual", residual),
    ];
    for (k, v) in fields {
        table.push(vec![k.into(), v.into()]);
    }
    let mut out = Output::new(
        Command::UpdateTarget,
        format!("target update `{old_name}` -> `{new_name}` ({})", s.unit),
        table,
        json!({
            "old_lottery_name": old_name,
            "new_lottery_name": new_name,
            "update": up,
            "round_trip": {"residual": residual, "allowed": allowed, "pass": pass},
        }),
    );
    out.quantities = fields.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    out.notes.push(format!(
        "round-trip check {}: |AE(old, exp(gamma_eff)) - target| = {} (allowed {})",
        if pass { "PASS" } else { "FAIL" },
        fmt_sig(residual),
        fmt_sig(allowed)
    ));
    if !pass {
        return Err(CliError::Numeric(crate::Error::Invariant(format!(
            "target update round trip off by {residual}"
        ))));
    }
    Ok(out)
}

fn cmd_solve_gamma(eval: &Evaluator, s: &Scenario) -> Result<Output, CliError> {
    require_lotteries(s)?;
    let t = target(s)?;
    let chosen: Vec<(&str, &Curve)> = match s.params.lottery.as_deref() {
        Some(n) => vec![named_lottery(s, Some(n), "params.lottery")?],
        None => s.lotteries.iter().map(|(n, c)| (n.as_str(), c)).collect(),
    };
    let mut table = Table::new([
        "lottery",
        "target",
        "cdf_at_target",
        "effective_gamma",
        "risk_tolerance",
    ]);
    let mut rows = Vec::new();
    let mut q = Vec::new();
    for (name, f) in chosen {
        let gamma = eval.effective_gamma(f, t)?;
        let cdf = f.value(t)?;
        table.push(vec![
            name.into(),
            t.into(),
            cdf.into(),
            gamma.into(),
            (1.0 / gamma).into(),
        ]);
        q.push((format!("effective_gamma:{name}"), gamma));
        q.push((format!("risk_tolerance:{name}"), 1.0 / gamma));
        rows.push(json!({"lottery": name, "target": t, "cdf_at_target": cdf, "effective_gamma": gamma}));
    }
    let mut out = Output::new(
        Command::SolveGamma,
        "effective risk aversion",
        table,
        Value::Array(rows),
    );
    out.quantities = q;
    Ok(out)
}

fn matrix_table(m: &crate::selection::EvalMatrix) -> Table {
    let mut table = Table::new(
        ["block".to_string(), "lottery".to_string()]
            .into_iter()
            .chain(m.utility_names.iter().cloned()),
    );
    for (block, data) in [("EU", &m.eu), ("EDU", &m.edu), ("CE", &m.ce), ("AE", &m.ae)] {
        for (i, name) in m.lottery_names.iter().enumerate() {
            let mut row: Vec<Cell> = vec![block.into(), name.as_str().into()];
            row.extend(data[i].iter().map(|&v| Cell::from(v)));
            table.push(row);
        }
    }
    table
}

fn matrix_quantities(m: &crate::selection::EvalMatrix) -> Vec<(String, f64)> {
    let mut q = Vec::new();
    for (block, data) in [("eu", &m.eu), ("edu", &m.edu), ("ce", &m.ce), ("ae", &m.ae)] {
        for (i, ln) in m.lottery_names.iter().enumerate() {
            for (j, un) in m.utility_names.iter().enumerate() {
                q.push((format!("{block}:{ln}:{un}"), data[i][j]));
            }
        }
    }
    q
}

fn cmd_matrix(eval: &Evaluator, s: &Scenario) -> Result<Output, CliError> {
    require_lotteries(s)?;
    require_utilities(s)?;
    let m = evaluate_matrix(eval, &s.lotteries, &s.utilities)?;
    let saddle = find_pure_saddle(&m.eu)?;
    let mut section = Table::new(["item", "value"]);
    match saddle.saddle {
        Some(c) => {
            section.push(vec!["saddle_lottery".into(), m.lottery_names[c.row].as_str().into()]);
            section.push(vec!["saddle_utility".into(), m.utility_names[c.col].as_str().into()]);
            section.push(vec!["saddle_value".into(), c.value.into()]);
        }
        None => section.push(vec!["saddle".into(), "none".into()]),
    }
    section.push(vec!["maximin".into(), saddle.maximin.into()]);
    section.push(vec!["minimax".into(), saddle.minimax.into()]);

    let mut out = Output::new(
        Command::Matrix,
        "evaluation matrix",
        matrix_table(&m),
        json!({"matrix": m, "saddle": saddle}),
    );
    out.quantities = matrix_quantities(&m);
    out.quantities.push(("maximin".into(), saddle.maximin));
    out.quantities.push(("minimax".into(), saddle.minimax));
    if let Some(c) = saddle.saddle {
        out.quantities.push(("first_saddle".into(), c.value));
    }
    out.sections.push(("pure saddle of EU".into(), section));
    Ok(out)
}

fn cmd_allocate(eval: &Evaluator, s: &Scenario) -> Result<Output, CliError> {
    require_lotteries(s)?;
    require_utilities(s)?;
    if s.lotteries.len() != s.utilities.len() {
        return Err(input(format!(
            "allocation needs as many lotteries as utilities, got {} and {}",
            s.lotteries.len(),
            s.utilities.len()
        )));
    }
    let m = evaluate_matrix(eval, &s.lotteries, &s.utilities)?;
    let alloc = saddle_allocate(&m)?;
    let sums = allocation_sums(&alloc, &m)?;
    let mut table = Table::new([
        "stage",
        "lottery",
        "utility",
        "expected_utility",
        "certain_equivalent",
        "aspiration_equivalent",
        "pure_saddle",
        "maximin",
        "minimax",
    ]);
    let mut out_notes = Vec::new();
    for (k, (p, d)) in alloc.pairs.iter().zip(&alloc.stage_diagnostics).enumerate() {
        table.push(vec![
            Cell::from((k + 1) as f64),
            m.lottery_names[p.lottery].as_str().into(),
            m.utility_names[p.utility].as_str().into(),
            p.eu.into(),
            m.ce[p.lottery][p.utility].into(),
            m.ae[p.lottery][p.utility].into(),
            d.had_pure_saddle.into(),
            d.maximin.into(),
            d.minimax.into(),
        ]);
        if !d.had_pure_saddle {
            out_notes.push(format!(
                "stage {} had no pure saddle; paired the maximin row with its minimizing column",
                k + 1
            ));
        }
    }
    let mut totals = Table::new(["sum", "value"]);
    totals.push(vec!["certain_equivalent".into(), sums.sum_ce.into()]);
    totals.push(vec!["aspiration_equivalent".into(), sums.sum_ae.into()]);
    totals.push(vec!["expected_utility".into(), sums.sum_eu.into()]);

    let mut out = Output::new(
        Command::Allocate,
        "saddle-point allocation",
        table,
        json!({"matrix": m, "allocation": alloc, "sums": sums}),
    );
    out.quantities = matrix_quantities(&m);
    if let Some((first, d)) = alloc.pairs.first().zip(alloc.stage_diagnostics.first()) {
        out.quantity("maximin", d.maximin);
        out.quantity("minimax", d.minimax);
        if d.had_pure_saddle {
            out.quantity("first_saddle", first.eu);
        }
    }
    out.quantity("sum_ce", sums.sum_ce);
    out.quantity("sum_ae", sums.sum_ae);
    out.quantity("sum_eu", sums.sum_eu);
    out.sections.push(("allocation totals".into(), totals));
    out.notes = out_notes;
    Ok(out)
}

type Named = (String, Curve);

fn dominance_pair(s: &Scenario) -> Result<(Named, Named), CliError> {
    let find = |name: &str| -> Result<Named, CliError> {
        s.utilities
            .iter()
            .chain(&s.lotteries)
            .find(|(n, _)| n == name)
            .cloned()
            .ok_or_else(|| {
                CliError::Scenario(ScenarioError::schema(
                    "params.compare",
                    format!("no curve named `{name}`"),
                ))
            })
    };
    if let Some([a, b]) = &s.params.compare {
        return Ok((find(a)?, find(b)?));
    }
    let pool = if s.utilities.len() >= 2 {
        &s.utilities
    } else {
        &s.lotteries
    };
    if pool.len() < 2 {
        return Err(CliError::Scenario(ScenarioError::schema(
            "params.compare",
            "dominance needs two curves: set compare or list two utilities",
        )));
    }
    Ok((pool[0].clone(), pool[1].clone()))
}

fn cmd_dominance(eval: &Evaluator, s: &Scenario, options: &Options) -> Result<Output, CliError> {
    let ((an, a), (bn, b)) = dominance_pair(s)?;
    let points = options.grid.unwrap_or(dominance::DEFAULT_GRID_POINTS);
    let first = first_order_dominates(&a, &b, points)?;
    let second = second_order_dominates(&a, &b, points, &eval.quadrature)?;

    let mut table = Table::new(["order", "relation", "dominates", "strict_witness", "max_violation"]);
    for v in [&first, &second] {
        table.push(vec![
            Cell::from(match v.order {
                dominance::DominanceOrder::First => "first",
                dominance::DominanceOrder::SecondAnalog => "second (analog)",
            }),
            v.relation.into(),
            v.dominates.into(),
            v.strict_witness.map_or(Cell::from("none"), Cell::from),
            v.max_violation.into(),
        ]);
    }
    let mut out = Output::new(
        Command::Dominance,
        format!("does `{an}` dominate `{bn}`"),
        table,
        Value::Null,
    );
    out.quantity("first_order_max_violation", first.max_violation);
    out.quantity("second_order_max_violation", second.max_violation);

    let mut implications = Value::Null;
    let utilities = a.role() != Some(Role::Lottery) && b.role() != Some(Role::Lottery);
    if utilities && first.max_violation <= dominance::GRID_TOLERANCE {
        let tests: Vec<(String, Curve)> = if s.lotteries.is_empty() {
            catalog::lotteries(s.domain)?
        } else {
            s.lotteries.clone()
        };
        let curves: Vec<Curve> = tests.iter().map(|(_, c)| c.clone()).collect();
        let rep = dominance_implications(eval, &a, &b, &curves)?;
        let mut t = Table::new(["lottery", "edu_margin", "ae_margin", "eu_margin"]);
        for ((name, _), m) in tests.iter().zip(&rep.margins) {
            t.push(vec![name.as_str().into(), m.edu.into(), m.ae.into(), m.eu.into()]);
        }
        t.push(vec![
            "(first moment)".into(),
            "".into(),
            rep.first_moment_margin.into(),
            "".into(),
        ]);
        out.sections.push((
            "implication margins (nonnegative when implied ordering holds)".into(),
            t,
        ));
        out.quantity("first_moment_margin", rep.first_moment_margin);
        if !rep.holds() {
            out.notes
                .push(format!("implied orderings violated: {:?}", rep.violations));
        }
        implications = json!({"lotteries": tests.iter().map(|(n, _)| n).collect::<Vec<_>>(), "report": rep});
    } else if utilities {
        out.notes.push(format!(
            "`{an}` does not weakly dominate `{bn}`; implication margins skipped"
        ));
    }
    out.data = json!({"a": an, "b": bn, "first_order": first, "second_order": second, "implications": implications});
    Ok(out)
}

fn cmd_approx(eval: &Evaluator, s: &Scenario, options: &Options) -> Result<Output, CliError> {
    require_lotteries(s)?;
    require_utilities(s)?;
    let terms = options.terms.or(s.params.terms);
    let mut table = Table::new([
        "lottery",
        "utility",
        "ce_exact",
        "ce_approx",
        "lottery_mean",
        "lottery_variance",
        "risk_tolerance",
        "risk_premium",
        "ae_exact",
        "ae_approx",
        "utility_mean",
        "utility_variance",
        "spread_tolerance",
        "spread_premium",
    ]);
    let mut rows = Vec::new();
    let mut series_table = Table::new(["lottery", "utility", "terms", "closed_form", "series", "diverging"]);
    let mut out_q = Vec::new();
    for (ln, f) in &s.lotteries {
        for (un, u) in &s.utilities {
            let ce = ce_taylor2(eval, f, u)?;
            let ae = ae_taylor2(eval, f, u)?;
            table.push(vec![
                ln.as_str().into(),
                un.as_str().into(),
                ce.exact.into(),
                ce.approx.into(),
                ce.first_moment.into(),
                ce.central_second_moment.into(),
                ce.tolerance.as_f64().into(),
                ce.premium.into(),
                ae.exact.into(),
                ae.approx.into(),
                ae.first_moment.into(),
                ae.central_second_moment.into(),
                ae.tolerance.as_f64().into(),
                ae.premium.into(),
            ]);
            for (q, v) in [
                ("ce_exact", ce.exact),
                ("ce_approx", ce.approx),
                ("ae_exact", ae.exact),
                ("ae_approx", ae.approx),
                ("utility_mean", ae.first_moment),
                ("utility_variance", ae.central_second_moment),
                ("spread_tolerance", ae.tolerance.as_f64()),
                ("spread_premium", ae.premium),
            ] {
                out_q.push((format!("{q}:{ln}:{un}"), v));
            }
            let mut series = Value::Null;
            if let (Some(n), Some(g)) = (terms, f.gamma()) {
                if g > 0.0 {
                    let r = ae_cumulant_series(eval, f, u, n)?;
                    series_table.push(vec![
                        ln.as_str().into(),
                        un.as_str().into(),
                        (n as f64).into(),
                        r.closed_form.into(),
                        r.series.into(),
                        r.diverging.into(),
                    ]);
                    series = to_value(&r);
                }
            }
            rows.push(json!({"lottery": ln, "utility": un, "certain_equivalent": ce, "aspiration_equivalent": ae, "cumulant_series": series}));
        }
    }
    let mut out = Output::new(
        Command::Approx,
        "second-order approximations",
        table,
        Value::Array(rows),
    );
    out.quantities = out_q;
    if !series_table.rows.is_empty() {
        out.sections
            .push(("cumulant series for exponential lotteries".into(), series_table));
    }
    Ok(out)
}

fn cmd_delegate(eval: &Evaluator, s: &Scenario, options: &Options) -> Result<Output, CliError> {
    require_utilities(s)?;
    if s.lotteries.len() < 2 {
        return Err(CliError::Scenario(ScenarioError::schema(
            "lotteries",
            "delegate needs at least two lotteries",
        )));
    }
    let fractile = options.fractile.or(s.params.fractile).unwrap_or(0.5);
    if !(fractile > 0.0 && fractile < 1.0) {
        return Err(input(format!("fractile must lie in (0, 1), got {fractile}")));
    }
    let curves: Vec<Curve> = s.lotteries.iter().map(|(_, c)| c.clone()).collect();
    let mut table = Table::new([
        "utility",
        "rule",
        "agent_choice",
        "principal_choice",
        "uses_utility",
        "aligned",
    ]);
    let mut rows = Vec::new();
    for (un, u) in &s.utilities {
        let rep = desiderata_report(eval, &curves, u, fractile)?;
        for r in &rep.rules {
            let rule = match r.rule {
                TargetRule::Fractile { level } => format!("fractile {}", fmt_sig(level)),
                TargetRule::CertainEquivalent => "certain equivalent".into(),
                TargetRule::AspirationEquivalent => "aspiration equivalent".into(),
            };
            table.push(vec![
                un.as_str().into(),
                rule.into(),
                s.lotteries[r.agent_choice].0.as_str().into(),
                s.lotteries[rep.principal_choice].0.as_str().into(),
                r.uses_utility.into(),
                r.aligned_with_principal.into(),
            ]);
        }
        rows.push(json!({"utility": un, "report": rep}));
    }
    Ok(Output::new(
        Command::Delegate,
        "target-rule desiderata",
        table,
        Value::Array(rows),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(text: &str) -> Scenario {
        Scenario::from_json_str(text).unwrap()
    }

    #[test]
    fn eval_needs_utilities() {
        let s = scenario(r#"{"domain": {"lo": 0, "hi": 1}, "lotteries": [{"name": "u", "kind": "uniform"}]}"#);
        let err = run(Command::Eval, &s, &Options::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("utilities"));
    }

    #[test]
    fn numeric_failures_exit_3() {
        let s = scenario(
            r#"{"domain": {"lo": 0, "hi": 1}, "lotteries": [{"name": "b", "kind": "scaled_beta", "alpha": 2, "beta": 2}],
                "params": {"target": 0.0}}"#,
        );
        let err = run(Command::SolveGamma, &s, &Options::default()).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }

    #[test]
    fn single_point_sweep_has_one_row() {
        let s = scenario(
            r#"{"domain": {"lo": 0, "hi": 200}, "lotteries": [{"name": "t", "kind": "triangular"}],
                "params": {"gamma_grid": [0.0]}}"#,
        );
        let out = run(Command::Sweep, &s, &Options::default()).unwrap();
        assert_eq!(out.table.rows.len(), 1);
        assert_eq!(
            out.to_csv(),
            "gamma,certain_equivalent,aspiration_equivalent\n0,100,100\n"
        );
    }

    #[test]
    fn same_lottery_update_keeps_target() {
        let s = scenario(
            r#"{"domain": {"lo": 0, "hi": 10}, "lotteries": [{"name": "b", "kind": "scaled_beta", "alpha": 4, "beta": 6}],
                "params": {"target": 3.0}}"#,
        );
        let out = run(Command::UpdateTarget, &s, &Options::default()).unwrap();
        let new_target = out.quantities.iter().find(|(k, _)| k == "new_target").unwrap().1;
        assert!((new_target - 3.0).abs() < 1e-5);
        assert!(out.notes[0].contains("PASS"));
    }

    #[test]
    fn json_rounds_to_nine_digits() {
        let s = scenario(
            r#"{"domain": {"lo": 0, "hi": 1}, "lotteries": [{"name": "u", "kind": "uniform"}],
                "utilities": [{"name": "e", "kind": "exponential", "gamma": 3}]}"#,
        );
        let out = run(Command::Eval, &s, &Options::default()).unwrap();
        let json = out.to_json();
        let v: Value = serde_json::from_str(&json).unwrap();
        let eu = v["result"][0]["result"]["expected_utility"].as_f64().unwrap();
        assert_eq!(fmt_sig(eu).parse::<f64>().unwrap(), eu);
    }

    #[test]
    fn bad_tolerance_is_input_error() {
        let s = scenario(r#"{"domain": {"lo": 0, "hi": 1}}"#);
        let o = Options {
            tolerance: Some(-1.0),
            ..Options::default()
        };
        assert_eq!(run(Command::Eval, &s, &o).unwrap_err().exit_code(), 2);
    }
}
