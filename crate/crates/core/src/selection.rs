//! Lottery × utility evaluation matrices, the dual selection problem, pure
//! saddle points of the expected-utility game, and saddle-point allocation.
//!
//! Rows are lotteries (the maximizing player), columns are utilities (the
//! minimizing player).

use serde::Serialize;

use crate::curves::Curve;
use crate::duality::Evaluator;
use crate::error::{Error, Result};

/// Absolute tolerance on EU cells when comparing for saddles and ties.
pub const SADDLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct EvalMatrix {
    pub lottery_names: Vec<String>,
    pub utility_names: Vec<String>,
    pub eu: Vec<Vec<f64>>,
    pub edu: Vec<Vec<f64>>,
    pub ce: Vec<Vec<f64>>,
    pub ae: Vec<Vec<f64>>,
}

impl EvalMatrix {
    pub fn rows(&self) -> usize {
        self.eu.len()
    }

    pub fn cols(&self) -> usize {
        self.eu.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DualSelection {
    pub index: usize,
    pub expected_utilities: Vec<f64>,
    pub aspiration_equivalents: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleCell {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleReport {
    pub saddle: Option<SaddleCell>,
    /// `max_i min_j eu[i][j]`
    pub maximin: f64,
    pub maximin_row: usize,
    /// `min_j max_i eu[i][j]`
    pub minimax: f64,
    pub minimax_col: usize,
}

impl SaddleReport {
    pub fn gap(&self) -> f64 {
        self.minimax - self.maximin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationPair {
    pub lottery: usize,
    pub utility: usize,
    pub eu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageDiagnostic {
    pub had_pure_saddle: bool,
    pub maximin: f64,
    pub minimax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub pairs: Vec<AllocationPair>,
    pub stage_diagnostics: Vec<StageDiagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationSums {
    pub sum_ce: f64,
    pub sum_ae: f64,
    pub sum_eu: f64,
}

/// Index of the best value, ties within [`SADDLE_TOLERANCE`] going to the
/// lowest index.
pub(crate) fn arg_best(values: &[f64], better: impl Fn(f64, f64) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) => {
                if better(v, values[b]) && (v - values[b]).abs() > SADDLE_TOLERANCE {
                    best = Some(i);
                }
            }
        }
    }
    best
}

pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    arg_best(values, |a, b| a > b)
}

pub(crate) fn argmin(values: &[f64]) -> Option<usize> {
    arg_best(values, |a, b| a < b)
}

/// Picks the utility that minimizes expected utility for a fixed lottery,
/// which is also the one with the highest aspiration equivalent.
pub fn dual_select(eval: &Evaluator, lottery: &Curve, utilities: &[Curve]) -> Result<DualSelection> {
    if utilities.is_empty() {
        return Err(Error::Empty("utility list"));
    }
    if lottery.is_step() {
        return Err(Error::UnsupportedStep("dual selection needs a continuous lottery"));
    }
    let results = utilities
        .iter()
        .map(|u| eval.evaluate_pair(lottery, u))
        .collect::<Result<Vec<_>>>()?;
    let eu: Vec<f64> = results.iter().map(|r| r.expected_utility).collect();
    let ae: Vec<f64> = results.iter().map(|r| r.aspiration_equivalent).collect();
    let by_eu = argmin(&eu).expect("nonempty");
    let by_ae = argmax(&ae).expect("nonempty");
    if by_eu != by_ae && (ae[by_eu] - ae[by_ae]).abs() > SADDLE_TOLERANCE {
        return Err(Error::Invariant(format!(
            "min-EU utility {by_eu} differs from max-AE utility {by_ae}"
        )));
    }
    Ok(DualSelection {
        index: by_eu,
        expected_utilities: eu,
        aspiration_equivalents: ae,
    })
}

/// Fills EU/EDU/CE/AE for every (lottery, utility) cell.
pub fn evaluate_matrix(
    eval: &Evaluator,
    lotteries: &[(String, Curve)],
    utilities: &[(String, Curve)],
) -> Result<EvalMatrix> {
    if lotteries.is_empty() {
        return Err(Error::Empty("lottery list"));
    }
    if utilities.is_empty() {
        return Err(Error::Empty("utility list"));
    }
    let (n, m) = (lotteries.len(), utilities.len());
    let mut out = EvalMatrix {
        lottery_names: lotteries.iter().map(|(n, _)| n.clone()).collect(),
        utility_names: utilities.iter().map(|(n, _)| n.clone()).collect(),
        eu: vec![vec![0.0; m]; n],
        edu: vec![vec![0.0; m]; n],
        ce: vec![vec![0.0; m]; n],
        ae: vec![vec![0.0; m]; n],
    };
    for (i, (_, f)) in lotteries.iter().enumerate() {
        for (j, (_, u)) in utilities.iter().enumerate() {
            let r = eval.evaluate_pair(f, u).map_err(|e| Error::Cell {
                row: i,
                col: j,
                source: Box::new(e),
            })?;
            out.eu[i][j] = r.expected_utility;
            out.edu[i][j] = r.expected_disutility;
            out.ce[i][j] = r.certain_equivalent;
            out.ae[i][j] = r.aspiration_equivalent;
        }
    }
    Ok(out)
}

fn validate_rectangular(m: &[Vec<f64>]) -> Result<usize> {
    let cols = m.first().map_or(0, Vec::len);
    if m.is_empty() || cols == 0 {
        return Err(Error::Empty("matrix"));
    }
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidParameter("matrix rows differ in length".into()));
    }
    Ok(cols)
}

/// Maximin, minimax, and the lexicographically first cell that is both a
/// column maximum and a row minimum, if one exists.
pub fn find_pure_saddle(eu: &[Vec<f64>]) -> Result<SaddleReport> {
    let cols = validate_rectangular(eu)?;
    let row_min: Vec<f64> = eu
        .iter()
        .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let col_max: Vec<f64> = (0..cols)
        .map(|j| eu.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let maximin_row = argmax(&row_min).expect("nonempty");
    let minimax_col = argmin(&col_max).expect("nonempty");

    let saddle = eu.iter().enumerate().find_map(|(i, r)| {
        r.iter().enumerate().find_map(|(j, &v)| {
            let is_col_max = v >= col_max[j] - SADDLE_TOLERANCE;
            let is_row_min = v <= row_min[i] + SADDLE_TOLERANCE;
            (is_col_max && is_row_min).then_some(SaddleCell {
                row: i,
                col: j,
                value: v,
            })
        })
    });

    Ok(SaddleReport {
        saddle,
        maximin: row_min[maximin_row],
        maximin_row,
        minimax: col_max[minimax_col],
        minimax_col,
    })
}

/// Pairs lotteries with utilities by repeatedly taking the pure saddle of
/// the remaining EU submatrix and deleting its row and column.
///
/// A stage without a pure saddle pairs the maximin row with the column
/// that minimizes it and is flagged in the diagnostics.
pub fn saddle_allocate(matrix: &EvalMatrix) -> Result<Allocation> {
    let cols = validate_rectangular(&matrix.eu)?;
    if cols != matrix.rows() {
        return Err(Error::InvalidParameter(format!(
            "allocation needs a square matrix, got {}x{cols}",
            matrix.rows()
        )));
    }
    let mut rows_left: Vec<usize> = (0..matrix.rows()).collect();
    let mut cols_left: Vec<usize> = (0..cols).collect();
    let mut pairs = Vec::with_capacity(cols);
    let mut stage_diagnostics = Vec::with_capacity(cols);

    while !rows_left.is_empty() {
        let sub: Vec<Vec<f64>> = rows_left
            .iter()
            .map(|&i| cols_left.iter().map(|&j| matrix.eu[i][j]).collect())
            .collect();
        let report = find_pure_saddle(&sub)?;
        let (si, sj) = match report.saddle {
            Some(c) => (c.row, c.col),
            None => {
                let r = report.maximin_row;
                (r, argmin(&sub[r]).expect("nonempty"))
            }
        };
        stage_diagnostics.push(StageDiagnostic {
            had_pure_saddle: report.saddle.is_some(),
            maximin: report.maximin,
            minimax: report.minimax,
        });
        let (i, j) = (rows_left.remove(si), cols_left.remove(sj));
        pairs.push(AllocationPair {
            lottery: i,
            utility: j,
            eu: matrix.eu[i][j],
        });
    }
    Ok(Allocation {
        pairs,
        stage_diagnostics,
    })
}

pub fn allocation_sums(allocation: &Allocation, matrix: &EvalMatrix) -> Result<AllocationSums> {
    let mut sums = AllocationSums {
        sum_ce: 0.0,
        sum_ae: 0.0,
        sum_eu: 0.0,
    };
    for p in &allocation.pairs {
        if p.lottery >= matrix.rows() {
            return Err(Error::IndexOutOfRange {
                index: p.lottery,
                len: matrix.rows(),
            });
        }
        if p.utility >= matrix.cols() {
            return Err(Error::IndexOutOfRange {
                index: p.utility,
                len: matrix.cols(),
            });
        }
        sums.sum_ce += matrix.ce[p.lottery][p.utility];
        sums.sum_ae += matrix.ae[p.lottery][p.utility];
        sums.sum_eu += matrix.eu[p.lottery][p.utility];
    }
    Ok(sums)
}
