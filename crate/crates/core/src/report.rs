//! Deterministic text, CSV and comparison output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `x` with nine significant digits, trailing zeros removed.
/// Plain notation for magnitudes in `[1e-4, 1e9)`, scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // `{:e}` rounds correctly, so the exponent already reflects carries
    // such as 9.9999999995 -> 1.00000000e1.
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-4..9).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(&digits);
        } else {
            let split = exp as usize + 1;
            out.push_str(&digits[..split]);
            out.push('.');
            out.push_str(&digits[split..]);
        }
        trim_fraction(&mut out);
    } else {
        out.push_str(&digits[..1]);
        out.push('.');
        out.push_str(&digits[1..]);
        trim_fraction(&mut out);
        let _ = write!(out, "e{exp}");
    }
    out
}

fn trim_fraction(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Num(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => fmt_sig(*x),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Space-aligned columns; numbers right-aligned.
    pub fn to_text(&self) -> String {
        let rendered: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|c| {
                rendered
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain([self.headers[c].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |cells: &[String], numeric: &[bool], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .zip(numeric)
                .map(|((s, &w), &num)| if num { format!("{s:>w$}") } else { format!("{s:<w$}") })
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&self.headers, &vec![false; self.headers.len()], &mut out);
        for (row, cells) in self.rows.iter().zip(&rendered) {
            let numeric: Vec<bool> = row.iter().map(|c| matches!(c, Cell::Num(_))).collect();
            line(cells, &numeric, &mut out);
        }
        out
    }
}

/// A published value to compare a computed quantity against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub published: f64,
    pub computed: Option<f64>,
    pub tolerance: f64,
    pub within: bool,
}

pub fn compare(references: &[Reference], quantities: &[(String, f64)]) -> Vec<Comparison> {
    references
        .iter()
        .map(|r| {
            let computed = quantities.iter().find(|(q, _)| *q == r.quantity).map(|(_, v)| *v);
            Comparison {
                quantity: r.quantity.clone(),
                published: r.value,
                computed,
                tolerance: r.tolerance,
                within: computed.is_some_and(|c| (c - r.value).abs() <= r.tolerance),
            }
        })
        .collect()
}

pub fn comparison_table(comparisons: &[Comparison]) -> Table {
    let mut t = Table::new(["quantity", "published", "computed", "difference", "tolerance", "status"]);
    for c in comparisons {
        let (computed, diff): (Cell, Cell) = match c.computed {
            Some(v) => (v.into(), (v - c.published).into()),
            None => ("missing".into(), "".into()),
        };
        let status = match (c.computed, c.within) {
            (None, _) => "WARNING: quantity not computed",
            (_, true) => "within tolerance",
            (_, false) => "WARNING: tolerance exceeded",
        };
        t.push(vec![
            c.quantity.clone().into(),
            c.published.into(),
            computed,
            diff,
            c.tolerance.into(),
            status.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.25), "0.25");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(-2.0 / 3.0), "-0.666666667");
        assert_eq!(fmt_sig(76.644_916_123_4), "76.6449161");
        assert_eq!(fmt_sig(9.999_999_999_6), "10");
        assert_eq!(fmt_sig(1.234e-7), "1.234e-7");
        assert_eq!(fmt_sig(0.000_123_456_789_12), "0.000123456789");
        assert_eq!(fmt_sig(123_456_789_012.0), "1.23456789e11");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(f64::NAN), "NaN");
    }

    #[test]
    fn formatting_round_trips_to_nine_digits() {
        for &x in &[0.899_123_456_78, 3.0e-3, 12_345.678_901_2, -4.2e15] {
            let back: f64 = fmt_sig(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-9, "{x} -> {}", fmt_sig(x));
        }
    }

    #[test]
    fn csv_quotes_names_with_commas() {
        let mut t = Table::new(["name", "value"]);
        t.push(vec!["beta(2,8)".into(), 0.5.into()]);
        assert_eq!(t.to_csv(), "name,value\n\"beta(2,8)\",0.5\n");
    }

    #[test]
    fn comparison_flags_exceeded_tolerance() {
        let refs = vec![
            Reference {
                quantity: "a".into(),
                value: 0.899,
                tolerance: 0.001,
            },
            Reference {
                quantity: "b".into(),
                value: 1.0,
                tolerance: 0.1,
            },
            Reference {
                quantity: "c".into(),
                value: 1.0,
                tolerance: 0.1,
            },
        ];
        let got = compare(&refs, &[("a".into(), 0.9019), ("b".into(), 1.05)]);
        assert!(!got[0].within);
        assert!(got[1].within);
        assert!(got[2].computed.is_none());
        let text = comparison_table(&got).to_text();
        assert!(text.contains("WARNING: tolerance exceeded"));
        assert!(text.contains("missing"));
    }
}
