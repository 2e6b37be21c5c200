//! Report records and CSV tables shared by the checks and the CLI.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// Uniform JSON record for a single check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub parameters: Value,
    pub max_deviation: f64,
    pub worst_point: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, parameters: Value) -> Self {
        Self {
            check: check.into(),
            parameters,
            max_deviation: 0.0,
            worst_point: Value::Null,
            pass: true,
            details: Value::Null,
        }
    }
}

/// A plot-ready numeric table. Numbers are written in Rust's shortest
/// round-trip exponent form, so identical data gives identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub footer: Vec<(String, f64)>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_footer(mut self, key: impl Into<String>, value: f64) -> Self {
        self.footer.push((key.into(), value));
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (key, value) in &self.footer {
            let _ = writeln!(out, "{key},{}", format_number(*value));
        }
        out
    }
}

pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

/// Coordinate column names `prefix0, prefix1, …`.
pub fn coordinate_columns(prefix: &str, dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_deterministic_and_round_trips() {
        let mut t = Table::new(["s", "re", "im"]);
        t.push(vec![8.0, 0.1 + 0.2, -1e-300]);
        let t = t.with_footer("fitted_rate", -0.5);
        let csv = t.to_csv();
        assert_eq!(csv, t.clone().to_csv());
        let line = csv.lines().nth(1).unwrap();
        let parsed: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(parsed, vec![8.0, 0.1 + 0.2, -1e-300]);
        assert!(csv.ends_with("fitted_rate,-5e-1\n"));
    }
}
