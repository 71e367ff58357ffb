//! Deterministic CSV emission and the JSON run sidecar.

use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{json, Value};

use crate::config::RunConfig;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    /// Numbers are written with 17 significant digits; `None` and
    /// non-finite values become empty cells.
    Num(Option<f64>),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn num(v: f64) -> Cell {
        Cell::Num(Some(v))
    }

    pub fn opt(v: Option<f64>) -> Cell {
        Cell::Num(v)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn write(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Num(Some(v)) if v.is_finite() => write!(out, "{v:.16e}").unwrap(),
            Cell::Num(_) => {}
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap()
                } else {
                    out.push_str(s)
                }
            }
            Cell::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        }
    }
}

/// A table with a fixed column schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match the schema"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Numeric value of `name` in `row`, if present.
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(name)?)? {
            Cell::Num(v) => *v,
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    /// `'\n'`-terminated CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.write(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

/// Result of one command: the table plus a command-specific summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub table: Table,
    pub summary: Value,
    /// False when a validation check failed.
    pub passed: bool,
}

/// Absolute percentage deviation `100·|(E − A)/E|` of `approx` from `exact`.
pub fn apd(exact: f64, approx: f64) -> Option<f64> {
    if exact != 0.0 && exact.is_finite() && approx.is_finite() {
        Some(100.0 * ((exact - approx) / exact).abs())
    } else {
        None
    }
}

/// Run metadata: config echo, versions, norm convention and wall time.
pub fn sidecar(config: &RunConfig, output: &Output, wall: Duration) -> Value {
    json!({
        "command": config.command.name(),
        "config": config,
        "versions": {
            "lrsearch": lrsearch::VERSION,
            "lrsearch-cli": env!("CARGO_PKG_VERSION"),
        },
        "norm": config.norm.name(),
        "columns": output.table.columns,
        "rows": output.table.rows.len(),
        "wall_time_seconds": wall.as_secs_f64(),
        "summary": output.summary,
    })
}
