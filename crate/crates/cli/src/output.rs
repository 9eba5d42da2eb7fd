//! Result tables: CSV with a `#` metadata block, or JSON.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Input,
    Analytic,
    Numeric,
}

impl Provenance {
    fn as_str(self) -> &'static str {
        match self {
            Provenance::Input => "input",
            Provenance::Analytic => "analytic",
            Provenance::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
    pub provenance: Provenance,
}

pub fn col(name: &'static str, unit: &'static str, provenance: Provenance) -> Column {
    Column { name, unit, provenance }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => float(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(float(*v)),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    /// Tool, command and configuration echo.
    pub header: Vec<(String, String)>,
    /// Derived scalar results, written after the configuration.
    pub summary: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Quality warnings; any entry turns the exit code to 3.
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { columns, ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn note_f64(&mut self, key: &str, value: f64) {
        self.note(key, float(value));
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.header.iter().chain(&self.summary) {
            let _ = writeln!(out, "# {k} = {v}");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning = {w}");
        }
        for c in &self.columns {
            let _ = writeln!(out, "# column {} [{}] {}", c.name, c.unit, c.provenance.as_str());
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        let _ = writeln!(out, "{}", names.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let pairs = |items: &[(String, String)]| -> Map<String, Value> {
            items.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect()
        };
        let doc = json!({
            "metadata": pairs(&self.header),
            "summary": pairs(&self.summary),
            "warnings": self.warnings,
            "columns": self.columns.iter().map(|c| json!({
                "name": c.name,
                "unit": c.unit,
                "provenance": c.provenance.as_str(),
            })).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json serialization");
        s.push('\n');
        s
    }
}
