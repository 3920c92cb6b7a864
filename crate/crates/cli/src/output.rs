//! Tabular output with a reproducibility header.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub model: Option<Value>,
    pub model_domain: Option<[Value; 2]>,
    pub delta_convention: &'static str,
    pub seed: u64,
    pub parameters: Value,
}

impl Metadata {
    pub fn new(command: &'static str, seed: u64, parameters: Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            model: None,
            model_domain: None,
            delta_convention: "n/a",
            seed,
            parameters,
        }
    }

    fn csv_header(&self) -> String {
        let fields = serde_json::to_value(self).expect("metadata serializes");
        let mut out = String::new();
        if let Value::Object(map) = fields {
            for key in ["tool", "version", "command", "model", "model_domain", "delta_convention", "seed", "parameters"] {
                let v = &map[key];
                let text = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("# {key}: {text}\n"));
            }
        }
        out
    }
}

/// JSON number, or a string for non-finite values.
pub fn number(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::from(format_float(v))
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Missing,
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Missing => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => number(*v),
            Cell::Missing => Value::Null,
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// Rows in grid order under fixed column names.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn render(&self, meta: &Metadata, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut buf = meta.csv_header().into_bytes();
                let mut w = csv::Writer::from_writer(&mut buf);
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&self.columns).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
                }
                w.flush().map_err(|e| CliError::Io(e.to_string()))?;
                drop(w);
                Ok(buf)
            }
            Format::Json => {
                let rows: Vec<Vec<Value>> = self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
                let doc = serde_json::json!({
                    "metadata": meta,
                    "columns": self.columns,
                    "rows": rows,
                });
                Ok(pretty(&doc))
            }
        }
    }
}

pub fn pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("output serializes");
    out.push(b'\n');
    out
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
