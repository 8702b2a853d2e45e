//! Report emission: CSV tables and JSON documents, reals at 12 significant
//! digits.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use sclab_core::formats::fmt_sig;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl CliError {
    pub fn new(msg: impl Into<String>) -> Self {
        CliError(msg.into())
    }
}

/// Attach the name of the offending parameter to a library error.
pub fn at<E: fmt::Display>(param: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError(format!("invalid {param}: {e}"))
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Report {
    pub json: Value,
    pub table: Table,
    pub default: Format,
}

/// Round every non-integer number to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            let x = n.as_f64().expect("finite number");
            let r: f64 = fmt_sig(x).parse().expect("formatted real parses");
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn render_csv(t: &Table) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError(format!("csv output: {e}"));
    w.write_record(&t.header).map_err(err)?;
    for r in &t.rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError(format!("csv output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError(format!("csv output: {e}")))
}

pub fn emit(report: Report, format: Option<Format>, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = match format.unwrap_or(report.default) {
        Format::Csv => render_csv(&report.table)?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&round_json(report.json))
                .map_err(|e| CliError(format!("json output: {e}")))?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn opt_n(x: Option<usize>) -> String {
    x.map(|n| n.to_string()).unwrap_or_else(|| "not_found".into())
}
