//! CSV and JSON writers. Everything is buffered and written once by the
//! calling thread.

use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};

use crate::config::RunConfig;

pub const SCHEMA: &str = "v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Stopped early; rows so far are kept.
    Partial(String),
}

#[derive(Debug)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(cfg: &RunConfig, status: &Status, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# dioph {}\n", dioph_core::VERSION));
    for line in cfg.echo() {
        out.push_str(&format!("# {line}\n"));
    }
    if let Status::Partial(why) = status {
        out.push_str(&format!("# status = partial: {why}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for r in &table.rows {
        let fields: Vec<String> = r.iter().map(|f| csv_field(f)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(cfg: &RunConfig, status: &Status, results: Value) -> String {
    let (status, error) = match status {
        Status::Complete => ("complete", Value::Null),
        Status::Partial(e) => ("partial", Value::String(e.clone())),
    };
    let v = json!({
        "schema": SCHEMA,
        "version": dioph_core::VERSION,
        "subcommand": cfg.subcommand,
        "config": cfg.settings,
        "status": status,
        "error": error,
        "results": results,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub struct Sinks {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl Sinks {
    /// Writes the CSV to its path or standard output, and the JSON if a
    /// path was given.
    pub fn write(&self, csv: &str, json: &str) -> std::io::Result<()> {
        match &self.csv {
            Some(p) => std::fs::write(p, csv)?,
            None => std::io::stdout().lock().write_all(csv.as_bytes())?,
        }
        if let Some(p) = &self.json {
            std::fs::write(p, json)?;
        }
        Ok(())
    }
}

/// Shortest round-trip form of an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}
