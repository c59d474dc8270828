//! CSV and JSON rendering. Both embed the resolved configuration; floats
//! use the shortest round-trip representation.

use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# ` lines for CSV output (fits, verdicts).
    pub notes: Vec<String>,
    pub json: Value,
    /// Some check did not pass; the run exits with the numerical code.
    pub failed: bool,
}

impl Report {
    pub fn render(&self, format: Format, config: &RunConfig) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                for line in config.to_toml().lines().filter(|l| !l.is_empty()) {
                    out.push_str("# ");
                    out.push_str(line);
                    out.push('\n');
                }
                for n in &self.notes {
                    out.push_str("# ");
                    out.push_str(n);
                    out.push('\n');
                }
                out.push_str(&self.header.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::render).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let v = json!({ "config": config, "result": self.json });
                let mut s = serde_json::to_string_pretty(&v).expect("json serializes");
                s.push('\n');
                s
            }
        }
    }
}
