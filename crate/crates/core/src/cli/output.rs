//! Tabular results and their CSV / JSON encodings.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{Map, Value};

use super::config::CommandName;
use super::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(usize),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

/// One command's result: a table plus scalar summary entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: CommandName,
    pub config: BTreeMap<String, String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Report {
    pub fn new(
        command: CommandName,
        config: BTreeMap<String, String>,
        columns: Vec<&'static str>,
    ) -> Self {
        Self {
            command,
            config,
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    /// `# command=...` and `# key=value` lines, then a header and the rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut out = out;
        writeln!(out, "# command={}", self.command).map_err(io)?;
        for (k, v) in &self.config {
            writeln!(out, "# {k}={v}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }

    pub fn to_json(&self) -> Value {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), v.json()))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut root = Map::new();
        root.insert("command".into(), Value::from(self.command.as_str()));
        root.insert("config".into(), Value::Object(config));
        root.insert("columns".into(), Value::from(self.columns.clone()));
        root.insert("rows".into(), Value::Array(rows));
        root.insert("summary".into(), Value::Object(summary));
        Value::Object(root)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut out = out;
        serde_json::to_writer_pretty(&mut out, &self.to_json())
            .map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out).map_err(io)
    }

    /// Human-readable summary lines.
    pub fn summary_text(&self) -> String {
        let mut s = format!("{}: {} rows\n", self.command, self.rows.len());
        for (k, v) in &self.summary {
            let shown = match v {
                Cell::Empty => "none".to_string(),
                other => other.csv(),
            };
            s.push_str(&format!("  {k} = {shown}\n"));
        }
        s
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
