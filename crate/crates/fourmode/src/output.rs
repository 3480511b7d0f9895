//! Output directory layout: `config.toml` echo, tables, `summary.json` and a
//! `run.log` sidecar, which is the only file carrying timestamps.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, TableFormat};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => json_f64(*v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Finite floats as numbers, anything else as `null`.
pub fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

/// Writer for one subcommand's output directory.
#[derive(Debug, Clone)]
pub struct Artifacts {
    dir: PathBuf,
    command: String,
    digest: String,
    seed: u64,
    format: TableFormat,
}

impl Artifacts {
    /// Creates `<root>/<command>` and echoes the resolved configuration into it.
    pub fn create(cfg: &ExperimentConfig, command: &str) -> Result<Self, CliError> {
        let dir = cfg.output_root().join(command);
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let a = Artifacts {
            dir,
            command: command.to_string(),
            digest: cfg.digest(),
            seed: cfg.master_seed,
            format: cfg.output.format,
        };
        a.write_text("config.toml", &cfg.to_toml_string())?;
        Ok(a)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| io_err(&p, e))?;
        Ok(p)
    }

    /// Writes `<name>.csv` or `<name>.json` depending on the configured format.
    pub fn write_table(&self, name: &str, table: &Table) -> Result<PathBuf, CliError> {
        match self.format {
            TableFormat::Csv => {
                let p = self.path(&format!("{name}.csv"));
                let mut text = format!("# config_digest={} master_seed={}\n", self.digest, self.seed);
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.columns).map_err(|e| io_err(&p, e))?;
                for r in &table.rows {
                    w.write_record(r.iter().map(Cell::csv_field)).map_err(|e| io_err(&p, e))?;
                }
                let body = w.into_inner().map_err(|e| io_err(&p, e))?;
                text.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
                fs::write(&p, text).map_err(|e| io_err(&p, e))?;
                Ok(p)
            }
            TableFormat::Json => {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let v = json!({
                    "config_digest": self.digest,
                    "master_seed": self.seed,
                    "columns": table.columns,
                    "rows": rows,
                });
                self.write_json(&format!("{name}.json"), &v)
            }
        }
    }

    /// Writes `summary.json` with the command name, digest and seed prepended.
    pub fn write_summary(&self, body: Value) -> Result<PathBuf, CliError> {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("config_digest".into(), json!(self.digest));
        m.insert("master_seed".into(), json!(self.seed));
        if let Value::Object(b) = body {
            m.extend(b);
        } else {
            m.insert("result".into(), body);
        }
        self.write_json("summary.json", &Value::Object(m))
    }

    fn write_json(&self, name: &str, v: &Value) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::Other(e.to_string()))?;
        text.push('\n');
        self.write_text(name, &text)
    }

    /// Appends a timestamped line to `run.log`.
    pub fn log(&self, msg: &str) -> Result<(), CliError> {
        let p = self.path("run.log");
        let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        let mut f = OpenOptions::new().create(true).append(true).open(&p).map_err(|e| io_err(&p, e))?;
        writeln!(f, "[{t:.3}] {msg}").map_err(|e| io_err(&p, e))
    }
}

fn io_err(p: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", p.display()))
}
