//! Report assembly: one table of rows rendered as JSON or CSV.

use serde_json::{json, Map, Value};

use bunkbed::BaseGraph;

use crate::args::Format;

/// A single table cell. JSON and CSV render the same text for it.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    List(Vec<usize>),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Bool(b) => json!(b),
            Cell::List(v) => json!(v),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Text(s) => csv_escape(s),
            Cell::List(v) => {
                let joined: Vec<String> = v.iter().map(usize::to_string).collect();
                csv_escape(&joined.join(" "))
            }
            // serde_json's number rendering keeps CSV and JSON digits identical.
            other => other.to_json().to_string(),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Vec<usize>> for Cell {
    fn from(v: Vec<usize>) -> Self {
        Cell::List(v)
    }
}

/// Tabular output plus JSON-only metadata.
#[derive(Debug, Clone)]
pub struct Report {
    pub meta: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// A verification failed or a violation was found.
    pub violation: bool,
    /// With exactly one row, also copy its fields to the top level.
    pub flatten_single: bool,
    /// Non-fatal diagnostics for the error stream.
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), json!(command));
        Self {
            meta,
            columns,
            rows: Vec::new(),
            violation: false,
            flatten_single: false,
            warnings: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: Value) -> &mut Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn json_rows(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut obj = self.meta.clone();
                let rows = self.json_rows();
                if self.flatten_single && rows.len() == 1 {
                    if let Value::Object(fields) = &rows[0] {
                        obj.extend(fields.clone());
                    }
                }
                obj.insert("rows".into(), Value::Array(rows));
                let mut s =
                    serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub fn graph_json(family: &str, g: &BaseGraph) -> Value {
    json!({
        "family": family,
        "vertices": g.n_vertices(),
        "edges": g.edges().iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
    })
}
