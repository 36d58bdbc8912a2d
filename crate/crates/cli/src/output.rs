use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;
use crate::CliError;

/// Provenance written at the top of every output.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub params: Value,
}

impl Header {
    pub fn new(command: &'static str, seed: u64, params: Value) -> Header {
        Header { tool: "tablewalk", version: env!("CARGO_PKG_VERSION"), command, seed, params }
    }

    pub fn comment_lines(&self) -> String {
        format!(
            "# {} {}\n# command: {}\n# seed: {}\n# params: {}\n",
            self.tool, self.version, self.command, self.seed, self.params
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as i128)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Cell {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

/// Rows under named columns.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, header: &Header, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(CliError::csv)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(CliError::csv)?;
                }
                let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                Ok(header.comment_lines() + &String::from_utf8(body).expect("ascii output"))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect(),
                        )
                    })
                    .collect();
                Ok(pretty(&json!({ "header": header, "rows": rows })))
            }
        }
    }
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

/// JSON document with the header under `"header"`.
pub fn json_document(header: &Header, body: Value) -> String {
    let mut doc = json!({ "header": header });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    pretty(&doc)
}
