//! Machine-readable table output: CSV (one header row, 17 significant
//! digits) or JSON (array of row objects). Tables are rendered fully in
//! memory and written in one shot, so a failing run never leaves a partial
//! file behind.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Null,
}

impl Value {
    fn render_csv(&self) -> String {
        match self {
            Value::Float(v) => format!("{v:.16e}"),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => if *v { "1" } else { "0" }.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }

    fn render_json(&self) -> Json {
        match self {
            Value::Float(v) => json!(v),
            Value::Int(v) => json!(v),
            Value::Bool(v) => json!(v),
            Value::Text(s) => json!(s),
            Value::Null => Json::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Value::render_csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Json> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (name, value) in self.columns.iter().zip(row) {
                            obj.insert(name.to_string(), value.render_json());
                        }
                        Json::Object(obj)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&Json::Array(rows)).unwrap();
                s.push('\n');
                s
            }
        }
    }

    /// Writes to the path, or to stdout when no path is given.
    pub fn emit(&self, path: Option<&Path>, format: Format) -> std::io::Result<()> {
        let rendered = self.render(format);
        match path {
            Some(p) => fs::write(p, rendered),
            None => std::io::stdout().write_all(rendered.as_bytes()),
        }
    }
}
