use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Provenance written as the first line of every output.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub command: &'static str,
    pub params: Value,
    pub version: &'static str,
    pub seed: u64,
}

/// A named-column table with an optional summary object.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub footer: Option<Map<String, Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), footer: None }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn footer(&mut self, key: &str, value: Value) {
        self.footer.get_or_insert_with(Map::new).insert(key.to_string(), value);
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// CSV: the header line, a CSV body, then the footer as one JSON line.
/// JSON: the header line, then one document with `columns`, `rows` and `footer`.
pub fn emit<W: Write>(header: &Header, table: &Table, format: Format, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, header)?;
    writeln!(out)?;
    match format {
        Format::Csv => {
            {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&table.columns)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(cell))?;
                }
                w.flush()?;
            }
            if let Some(f) = &table.footer {
                serde_json::to_writer(&mut out, f)?;
                writeln!(out)?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Object(table.columns.iter().cloned().zip(r.iter().cloned()).collect()))
                .collect();
            let doc = json!({ "columns": table.columns, "rows": rows, "footer": table.footer });
            serde_json::to_writer(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()
}
