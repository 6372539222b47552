use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Column-oriented result shared by every command.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self { headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

pub fn render(table: &Table, format: Format, config: Value, provenance: Value) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = table.headers.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect();
                    Value::Object(obj)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({ "config": config, "rows": rows, "provenance": provenance }))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers)?;
            for r in &table.rows {
                w.write_record(r.iter().map(cell_text))?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = table.rows.iter().map(|r| r.iter().map(cell_text).collect()).collect();
            let widths: Vec<usize> = table
                .headers
                .iter()
                .enumerate()
                .map(|(i, h)| cells.iter().map(|r| r[i].chars().count()).max().unwrap_or(0).max(h.chars().count()))
                .collect();
            let line = |items: Vec<String>| -> String {
                let parts: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
                parts.join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(table.headers.iter().map(|h| h.to_string()).collect());
            for r in cells {
                out.push_str(&line(r));
            }
            out
        }
    })
}

pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
