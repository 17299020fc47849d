//! CSV and JSON emission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::config::Format;

/// Shortest round-trip decimal, `inf` for infinities.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:?}")
    }
}

/// A header row plus data rows, already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let cell = |s: &String| match s.parse::<f64>() {
            Ok(v) if v.is_finite() => serde_json::json!(v),
            _ => Value::String(s.clone()),
        };
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    Value::Object(
                        self.header
                            .iter()
                            .map(|h| h.to_string())
                            .zip(r.iter().map(cell))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// What a command produced.
pub enum Report {
    Table(Table),
    /// Structured document; the table is its CSV rendering.
    Document {
        json: Value,
        table: Table,
    },
}

impl Report {
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let sink: Box<dyn Write> = match path {
            Some(p) => {
                Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
            }
            None => Box::new(io::stdout().lock()),
        };
        let mut sink = BufWriter::new(sink);
        match (format, self) {
            (Format::Csv, Report::Table(t) | Report::Document { table: t, .. }) => {
                let mut w = csv::Writer::from_writer(&mut sink);
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
            (Format::Json, Report::Table(t)) => {
                serde_json::to_writer_pretty(&mut sink, &t.to_json())?;
                writeln!(sink)?;
            }
            (Format::Json, Report::Document { json, .. }) => {
                serde_json::to_writer_pretty(&mut sink, json)?;
                writeln!(sink)?;
            }
        }
        sink.flush()?;
        Ok(())
    }
}
