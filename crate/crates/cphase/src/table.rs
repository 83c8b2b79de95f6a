//! Numeric tables and their CSV/JSON serializations.
//!
//! Numbers are written with 15 significant digits, '.' decimal separator
//! and '\n' line endings, so identical runs produce byte-identical files on
//! every platform and CSV values round-trip through the JSON form.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// 15-significant-digit scientific form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.14e}")
}

/// Column-labelled numeric rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"meta": ..., "rows": [{column: value, ...}, ...]}`
    pub fn to_json(&self, meta: &Value) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, &x) in self.columns.iter().zip(row.iter()) {
                    let num = serde_json::Number::from_f64(x).ok_or_else(|| {
                        Error::InvalidParams(format!("non-finite value in column {name}"))
                    })?;
                    obj.insert(name.clone(), Value::Number(num));
                }
                Ok(Value::Object(obj))
            })
            .collect::<Result<_>>()?;
        let doc = json!({ "meta": meta, "rows": rows });
        let mut text =
            serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidParams(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn write(&self, path: &Path, format: OutputFormat, meta: &Value) -> Result<()> {
        let text = match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(meta)?,
        };
        fs::write(path, text)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}
