use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        <Format as ValueEnum>::from_str(s, true)
            .map_err(|_| CliError::usage(format!("unknown format `{s}` (expected json, csv or table)")))
    }
}

/// Rows of named fields rendered as JSON, versioned CSV or an aligned table.
pub struct Records {
    /// Name used in the CSV version line, `# permtypical-<schema> v1`.
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Records {
    pub fn new(schema: &'static str, columns: Vec<&'static str>) -> Self {
        Records {
            schema,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json(&self) -> Value {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map = self
                    .columns
                    .iter()
                    .zip(row)
                    .filter(|(_, v)| !v.is_null())
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(map)
            })
            .collect();
        match <[Value; 1]>::try_from(objects) {
            Ok([single]) => single,
            Err(many) => Value::Array(many),
        }
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut out = format!("# permtypical-{} v1\n", self.schema).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| CliError::usage(format!("csv: {e}"));
            w.write_record(&self.columns).map_err(io)?;
            for row in &self.rows {
                w.write_record(row.iter().map(cell_text)).map_err(io)?;
            }
            w.flush().map_err(|e| CliError::usage(format!("csv: {e}")))?;
        }
        Ok(String::from_utf8(out).expect("csv output is UTF-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => self.csv()?,
            Format::Table => table(
                &self.columns,
                &self.rows.iter().map(|r| r.iter().map(cell_text).collect()).collect::<Vec<_>>(),
            ),
        })
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::usage(format!("cannot write to stdout: {e}")))
        }
    }
}
