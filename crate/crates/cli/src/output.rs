use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

/// One table cell. Floats go out with 17 significant digits.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_f64(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => float_json(*x),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Non-finite floats become strings, since JSON has no literal for them.
pub fn float_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// A tabular result plus metadata, rendered as commented CSV or JSON.
#[derive(Debug, Default)]
pub struct Artifact {
    pub meta: Vec<(String, Value)>,
    /// Column names with a one-line description each.
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
    /// Replaces `rows` in JSON output (dense matrices).
    pub json_body: Option<(&'static str, Value)>,
}

impl Artifact {
    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn meta_f64(&mut self, key: &str, value: f64) {
        self.meta.push((key.to_string(), float_json(value)));
    }

    pub fn render(&self, cfg: &RunConfig, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Csv => self.render_csv(cfg),
            Format::Json => self.render_json(cfg),
        }
    }

    fn render_csv(&self, cfg: &RunConfig) -> anyhow::Result<String> {
        let mut out = format!("# run_config: {}\n", cfg.to_json_line()?);
        for (k, v) in &self.meta {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map_or_else(|| n.to_string(), fmt_f64),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}: {v}\n"));
        }
        for (name, doc) in &self.columns {
            out.push_str(&format!("# column {name}: {doc}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|(n, _)| *n))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }

    fn render_json(&self, cfg: &RunConfig) -> anyhow::Result<String> {
        let mut root = Map::new();
        root.insert("run_config".into(), serde_json::to_value(cfg)?);
        root.insert("meta".into(), Value::Object(self.meta.iter().cloned().collect()));
        let columns: Map<String, Value> = self.columns.iter().map(|(n, d)| (n.to_string(), json!(d))).collect();
        root.insert("columns".into(), Value::Object(columns));
        match &self.json_body {
            Some((key, body)) => {
                root.insert(key.to_string(), body.clone());
            }
            None => {
                let names: Vec<&str> = self.columns.iter().map(|(n, _)| *n).collect();
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(names.iter().zip(r).map(|(n, c)| (n.to_string(), c.json())).collect()))
                    .collect();
                root.insert("rows".into(), Value::Array(rows));
            }
        }
        Ok(serde_json::to_string_pretty(&Value::Object(root))? + "\n")
    }
}

/// Writes to the resolved path, or standard output when there is none.
pub fn emit(path: Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(&p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, -7.25e12, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }
}
