//! Deterministic CSV and JSON emission.

use serde_json::{Map, Value};

use super::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "pass" } else { "fail" }.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command produces.
#[derive(Clone, Debug, Default)]
pub struct Report {
    /// Extra metadata beyond the resolved config, in insertion order.
    pub meta: Map<String, Value>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.to_string(), value.into());
    }
}

pub fn format_float(v: f64, precision: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.precision$e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell_text(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(f) => format_float(*f, precision),
        Cell::Text(t) => csv_field(t),
        Cell::Empty => String::new(),
    }
}

fn round_to(v: f64, precision: usize) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    format_float(v, precision).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

pub fn render(report: &Report, config: &Value, format: Format, precision: usize) -> String {
    match format {
        Format::Csv => render_csv(report, config, precision),
        Format::Json => render_json(report, config, precision),
    }
}

fn render_csv(report: &Report, config: &Value, precision: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!("# orbitwalk {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# config: {}\n", serde_json::to_string(config).expect("json")));
    for (k, v) in &report.meta {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.as_f64().map(|f| format_float(f, precision)).unwrap_or_else(|| n.to_string()),
            other => other.to_string(),
        };
        out.push_str(&format!("# {k}: {text}\n"));
    }
    for t in &report.tables {
        out.push_str(&format!("# table: {}\n", t.name));
        out.push_str(&t.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &t.rows {
            out.push_str(&row.iter().map(|c| cell_text(c, precision)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
    }
    out
}

fn render_json(report: &Report, config: &Value, precision: usize) -> String {
    let mut meta = Map::new();
    meta.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    meta.insert("config".into(), config.clone());
    for (k, v) in &report.meta {
        let v = match v {
            Value::Number(n) if n.is_f64() => round_to(n.as_f64().unwrap_or(f64::NAN), precision),
            other => other.clone(),
        };
        meta.insert(k.clone(), v);
    }
    let tables: Vec<Value> = report
        .tables
        .iter()
        .map(|t| {
            let data: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    Value::Array(
                        r.iter()
                            .map(|c| match c {
                                Cell::Int(i) => Value::from(*i),
                                Cell::Float(f) => round_to(*f, precision),
                                Cell::Text(s) => Value::String(s.clone()),
                                Cell::Empty => Value::Null,
                            })
                            .collect(),
                    )
                })
                .collect();
            serde_json::json!({ "name": t.name, "columns": t.columns, "data": data })
        })
        .collect();
    let doc = serde_json::json!({ "meta": meta, "tables": tables });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}
