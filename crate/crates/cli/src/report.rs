use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Everything a subcommand prints: its inputs, the formula evaluated and the results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub formula: String,
    pub inputs: Value,
    pub results: Value,
}

/// JSON number, or `"inf"`/`"-inf"`/`"nan"` for non-finite values.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".into()),
        None if x > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    fn sections(&self) -> Vec<(&'static str, Vec<(String, String)>)> {
        let mut inputs = Vec::new();
        flatten("", &self.inputs, &mut inputs);
        let mut results = Vec::new();
        flatten("", &self.results, &mut results);
        vec![
            (
                "meta",
                vec![
                    ("command".to_string(), self.command.clone()),
                    ("formula".to_string(), self.formula.clone()),
                ],
            ),
            ("inputs", inputs),
            ("results", results),
        ]
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report is valid JSON") + "\n",
            Format::Csv => {
                let mut out = String::from("section,field,value\n");
                for (section, rows) in self.sections() {
                    for (k, v) in rows {
                        let _ = writeln!(out, "{section},{},{}", csv_field(&k), csv_field(&v));
                    }
                }
                out
            }
            Format::Table => {
                let mut out = String::new();
                for (section, rows) in self.sections() {
                    if section != "meta" {
                        let _ = writeln!(out, "[{section}]");
                    }
                    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                    for (k, v) in rows {
                        let _ = writeln!(out, "  {k:<width$}  {v}");
                    }
                }
                out
            }
        }
    }
}
