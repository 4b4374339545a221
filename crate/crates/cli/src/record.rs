//! Output records and their text, JSON and CSV renderings.

use pqcalc::Evaluated;
use serde_json::{Map, Number, Value};
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// A JSON number carrying 17 significant digits, or a string for
/// non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"))
    } else {
        Value::String(x.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub terms_used: usize,
    pub tail_estimate: f64,
    pub path: &'static str,
}

impl<T> From<&Evaluated<T>> for Diagnostics {
    fn from(e: &Evaluated<T>) -> Self {
        Diagnostics {
            terms_used: e.terms,
            tail_estimate: e.tail,
            path: match e.path {
                pqcalc::Path::Series => "series",
                pqcalc::Path::Product => "product",
                pqcalc::Path::Grid => "grid",
                pqcalc::Path::Closed => "closed",
            },
        }
    }
}

impl Diagnostics {
    pub fn closed(terms_used: usize) -> Self {
        Diagnostics {
            terms_used,
            tail_estimate: 0.0,
            path: "closed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Record {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub value: Value,
    pub diagnostics: Option<Diagnostics>,
    /// Tabular form for CSV, header first.
    pub rows: Option<Vec<Vec<String>>>,
    /// Human-readable body for text output.
    pub text: String,
}

impl Record {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert(
            "inputs".into(),
            Value::Object(self.inputs.iter().map(|(k, v)| (k.clone(), v.clone())).collect()),
        );
        m.insert("value".into(), self.value.clone());
        if let Some(d) = &self.diagnostics {
            let mut dm = Map::new();
            dm.insert("path".into(), Value::String(d.path.into()));
            dm.insert("tail_estimate".into(), num(d.tail_estimate));
            dm.insert("terms_used".into(), Value::from(d.terms_used));
            m.insert("diagnostics".into(), Value::Object(dm));
        }
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string(&self.to_json()).expect("records serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let rows = self.rows.clone().unwrap_or_else(|| {
                    let d = self.diagnostics.unwrap_or(Diagnostics::closed(0));
                    vec![
                        vec!["command".into(), "value".into(), "terms_used".into(), "tail_estimate".into(), "path".into()],
                        vec![
                            self.command.clone(),
                            value_cell(&self.value),
                            d.terms_used.to_string(),
                            format!("{:.16e}", d.tail_estimate),
                            d.path.into(),
                        ],
                    ]
                });
                rows.iter().map(|r| r.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(",") + "\n").collect()
            }
            Format::Text => {
                let mut s = self.text.clone();
                if let Some(d) = &self.diagnostics {
                    s.push_str(&format!(
                        "terms_used = {}\ntail_estimate = {:e}\npath = {}\n",
                        d.terms_used, d.tail_estimate, d.path
                    ));
                }
                s
            }
        }
    }
}

fn value_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
