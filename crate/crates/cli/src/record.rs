//! Output tables with their provenance, written as CSV or JSON.

use std::fmt::Write as _;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::inputs::{OutputFormat, RunInputs};
use crate::sweep::SweepSpec;

pub const INPUTS_PREFIX: &str = "# inputs: ";
pub const SWEEP_PREFIX: &str = "# sweep: ";

pub const SOFTWARE: &str = concat!("gravent ", env!("CARGO_PKG_VERSION"));

/// One table cell. Non-finite numbers travel as the strings `inf`,
/// `-inf` and `nan` in JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Text(_) => None,
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn empty() -> Self {
        Value::Text(String::new())
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

fn non_finite_name(v: f64) -> Option<&'static str> {
    if v.is_nan() {
        Some("nan")
    } else if v == f64::INFINITY {
        Some("inf")
    } else if v == f64::NEG_INFINITY {
        Some("-inf")
    } else {
        None
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Num(v) => match non_finite_name(*v) {
                Some(name) => s.serialize_str(name),
                None => s.serialize_f64(*v),
            },
            Value::Text(t) => s.serialize_str(t),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ValueVisitor;
        impl Visitor<'_> for ValueVisitor {
            type Value = Value;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or a string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Value, E> {
                Ok(Value::Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
                Ok(Value::Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
                Ok(Value::Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
                Ok(match v {
                    "nan" => Value::Num(f64::NAN),
                    "inf" => Value::Num(f64::INFINITY),
                    "-inf" => Value::Num(f64::NEG_INFINITY),
                    _ => Value::Text(v.to_owned()),
                })
            }
        }
        d.deserialize_any(ValueVisitor)
    }
}

/// A finished run: inputs, software version, timing, warnings and the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub software: String,
    pub command: String,
    pub inputs: RunInputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub wall_clock_seconds: f64,
    pub warnings: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl RunRecord {
    pub fn new(command: &str, inputs: RunInputs, columns: &[&str]) -> Self {
        Self {
            software: SOFTWARE.to_owned(),
            command: command.to_owned(),
            inputs,
            sweep: None,
            wall_clock_seconds: 0.0,
            warnings: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Row whose first cell is the text `key` (report-style tables).
    pub fn lookup(&self, key: &str) -> Option<&[Value]> {
        self.rows
            .iter()
            .find(|r| matches!(r.first(), Some(Value::Text(t)) if t == key))
            .map(|r| r.as_slice())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("record serialises");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# software: {}", self.software);
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# wall_clock_seconds: {:.6}", self.wall_clock_seconds);
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {}", w.replace('\n', " "));
        }
        let _ = writeln!(
            out,
            "{INPUTS_PREFIX}{}",
            serde_json::to_string(&self.inputs).expect("inputs serialise")
        );
        if let Some(sweep) = &self.sweep {
            let _ = writeln!(out, "{SWEEP_PREFIX}{}", serde_json::to_string(sweep).expect("sweep serialises"));
        }
        out.push_str(&self.csv_body());
        out
    }

    /// Column header and rows only; independent of timing and worker count.
    pub fn csv_body(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(v: f64) -> String {
    match non_finite_name(v) {
        Some(name) => name.to_owned(),
        None => format!("{v:.16e}"),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Num(x) => format_float(*x),
        Value::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Value::Text(t) => t.clone(),
    }
}

/// Parses the numeric body of a CSV written by [`RunRecord::to_csv`].
pub fn parse_csv_numbers(text: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns = lines
        .next()
        .map(|h| h.split(',').map(str::to_owned).collect())
        .unwrap_or_default();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().ok()).collect())
        .collect();
    (columns, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE, 123_456_789.123_456_79] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!("inf".parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn values_round_trip_through_json() {
        let row = vec![Value::Num(1.5), Value::Num(f64::INFINITY), Value::text("x"), Value::Num(-0.0)];
        let s = serde_json::to_string(&row).unwrap();
        let back: Vec<Value> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], row[0]);
        assert_eq!(back[1], row[1]);
        assert_eq!(back[2], row[2]);
    }

    #[test]
    fn csv_quotes_text() {
        let mut r = RunRecord::new("t", RunInputs::default(), &["a", "b"]);
        r.rows.push(vec![Value::Num(2.0), Value::text("x, y")]);
        assert!(r.csv_body().ends_with("2.0000000000000000e0,\"x, y\"\n"));
    }
}
