//! JSON and CSV serialization of results.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::polyring::{MultiPoly, Rational};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected json or csv)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EmitError {
    #[error("{record} cannot be written as {format}")]
    UnsupportedFormat { record: &'static str, format: Format },
    #[error("malformed polynomial JSON: {0}")]
    BadPolynomial(String),
}

/// Numeric table with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// A result that can be serialized by [`emit`].
pub trait Record {
    fn kind(&self) -> &'static str;
    fn to_json(&self) -> Value;
    fn table(&self) -> Option<Table> {
        None
    }
    /// Reports carry a top-level schema tag; bare values do not.
    fn tagged(&self) -> bool {
        true
    }
}

pub fn emit(record: &dyn Record, format: Format) -> Result<Vec<u8>, EmitError> {
    match format {
        Format::Json => {
            let mut v = record.to_json();
            if record.tagged() {
                if let Value::Object(m) = &mut v {
                    let mut tagged = Map::new();
                    tagged.insert("schema".into(), json!(SCHEMA_VERSION));
                    tagged.append(m);
                    v = Value::Object(tagged);
                }
            }
            let mut out = serde_json::to_vec(&v).expect("JSON values serialize");
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let table = record.table().ok_or(EmitError::UnsupportedFormat {
                record: record.kind(),
                format,
            })?;
            Ok(table_csv(&table))
        }
    }
}

fn table_csv(t: &Table) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.header).expect("in-memory write");
    for row in &t.rows {
        w.write_record(row.iter().map(|x| fmt_float(*x)))
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Decimal with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn poly_json(p: &MultiPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| {
            json!({
                "exps": e,
                "num": c.numer().to_string(),
                "den": c.denom().to_string(),
            })
        })
        .collect();
    let mut m = Map::new();
    if !p.vars().is_empty() {
        m.insert("vars".into(), json!(p.vars()));
    }
    m.insert("terms".into(), Value::Array(terms));
    Value::Object(m)
}

pub fn poly_from_json(v: &Value) -> Result<MultiPoly, EmitError> {
    let bad = |m: &str| EmitError::BadPolynomial(m.to_string());
    let vars: Vec<String> = match v.get("vars") {
        None => Vec::new(),
        Some(vs) => serde_json::from_value(vs.clone()).map_err(|e| bad(&e.to_string()))?,
    };
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing `terms`"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let exps: Vec<u32> = t
            .get("exps")
            .cloned()
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| bad(&e.to_string()))?
            .ok_or_else(|| bad("missing `exps`"))?;
        if exps.len() != vars.len() {
            return Err(bad("exponent vector length differs from `vars`"));
        }
        let int = |key: &str| -> Result<BigInt, EmitError> {
            t.get(key)
                .and_then(Value::as_str)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(&format!("bad `{key}`")))
        };
        let den = int("den")?;
        if den == BigInt::from(0) {
            return Err(bad("zero denominator"));
        }
        out.push((exps, Rational::new(int("num")?, den)));
    }
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    Ok(MultiPoly::from_terms(&names, out))
}

impl Record for MultiPoly {
    fn kind(&self) -> &'static str {
        "polynomial"
    }
    fn to_json(&self) -> Value {
        poly_json(self)
    }
    fn tagged(&self) -> bool {
        false
    }
}
