use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use checkerdisc::{Error, Result, Witness};

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rewrite every float in a JSON tree with [`round12`].
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn fmt_float(x: f64) -> String {
    serde_json::to_string(&round12(x)).unwrap_or_else(|_| "null".into())
}

pub fn fmt_witness(w: &Witness) -> String {
    match *w {
        Witness::Segment { ax, ay, bx, by } => format!(
            "segment:{};{};{};{}",
            fmt_float(ax),
            fmt_float(ay),
            fmt_float(bx),
            fmt_float(by)
        ),
        Witness::Circle { cx, cy, t } => format!("circle:{};{};{}", fmt_float(cx), fmt_float(cy), fmt_float(t)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Where results go: a file when `--out` is given, stdout otherwise.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// A single result as pretty JSON, or as a one-row CSV of its top-level
/// fields (nested values are embedded as JSON text).
pub fn render(value: &impl Serialize, format: Format) -> Result<String> {
    let value = round_value(serde_json::to_value(value)?);
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&value)? + "\n"),
        Format::Csv => {
            let map = match value {
                Value::Object(map) => map,
                other => Map::from_iter([("value".to_string(), other)]),
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(map.keys()).map_err(csv_error)?;
            w.write_record(map.values().map(|v| match v {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            }))
            .map_err(csv_error)?;
            finish_csv(w)
        }
    }
}

pub fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}
