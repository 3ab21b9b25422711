//! Result documents: a JSON envelope with 17-digit reals, or CSV tables.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::Row;
use crate::params::CliResult;

pub const SCHEMA_VERSION: u32 = 1;
const TOOL: &str = "rectdim";

/// Writes every `f64` as `{:.16e}`, i.e. 17 significant digits.
struct Precise;

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", real(value))
    }
}

pub fn real(x: f64) -> String {
    if x == 0.0 {
        // no "-0"
        "0.0000000000000000e0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub struct Status<'a> {
    pub code: &'a str,
    pub exit: i32,
    pub message: Option<String>,
}

pub fn envelope(
    command: &str,
    seed: u64,
    inputs: Value,
    status: Status,
    outputs: Value,
    wall: f64,
) -> Value {
    json!({
        "header": {
            "tool": TOOL,
            "timestamp": chrono::Utc::now().to_rfc3339(),
            "wall_time_s": wall,
        },
        "body": {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "inputs": inputs,
            "status": { "code": status.code, "exit": status.exit, "message": status.message },
            "outputs": outputs,
        }
    })
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => real(x),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// Scalars of `v` keyed by dotted path; arrays of scalars are joined with `;`.
pub fn flatten(prefix: &str, v: &Value, out: &mut Row) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => out.push((
            prefix.to_string(),
            Value::String(xs.iter().map(cell).collect::<Vec<_>>().join(";")),
        )),
        Value::Array(_) => {}
        scalar => out.push((prefix.to_string(), scalar.clone())),
    }
}

pub fn to_csv(rows: &[Row]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| k))?;
        for r in rows {
            w.write_record(r.iter().map(|(_, v)| cell(v)))?;
        }
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let s = to_json(&json!({"x": 4.0 / 3.0, "k": 1})).unwrap();
        assert_eq!(s.trim(), r#"{"x":1.3333333333333333e0,"k":1}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(4.0 / 3.0));
    }

    #[test]
    fn flatten_and_csv() {
        let mut r = Row::new();
        flatten(
            "",
            &json!({"a": {"b": 1.5}, "v": [1, 2], "skip": [{"x": 1}]}),
            &mut r,
        );
        let csv = to_csv(&[r]).unwrap();
        assert_eq!(csv, "a.b,v\n1.5000000000000000e0,1;2\n");
    }
}
