//! JSON reports with 17 significant digits, and CSV helpers.

use crate::config::RunConfig;
use serde::Serialize;
use serde_json::ser::Formatter;
use std::io::{self, Write};

/// Compact JSON whose floats carry 17 significant digits.
struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub result: &'a serde_json::Value,
    pub pass: bool,
    pub exit_code: i32,
}

/// 17 significant digits; −0 prints as 0.
pub fn float(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

/// `key,value` rows for every scalar leaf of a JSON value; arrays are
/// skipped.
pub fn key_value_csv(value: &serde_json::Value) -> String {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut String) {
        use serde_json::Value::*;
        let cell = match v {
            Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, child, out);
                }
                return;
            }
            Array(_) => return,
            Null => std::string::String::new(),
            Bool(b) => b.to_string(),
            Number(n) => n.as_f64().map(float).unwrap_or_else(|| n.to_string()),
            String(s) => format!("\"{}\"", s.replace('"', "\"\"")),
        };
        out.push_str(&format!("{prefix},{cell}\n"));
    }
    let mut out = String::from("key,value\n");
    walk("", value, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_roundtrip() {
        let v = serde_json::json!({"x": 0.1, "y": [1.0 / 3.0, -2.5e-300], "z": f64::NAN, "k": 3});
        let s = to_json(&v).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"z\":null"));
        assert!(s.contains("\"k\":3"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["y"][0].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(back["y"][1].as_f64().unwrap(), -2.5e-300);
    }

    #[test]
    fn key_value_rows() {
        let v = serde_json::json!({"a": {"b": true, "c": [1, 2]}, "d": "x"});
        assert_eq!(key_value_csv(&v), "key,value\na.b,true\nd,\"x\"\n");
    }
}
