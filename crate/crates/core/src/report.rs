//! JSON reports: sorted keys, floats printed with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CAVEAT_SAMPLED: &str = "sampled";
pub const CAVEAT_TRUNCATED: &str = "truncated";
pub const CAVEAT_EVIDENCE: &str = "evidence";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub symbol: String,
    pub parameters: Map<String, Value>,
    pub verdicts: Vec<Value>,
    pub caveats: Vec<String>,
    pub version: String,
}

impl Report {
    pub fn new(command: &str, symbol: impl Into<String>) -> Self {
        Report {
            command: command.to_string(),
            symbol: symbol.into(),
            parameters: Map::new(),
            verdicts: Vec::new(),
            caveats: Vec::new(),
            version: VERSION.to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    /// Appends `record` with an extra `kind` field.
    pub fn verdict(&mut self, kind: &str, record: impl Serialize) -> &mut Self {
        let mut v = to_value(record);
        match &mut v {
            Value::Object(m) => {
                m.insert("kind".into(), Value::String(kind.into()));
            }
            other => {
                let mut m = Map::new();
                m.insert("kind".into(), Value::String(kind.into()));
                m.insert("value".into(), other.take());
                v = Value::Object(m);
            }
        }
        self.verdicts.push(v);
        self
    }

    pub fn caveat(&mut self, c: &str) -> &mut Self {
        if !self.caveats.iter().any(|x| x == c) {
            self.caveats.push(c.to_string());
            self.caveats.sort();
        }
        self
    }

    pub fn to_json(&self) -> String {
        render(&to_value(self))
    }
}

fn to_value(v: impl Serialize) -> Value {
    // Map is ordered by key, so every object comes out sorted.
    serde_json::to_value(v).expect("report values serialize")
}

/// Compact JSON whose floats always carry 17 significant digits.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn render(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    v.serialize(&mut ser).expect("writing to a Vec cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json emits UTF-8");
    s.push('\n');
    s
}

/// Drops the `version` field, for comparisons across releases.
pub fn strip_version(json: &str) -> String {
    match serde_json::from_str::<Value>(json) {
        // 17 significant digits round-trip, so re-rendering is byte-stable
        Ok(Value::Object(mut m)) => {
            m.remove("version");
            render(&Value::Object(m))
        }
        _ => json.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits_and_keys_are_sorted() {
        let mut r = Report::new("gram", "poly:0,0.8");
        r.param("rho_max", 0.9).param("N", 64);
        r.verdict("x", serde_json::json!({"b": 1.0, "a": 0.1}));
        r.caveat("sampled").caveat("evidence").caveat("sampled");
        let s = r.to_json();
        assert!(s.starts_with("{\"caveats\":[\"evidence\",\"sampled\"],\"command\":\"gram\""));
        assert!(s.contains("\"N\":64,\"rho_max\":9.0000000000000002e-1"));
        assert!(s.contains("{\"a\":1.0000000000000001e-1,\"b\":1.0000000000000000e0,\"kind\":\"x\"}"));
        assert!(s.ends_with("\"version\":\"0.1.0\"}\n"));
    }

    #[test]
    fn version_stripping_is_lossless_otherwise() {
        let mut r = Report::new("scan", "rz");
        r.param("tol", 1e-10).param("third", 1.0 / 3.0);
        let s = r.to_json();
        let stripped = strip_version(&s);
        assert!(!stripped.contains("version"));
        assert!(stripped.contains("3.3333333333333331e-1"));
        assert_eq!(strip_version(&stripped), stripped);
    }
}
