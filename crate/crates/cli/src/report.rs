//! Structured reports: an ordered JSON object printed to stdout and optionally saved.

use std::time::Instant;

use fqtile::tiling::TilingVerdict;
use fqtile::{FVec, FieldSpec};
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report(Map<String, Value>);

impl Report {
    pub fn new() -> Self {
        Report(Map::new())
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_owned(), value.into());
        self
    }

    /// Marks a field as deliberately absent.
    pub fn skip(&mut self, key: &str, reason: impl Into<String>) -> &mut Self {
        self.set(key, json!({ "skipped": reason.into() }))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.0).expect("report serializes");
        s.push('\n');
        s
    }
}

impl From<Report> for Value {
    fn from(r: Report) -> Value {
        r.into_value()
    }
}

/// Integers that may exceed `u64` are written as strings.
pub fn big(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

pub fn vector(v: &FVec) -> Value {
    Value::from(v.coords().to_vec())
}

pub fn field(f: &FieldSpec) -> Value {
    let mut m = Map::new();
    m.insert("q".into(), f.q().into());
    m.insert("p".into(), f.p().into());
    m.insert("k".into(), f.k().into());
    if let Some(modulus) = f.modulus() {
        m.insert("modulus".into(), modulus.to_vec().into());
    }
    Value::Object(m)
}

pub fn tiling_verdict(v: &TilingVerdict) -> Value {
    match v {
        TilingVerdict::Valid => json!({ "valid": true }),
        TilingVerdict::CardinalityMismatch { u_len, v_len, space_size } => json!({
            "valid": false,
            "reason": "cardinality",
            "u_size": u_len,
            "v_size": v_len,
            "space_size": space_size.map_or(Value::Null, big),
        }),
        TilingVerdict::Collision { sum, first, second } => json!({
            "valid": false,
            "reason": "collision",
            "sum": vector(sum),
            "first": { "u": vector(&first.0), "v": vector(&first.1) },
            "second": { "u": vector(&second.0), "v": vector(&second.1) },
        }),
    }
}

/// Wall-clock timings, recorded only when enabled so that reports stay reproducible.
pub struct Stopwatch {
    enabled: bool,
    entries: Map<String, Value>,
}

impl Stopwatch {
    pub fn new(enabled: bool) -> Self {
        Stopwatch { enabled, entries: Map::new() }
    }

    pub fn run<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            let ms = start.elapsed().as_secs_f64() * 1000.0;
            self.entries.insert(label.to_owned(), json!((ms * 1000.0).round() / 1000.0));
        }
        out
    }

    pub fn finish(self, report: &mut Report) {
        if self.enabled {
            report.set("timings_ms", Value::Object(self.entries));
        }
    }
}
