use nonlocal::format::AnyModel;
use nonlocal::Scalar;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u64 = 1;

/// `x` rounded to 12 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float");
    json!(if r == 0.0 { 0.0 } else { r })
}

pub fn scalar<S: Scalar>(x: &S) -> Value {
    num(x.to_f64_lossy())
}

/// Exact value as `"p/q"` for exact scalars, else `null`.
pub fn exact<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        Value::String(x.to_string())
    } else {
        Value::Null
    }
}

/// SHA-256 of the compact canonical serialisation.
pub fn model_hash(model: &AnyModel) -> String {
    let text = serde_json::to_string(&model.to_json()).expect("serialisable");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn model_identity(model: &AnyModel) -> Value {
    json!({
        "hash": model_hash(model),
        "scenario": model.scenario().outcome_counts(),
        "kind": model.kind(),
        "exact": matches!(model, AnyModel::Exact(_) | AnyModel::Possibility(_)),
    })
}

/// Starts a report object for `command`.
pub fn header(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

/// Named checks a census or audit command asserts.
#[derive(Default)]
pub struct Assertions(Vec<(String, bool)>);

impl Assertions {
    pub fn check(&mut self, name: &str, passed: bool) {
        self.0.push((name.to_string(), passed));
    }

    pub fn failed(&self) -> Vec<String> {
        self.0.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|(name, passed)| json!({"name": name, "passed": passed}))
                .collect(),
        )
    }
}

/// Plain-text rendering: one `key: value` line per top-level field.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    match report.as_object() {
        Some(obj) => {
            for (k, v) in obj {
                let v = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        None => out.push_str(&format!("{report}\n")),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.09016994374947424).to_string(), "0.0901699437495");
        assert_eq!(num(0.125).to_string(), "0.125");
        assert_eq!(num(-0.0).to_string(), "0.0");
        assert_eq!(num(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn hash_ignores_file_layout() {
        let m = AnyModel::Exact(nonlocal::catalog::pr_box());
        let reparsed = nonlocal::format::parse_model(&m.to_string_pretty()).unwrap();
        assert_eq!(model_hash(&m), model_hash(&reparsed));
        assert_eq!(model_hash(&m).len(), 64);
    }
}
