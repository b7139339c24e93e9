//! Canonical report text: sorted keys, floats at 12 significant digits.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// `x` rounded to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 { 0.0 } else { r }
}

/// Round every float in `v`; non-finite floats become `null`.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    canonicalize(serde_json::to_value(t).expect("report values serialize"))
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn render(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&canonicalize(v.clone())).map_err(|e| Error::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// `v` with every non-integer number removed: what must not change when
/// tolerances do.
pub fn integer_skeleton(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::Null,
        Value::Array(a) => Value::Array(a.iter().map(integer_skeleton).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, v)| (k.clone(), integer_skeleton(v))).collect()),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-0.0), 0.0);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(123456.7890123456), 123456.789012);
        assert_eq!(round12(-2.5e-17), -2.5e-17);
    }

    #[test]
    fn keys_sorted_and_floats_rounded() {
        let v = json!({"b": 1, "a": [0.1, 2, f64::NAN.to_string()], "c": {"z": 1e-20, "y": -0.0}});
        let text = render(&v).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.contains("\"y\": 0.0"));
        assert_eq!(integer_skeleton(&json!({"a": 1.5, "b": 2})), json!({"a": null, "b": 2}));
    }
}
