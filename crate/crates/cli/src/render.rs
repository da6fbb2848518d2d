use serde::Serialize;
use serde_json::{json, Value};

use riesz_core::Rat;

use crate::Failure;

/// Pretty JSON with a trailing newline. With `float_view` the result moves
/// under `"result"` and a decimal copy sits beside it.
pub(crate) fn json(result: Value, float_view: bool) -> String {
    let v = if float_view {
        let approx = decimals(&result);
        json!({ "result": result, "float_view": approx })
    } else {
        result
    };
    let mut s = serde_json::to_string_pretty(&v).expect("json value");
    s.push('\n');
    s
}

/// Replaces every `"p/q"` string by its nearest double.
fn decimals(v: &Value) -> Value {
    match v {
        Value::String(s) if s.contains('/') => match s.parse::<Rat>() {
            Ok(r) => serde_json::Number::from_f64(r.to_f64()).map_or_else(|| v.clone(), Value::Number),
            Err(_) => v.clone(),
        },
        Value::Array(a) => Value::Array(a.iter().map(decimals).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, x)| (k.clone(), decimals(x))).collect()),
        other => other.clone(),
    }
}

pub(crate) fn csv<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Invalid(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}
