use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Bad arguments, unreadable or malformed input; maps to exit code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn usage(msg: impl fmt::Display) -> CliError {
    CliError(msg.to_string())
}

/// Parses JSON text; an envelope produced by this tool is unwrapped to its `result`.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        usage(format!(
            "{origin}:{}:{}: malformed JSON: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let value = match value {
        Value::Object(mut m) if m.contains_key("manifest") && m.contains_key("result") => {
            m.remove("result").unwrap_or(Value::Null)
        }
        v => v,
    };
    serde_json::from_value(value).map_err(|e| usage(format!("{origin}: schema error: {e}")))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

/// Rounds every non-integer number to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                if let Some(m) = serde_json::Number::from_f64(r) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

pub fn write_json<T: Serialize>(path: &Path, x: &T) -> Result<(), CliError> {
    let mut v = to_value(x);
    round_floats(&mut v);
    std::fs::write(path, to_pretty(&v) + "\n")
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}
