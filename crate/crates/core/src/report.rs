//! Canonical JSON for reports: sorted keys, floats rounded to 12
//! significant digits, non-finite values as `null`.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "ghost-lab/1";
pub const SIGNIFICANT_DIGITS: usize = 12;
pub const HEADER: &str = "finite-scale evidence: every statement below concerns the listed finite window only; \
no limit, K-theory or infinite-family claim is made";

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// A number value with fixed precision, `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

/// Serializes and then rounds every float in the tree.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    canonicalize(serde_json::to_value(v).expect("report types serialize"))
}

pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64 number")),
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// The report with its `timing` field removed, for comparisons.
pub fn without_timing(v: &Value) -> Value {
    let mut v = v.clone();
    if let Value::Object(map) = &mut v {
        map.remove("timing");
    }
    v
}

pub fn object(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}

/// `x` with `digits` significant digits in positional notation.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit, e.g. 9.999995 -> 10.00000.
    let sig = s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
    if sig > digits && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}
