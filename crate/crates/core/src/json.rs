//! Float rendering for the JSON interchange files.
//!
//! Every double is written with 17 significant digits so that files round-trip
//! bit-for-bit regardless of the reader's float formatting.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Format one finite double at 17 significant digits.
pub fn format_f64(value: f64) -> Option<String> {
    value.is_finite().then(|| format!("{value:.16e}"))
}

pub fn serialize_f64_slice<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
    let mut text = String::with_capacity(values.len() * 24 + 2);
    text.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            text.push(',');
        }
        text.push_str(&format_f64(*v).ok_or_else(|| S::Error::custom("non-finite value"))?);
    }
    text.push(']');
    let raw = RawValue::from_string(text).map_err(S::Error::custom)?;
    raw.serialize(serializer)
}
