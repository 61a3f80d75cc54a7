//! Serialize big integers as decimal strings so JSON consumers keep every digit.

use num_bigint::BigUint;
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_str_radix(10))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
    let text = String::deserialize(d)?;
    BigUint::parse_bytes(text.as_bytes(), 10)
        .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {text:?}")))
}
