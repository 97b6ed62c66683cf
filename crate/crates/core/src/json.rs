//! Big integers as exact JSON numbers.
//!
//! With `serde_json`'s `arbitrary_precision` feature a [`serde_json::Number`]
//! built from a digit string is written verbatim, so values beyond `u64` stay
//! exact instead of turning into strings or floats.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

fn number(n: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&n.to_string()).expect("decimal integer literal")
}

pub fn bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    number(n).serialize(s)
}

pub fn bigints<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for n in v {
        seq.serialize_element(&number(n))?;
    }
    seq.end()
}

/// Serializes as a JSON array of exact integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ints(#[serde(serialize_with = "bigints")] pub Vec<BigInt>);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_values_stay_exact() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let json = serde_json::to_string(&Ints(vec![BigInt::from(-3), big])).unwrap();
        assert_eq!(json, "[-3,123456789012345678901234567890]");
    }
}
