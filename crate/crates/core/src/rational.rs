//! Exact rational scalars and their text / JSON encodings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Lossy conversion used only at the boundary to floating point checks.
pub fn to_f64(r: &Rational) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators without overflow
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// Parses `a`, `a/b`, `-a/b` or a plain decimal such as `0.125` (read exactly).
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| format!("bad numerator {n:?}: {e}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| format!("bad denominator {d:?}: {e}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit())
            || !ip_digits.chars().all(|c| c.is_ascii_digit())
            || (ip_digits.is_empty() && fp.is_empty())
        {
            return Err(format!("bad decimal {t:?}"));
        }
        let digits = format!("{ip_digits}{fp}");
        let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|e| format!("bad decimal {t:?}: {e}"))?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), fp.len());
        return Ok(BigRational::new(num, den));
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|e| format!("bad integer {t:?}: {e}"))
}

/// `a/b`, or just `a` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Serde adapter: rationals as `"a/b"` strings; also accepts JSON numbers on input.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rational(&v).map_err(de::Error::custom)
    }
}

/// Same as [`as_string`] for `Vec<Rational>`.
pub mod vec_as_string {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| value_to_rational(x).map_err(de::Error::custom))
            .collect()
    }
}

pub fn value_to_rational(v: &serde_json::Value) -> Result<Rational, String> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(BigInt::from(u)))
            } else {
                // A float literal: re-read its decimal text so 0.1 means 1/10.
                parse_rational(&n.to_string())
                    .or_else(|_| n.as_f64().and_then(from_f64).ok_or_else(|| "bad number".into()))
            }
        }
        other => Err(format!("expected rational, got {other}")),
    }
}

/// Big integer as a JSON number when it fits in `i64`, as a decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(i) => s.serialize_i64(i),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(JsonInt(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Ok(JsonInt(BigInt::from(u)))
                } else {
                    Err(de::Error::custom(format!("expected integer, got {n}")))
                }
            }
            serde_json::Value::String(s) => BigInt::from_str(s.trim())
                .map(JsonInt)
                .map_err(de::Error::custom),
            other => Err(de::Error::custom(format!("expected integer, got {other}"))),
        }
    }
}
