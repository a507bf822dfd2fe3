//! Exact rational helpers shared by the schedule, the phase ledger and the
//! drift machinery.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a decimal (`0.25`, `-1.5e-3`) or fraction (`1/4`) literal exactly.
pub fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let s = text.trim();
    let bad = || Error::InvalidNumber(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Converts a float to the rational its shortest decimal rendering denotes,
/// so `0.1_f64` becomes exactly `1/10`.
pub fn rational_from_f64(value: f64) -> Result<BigRational, Error> {
    if !value.is_finite() {
        return Err(Error::InvalidNumber(value.to_string()));
    }
    parse_rational(&format!("{value:e}"))
}

pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn ceil_u64(value: &BigRational) -> Option<u64> {
    value.ceil().to_integer().to_u64()
}

pub fn floor_u64(value: &BigRational) -> Option<u64> {
    value.floor().to_integer().to_u64()
}

/// Smallest `k` with `k * k >= value`.
pub fn ceil_sqrt(value: &BigInt) -> BigInt {
    if !value.is_positive() {
        return BigInt::zero();
    }
    let root = value.sqrt();
    if &(&root * &root) == value {
        root
    } else {
        root + BigInt::one()
    }
}

/// `⌈√x⌉` for a non-negative rational, exact.
pub fn ceil_sqrt_rational(value: &BigRational) -> BigInt {
    // k*k is an integer, so k*k >= x iff k*k >= ceil(x).
    ceil_sqrt(&value.ceil().to_integer())
}

pub fn u32_sqrt_ceil(n: u32) -> u32 {
    let r = num_integer::Roots::sqrt(&(n as u64)) as u32;
    if (r as u64) * (r as u64) == n as u64 {
        r
    } else {
        r + 1
    }
}

/// Reduces `value` into `[0, modulus)`.
pub fn rem_euclid(value: &BigRational, modulus: &BigRational) -> BigRational {
    let q = (value / modulus).floor();
    value - q * modulus
}

/// Renders a rational as `num/den` (or just `num` for integers).
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub(crate) mod serde_ratio {
    //! Serializes a `BigRational` as its `num/den` string.
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod serde_ratio_vec {
    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&super::format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}
