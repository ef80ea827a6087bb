//! Exact rational scalars and their textual form.
//!
//! Every value in the crate is an element of ℚ. The textual form used in
//! all JSON payloads is `"p/q"`, or `"p"` when the denominator is one.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Scalar = BigRational;

/// Builds `num / den`. Panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `n` as a scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// `+1` or `-1` as a scalar.
pub fn sign(positive: bool) -> Scalar {
    if positive {
        one()
    } else {
        -one()
    }
}

/// Formats a scalar as `"p/q"` (or `"p"` for integers).
pub fn format(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"` or `"p"`; whitespace around the parts is ignored.
pub fn parse(s: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Serde adapter storing a scalar as its `"p/q"` string.
pub mod serde_scalar {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let x = q(6, -4);
        assert_eq!(format(&x), "-3/2");
        assert_eq!(format(&q(4, 2)), "2");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "-7", "3/5", "-12/7", "123456789012345678901234567891/7"] {
            assert_eq!(format(&parse(s).unwrap()), s);
        }
        assert_eq!(parse(" 4 / 6 ").unwrap(), q(2, 3));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }
}
