//! Exact rationals as they appear in lengths and turn coordinates.
//!
//! Values cross every file boundary as `"p/q"` or integer strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::Error;

pub type Rational = BigRational;

/// Parses `"p/q"` or `"p"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    t.parse::<Rational>()
        .map_err(|e| Error::Parse(format!("invalid rational {s:?}: {e}")))
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn half() -> Rational {
    rational(1, 2)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Reduces a value into `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    let f = r - r.floor();
    debug_assert!(f >= Rational::zero() && f < Rational::one());
    f
}

/// Nearest rational with denominator `den` (ties away from zero).
pub fn from_f64_with_den(value: f64, den: u64) -> Rational {
    let scaled = (value * den as f64).round();
    Rational::new(BigInt::from(scaled as i64), BigInt::from(den))
}

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(serde::de::Error::custom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_encodings() {
        assert_eq!(parse_rational("3/2").unwrap(), rational(3, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), int(4));
        assert_eq!(parse_rational("2/4").unwrap(), half());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn display_is_reduced() {
        assert_eq!(rational(6, 4).to_string(), "3/2");
        assert_eq!(int(2).to_string(), "2");
    }

    #[test]
    fn frac_wraps_negative() {
        assert_eq!(frac(&rational(-1, 4)), rational(3, 4));
        assert_eq!(frac(&int(1)), int(0));
        assert_eq!(frac(&rational(5, 4)), rational(1, 4));
    }
}
