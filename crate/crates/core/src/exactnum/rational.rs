//! Helpers over `num_rational::BigRational`.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses "num/den" or a plain integer. Whitespace around tokens is allowed.
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| RationalParseError::Invalid(s.to_string()))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| RationalParseError::Invalid(s.to_string()))?;
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Canonical "num/den" rendering (always includes the denominator).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact integer power with `i64` exponent; negative exponents invert.
///
/// Panics if `base` is zero and `exp` is negative.
pub fn rat_pow_int(base: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let mag = exp.unsigned_abs();
    let mut acc = Rational::one();
    let mut sq = base.clone();
    let mut e = mag;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    if exp < 0 {
        assert!(!acc.is_zero(), "negative power of zero");
        acc.recip()
    } else {
        acc
    }
}

/// Exact integer power with a big-integer exponent.
pub fn rat_pow(base: &Rational, exp: &BigInt) -> Rational {
    if exp.is_zero() {
        return Rational::one();
    }
    let neg = exp.sign() == Sign::Minus;
    let mut e = exp.abs();
    let mut acc = Rational::one();
    let mut sq = base.clone();
    let one: BigInt = BigInt::one();
    while e.is_positive() {
        if (&e & &one).is_one() {
            acc *= &sq;
        }
        e >>= 1;
        if e.is_positive() {
            sq = &sq * &sq;
        }
    }
    if neg {
        assert!(!acc.is_zero(), "negative power of zero");
        acc.recip()
    } else {
        acc
    }
}

/// Floor of a rational as a big integer.
pub fn rat_floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

/// Ceiling of a rational as a big integer.
pub fn rat_ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(format_rational(&r("6/4")), "3/2");
        assert_eq!(format_rational(&r("-6/4")), "-3/2");
        assert_eq!(format_rational(&r("5")), "5/1");
        assert_eq!(format_rational(&r("0/7")), "0/1");
        assert_eq!(format_rational(&r(" 2 / 3 ")), "2/3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(rat_pow_int(&r("2/3"), 3), r("8/27"));
        assert_eq!(rat_pow_int(&r("2/3"), -2), r("9/4"));
        assert_eq!(rat_pow_int(&r("7/5"), 0), r("1"));
        let e: BigInt = 20.into();
        assert_eq!(rat_pow(&r("2"), &e), r("1048576"));
        assert_eq!(rat_pow(&r("2"), &(-e)), r("1/1048576"));
    }

    #[test]
    fn floors() {
        assert_eq!(rat_floor(&r("7/2")), 3.into());
        assert_eq!(rat_floor(&r("-7/2")), (-4).into());
        assert_eq!(rat_ceil(&r("7/2")), 4.into());
        assert_eq!(rat_ceil(&r("-7/2")), (-3).into());
    }
}
