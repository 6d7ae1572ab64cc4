//! Elements `a + b*sqrt(d)` of a fixed real quadratic field.
//!
//! The radicand `d` is a squarefree nonnegative integer. Values with `b = 0`
//! are field-agnostic (they carry `d = 0`) so rational constants mix freely
//! with elements of any session field. Mixing two distinct irrational fields
//! is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::rational::{rat_pow_int, RationalParseError};
use super::Rational;

/// Largest accepted radicand; keeps the squarefree reduction a cheap exact
/// trial division.
pub const MAX_RADICAND: u64 = 1_000_000_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldParseError {
    #[error("invalid field element literal `{0}` (expected \"(a+b*sqrt(d))/e\")")]
    Invalid(String),
    #[error(transparent)]
    Rational(#[from] RationalParseError),
    #[error("radicand {0} exceeds the supported limit {MAX_RADICAND}")]
    RadicandTooLarge(u64),
    #[error("zero denominator in field element `{0}`")]
    ZeroDenominator(String),
}

/// Exact half-integer input where a unique nearest integer was required.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("value is exactly halfway between {0} and {1}")]
pub struct TieError(pub BigInt, pub BigInt);

/// `a + b*sqrt(d)` with rational `a`, `b` and squarefree `d`.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldReal {
    a: Rational,
    b: Rational,
    d: u64,
}

/// Splits `n` into `(s, f)` with `n = s^2 * f`, `f` squarefree.
fn squarefree_split(mut n: u64) -> (u64, u64) {
    let mut square_root = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut m = 0u32;
            while n % p == 0 {
                n /= p;
                m += 1;
            }
            for _ in 0..m / 2 {
                square_root *= p;
            }
            if m % 2 == 1 {
                free *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (square_root, free * n)
}

impl FieldReal {
    /// Canonicalizing constructor: reduces `d` to its squarefree part and
    /// folds `sqrt(0)`, `sqrt(1)` into the rational coordinate.
    pub fn new(a: Rational, b: Rational, d: u64) -> Self {
        assert!(d <= MAX_RADICAND, "radicand too large");
        if b.is_zero() || d == 0 {
            return FieldReal {
                a,
                b: Rational::zero(),
                d: 0,
            };
        }
        let (s, f) = squarefree_split(d);
        let b = b * Rational::from_integer(BigInt::from(s));
        if f == 1 {
            FieldReal {
                a: a + b,
                b: Rational::zero(),
                d: 0,
            }
        } else {
            FieldReal { a, b, d: f }
        }
    }

    pub fn from_rational(a: Rational) -> Self {
        FieldReal {
            a,
            b: Rational::zero(),
            d: 0,
        }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_of(d: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_coeff(&self) -> &Rational {
        &self.a
    }

    pub fn surd_coeff(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The rational value, if rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    fn merged_radicand(&self, rhs: &FieldReal) -> u64 {
        match (self.b.is_zero(), rhs.b.is_zero()) {
            (true, true) => 0,
            (true, false) => rhs.d,
            (false, true) => self.d,
            (false, false) => {
                assert_eq!(self.d, rhs.d, "mixed quadratic fields");
                self.d
            }
        }
    }

    /// Sign of the value, decided entirely in integer arithmetic.
    pub fn sign(&self) -> i8 {
        let sa = num_sign(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = num_sign(&self.b);
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare a^2 against b^2 d.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Equal => 0,
            Ordering::Greater => sa,
            Ordering::Less => sb,
        }
    }

    pub fn cmp_value(&self, rhs: &FieldReal) -> Ordering {
        match (self - rhs).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn abs(&self) -> FieldReal {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact `n`-th power; `pow(_, 0)` is 1.
    pub fn pow(&self, n: u32) -> FieldReal {
        let mut acc = FieldReal::one();
        let mut sq = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> FieldReal {
        assert!(!self.is_zero(), "inverse of zero");
        if self.b.is_zero() {
            return FieldReal::from_rational(self.a.clone().recip());
        }
        // 1/(a+b sqrt d) = (a - b sqrt d) / (a^2 - b^2 d); the norm is nonzero
        // because d is squarefree >= 2.
        let norm =
            &self.a * &self.a - &self.b * &self.b * Rational::from_integer(BigInt::from(self.d));
        assert!(!norm.is_zero(), "zero norm for nonzero element");
        FieldReal {
            a: &self.a / &norm,
            b: -(&self.b / &norm),
            d: self.d,
        }
    }

    pub fn scale(&self, k: &Rational) -> FieldReal {
        FieldReal {
            a: &self.a * k,
            b: &self.b * k,
            d: if (&self.b * k).is_zero() { 0 } else { self.d },
        }
    }

    pub fn add_rational(&self, k: &Rational) -> FieldReal {
        FieldReal {
            a: &self.a + k,
            b: self.b.clone(),
            d: self.d,
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // Bracket b sqrt(d) between consecutive multiples of 1/denom(b).
        let bn = self.b.numer();
        let bd = self.b.denom();
        let n = bn * bn * BigInt::from(self.d);
        let s = n.sqrt();
        let lo = if bn.is_positive() {
            &self.a + Rational::new(s, bd.clone())
        } else {
            &self.a - Rational::new(&s + 1, bd.clone())
        };
        let f = lo.floor().to_integer();
        // The true value lies in [lo, lo + 1/bd]; at most one step up.
        let step = FieldReal::from_bigint(&f + 1);
        if (self - &step).sign() >= 0 {
            &f + 1
        } else {
            f
        }
    }

    /// The unique nearest integer; exact half-integers are an error.
    pub fn nearest_integer(&self) -> Result<BigInt, TieError> {
        let f = self.floor();
        let frac = self - &FieldReal::from_bigint(f.clone());
        let half = FieldReal::from_rational(Rational::new(BigInt::one(), BigInt::from(2)));
        match (&frac - &half).sign() {
            -1 => Ok(f),
            1 => Ok(&f + 1),
            _ => Err(TieError(f.clone(), &f + 1)),
        }
    }

    /// Rational enclosure `[lo, hi]` with `hi - lo = 10^-digits`.
    pub fn decimal_bracket(&self, digits: u32) -> (Rational, Rational) {
        let scale = rat_pow_int(&Rational::from_integer(BigInt::from(10)), digits as i64);
        let scaled = self.scale(&scale);
        let f = scaled.floor();
        let lo = Rational::new(f.clone(), scale.numer().clone());
        let hi = Rational::new(&f + 1, scale.numer().clone());
        (lo, hi)
    }

    /// Correctly rounded decimal string with `digits` fractional places
    /// (ties round away from zero; ties only occur for rational values).
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.sign() < 0;
        let mag = self.abs();
        let scale = rat_pow_int(&Rational::from_integer(BigInt::from(10)), digits as i64);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let m = mag
            .scale(&scale)
            .add_rational(&half)
            .floor()
            .to_biguint()
            .expect("nonnegative");
        let digits_str = m.to_string();
        let k = digits as usize;
        let (int_part, frac_part) = if digits_str.len() > k {
            let split = digits_str.len() - k;
            (digits_str[..split].to_string(), digits_str[split..].to_string())
        } else {
            ("0".to_string(), format!("{digits_str:0>k$}"))
        };
        let body = if k == 0 {
            int_part
        } else {
            format!("{int_part}.{frac_part}")
        };
        if neg && body.chars().any(|c| c != '0' && c != '.') {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Renders as `(g+h*sqrt(d))/e` with integer `g`, `h`, `e`.
    pub fn to_surd_string(&self) -> String {
        let e = self.a.denom().lcm(self.b.denom());
        let g = self.a.numer() * (&e / self.a.denom());
        let h = self.b.numer() * (&e / self.b.denom());
        if h.is_negative() {
            format!("({}-{}*sqrt({}))/{}", g, -&h, self.d, e)
        } else {
            format!("({}+{}*sqrt({}))/{}", g, h, self.d, e)
        }
    }

    /// Parses `(a+b*sqrt(d))/e` (also `a-b*sqrt(d)` inside the parens, an
    /// optional `/e`, or a plain rational like `3/2`).
    pub fn parse(input: &str) -> Result<FieldReal, FieldParseError> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(FieldParseError::Invalid(input.to_string()));
        }
        if !compact.contains("sqrt") {
            let r = super::rational::parse_rational(&compact)?;
            return Ok(FieldReal::from_rational(r));
        }
        let (body, den) = if let Some(rest) = compact.strip_prefix('(') {
            // find the close paren matching the outer open
            let mut depth = 1usize;
            let mut close = None;
            for (i, ch) in rest.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            close = Some(i);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let close = close.ok_or_else(|| FieldParseError::Invalid(input.to_string()))?;
            let body = &rest[..close];
            let tail = &rest[close + 1..];
            let den = if tail.is_empty() {
                BigInt::one()
            } else {
                let t = tail
                    .strip_prefix('/')
                    .ok_or_else(|| FieldParseError::Invalid(input.to_string()))?;
                t.parse::<BigInt>()
                    .map_err(|_| FieldParseError::Invalid(input.to_string()))?
            };
            (body.to_string(), den)
        } else {
            (compact.clone(), BigInt::one())
        };
        if den.is_zero() {
            return Err(FieldParseError::ZeroDenominator(input.to_string()));
        }
        // body is a+b*sqrt(d) | a-b*sqrt(d) | b*sqrt(d) | sqrt(d)
        let sqrt_pos = body
            .find("sqrt(")
            .ok_or_else(|| FieldParseError::Invalid(input.to_string()))?;
        if !body.ends_with(')') {
            return Err(FieldParseError::Invalid(input.to_string()));
        }
        let d_str = &body[sqrt_pos + 5..body.len() - 1];
        let d: u64 = d_str
            .parse()
            .map_err(|_| FieldParseError::Invalid(input.to_string()))?;
        if d > MAX_RADICAND {
            return Err(FieldParseError::RadicandTooLarge(d));
        }
        let head = &body[..sqrt_pos];
        let (a_str, b_str) = match head.strip_suffix('*') {
            Some(coeffs) => {
                // split the b coefficient off at the last +/- that is not a
                // leading sign
                let mut split = None;
                for (i, c) in coeffs.char_indices().rev() {
                    if (c == '+' || c == '-') && i != 0 {
                        split = Some(i);
                        break;
                    }
                }
                match split {
                    Some(i) => (
                        coeffs[..i].to_string(),
                        format!(
                            "{}{}",
                            if coeffs[i..].starts_with('-') { "-" } else { "" },
                            &coeffs[i + 1..]
                        ),
                    ),
                    None => ("0".to_string(), coeffs.to_string()),
                }
            }
            None if head.is_empty() => ("0".to_string(), "1".to_string()),
            None if head == "-" => ("0".to_string(), "-1".to_string()),
            None => return Err(FieldParseError::Invalid(input.to_string())),
        };
        let a: BigInt = a_str
            .parse()
            .map_err(|_| FieldParseError::Invalid(input.to_string()))?;
        let b: BigInt = b_str
            .parse()
            .map_err(|_| FieldParseError::Invalid(input.to_string()))?;
        Ok(FieldReal::new(
            Rational::new(a, den.clone()),
            Rational::new(b, den),
            d,
        ))
    }
}

fn num_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for FieldReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_surd_string())
    }
}

impl fmt::Display for FieldReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_surd_string())
    }
}

impl Add for &FieldReal {
    type Output = FieldReal;
    fn add(self, rhs: &FieldReal) -> FieldReal {
        let d = self.merged_radicand(rhs);
        let b = &self.b + &rhs.b;
        FieldReal {
            a: &self.a + &rhs.a,
            d: if b.is_zero() { 0 } else { d },
            b,
        }
    }
}

impl Sub for &FieldReal {
    type Output = FieldReal;
    fn sub(self, rhs: &FieldReal) -> FieldReal {
        let d = self.merged_radicand(rhs);
        let b = &self.b - &rhs.b;
        FieldReal {
            a: &self.a - &rhs.a,
            d: if b.is_zero() { 0 } else { d },
            b,
        }
    }
}

impl Mul for &FieldReal {
    type Output = FieldReal;
    fn mul(self, rhs: &FieldReal) -> FieldReal {
        let d = self.merged_radicand(rhs);
        let a = &self.a * &rhs.a
            + &self.b * &rhs.b * Rational::from_integer(BigInt::from(d));
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        FieldReal {
            a,
            d: if b.is_zero() { 0 } else { d },
            b,
        }
    }
}

impl Neg for &FieldReal {
    type Output = FieldReal;
    fn neg(self) -> FieldReal {
        FieldReal {
            a: -&self.a,
            b: -&self.b,
            d: self.d,
        }
    }
}

impl FieldReal {
    /// Convenience float approximation for logging only.
    pub fn to_f64_lossy(&self) -> f64 {
        let (lo, _) = self.decimal_bracket(15);
        lo.to_f64().unwrap_or(f64::NAN)
    }
}
