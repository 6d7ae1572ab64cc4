//! Exact arithmetic over rationals and a fixed real quadratic field.
//!
//! All predicates elsewhere in the crate reduce to [`FieldReal::sign`] or to
//! integer comparisons produced by [`cmp_pow_products`]. Decimal rendering is
//! for diagnostics only and never drives a branch.

mod field;
mod powcmp;
mod rational;

pub use field::{FieldParseError, FieldReal, TieError};
pub use powcmp::{cmp_pow_products, rat_pow_cmp};
pub use rational::{
    format_rational, parse_rational, rat_ceil, rat_floor, rat_pow, rat_pow_int, RationalParseError,
};

/// Arbitrary-precision rational; denominator kept positive, gcd-reduced.
pub type Rational = num_rational::BigRational;
