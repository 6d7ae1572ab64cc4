//! Decidable comparisons of products of rational powers.
//!
//! `x^e` with rational `e` is irrational in general, but comparisons between
//! products of such powers (positive bases) are decided exactly by raising
//! both sides to the least common denominator of every exponent involved.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::rational::rat_pow;
use super::Rational;

/// Compares `prod lhs_i.0 ^ lhs_i.1` with `prod rhs_j.0 ^ rhs_j.1`.
///
/// Every base must be strictly positive (panics otherwise); exponents are
/// arbitrary rationals.
pub fn cmp_pow_products(lhs: &[(Rational, Rational)], rhs: &[(Rational, Rational)]) -> Ordering {
    let mut lcm = BigInt::one();
    for (_, e) in lhs.iter().chain(rhs.iter()) {
        lcm = lcm.lcm(e.denom());
    }
    let eval = |factors: &[(Rational, Rational)]| -> Rational {
        let mut acc = Rational::one();
        for (base, exp) in factors {
            assert!(base.is_positive(), "nonpositive base in power comparison");
            let cleared = exp.numer() * (&lcm / exp.denom());
            acc *= rat_pow(base, &cleared);
        }
        acc
    };
    eval(lhs).cmp(&eval(rhs))
}

/// Sign of `x^e - y^f` for positive rationals `x`, `y` and rational
/// exponents `e`, `f`.
pub fn rat_pow_cmp(x: &Rational, e: &Rational, y: &Rational, f: &Rational) -> Ordering {
    cmp_pow_products(
        std::slice::from_ref(&(x.clone(), e.clone())),
        std::slice::from_ref(&(y.clone(), f.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn simple_comparisons() {
        // 2^{3/2} = sqrt 8 < 3 since 8 < 9
        assert_eq!(rat_pow_cmp(&r("2"), &r("3/2"), &r("3"), &r("1")), Ordering::Less);
        assert_eq!(rat_pow_cmp(&r("7/3"), &r("1"), &r("7/3"), &r("1")), Ordering::Equal);
        // (160000/6561)^3 vs 5^7: 1.45e4 < 7.8e4
        assert_eq!(
            rat_pow_cmp(&r("160000/6561"), &r("3/7"), &r("5"), &r("1")),
            Ordering::Less
        );
    }

    #[test]
    fn negative_exponents() {
        // 2^{-1/2} vs (1/2): 1/sqrt2 > 1/2
        assert_eq!(
            rat_pow_cmp(&r("2"), &r("-1/2"), &r("1/2"), &r("1")),
            Ordering::Greater
        );
    }

    #[test]
    fn products() {
        // 2^{1/2} * 2^{1/2} == 2
        assert_eq!(
            cmp_pow_products(
                &[(r("2"), r("1/2")), (r("2"), r("1/2"))],
                &[(r("2"), r("1"))]
            ),
            Ordering::Equal
        );
        // 3^{2/3} * 3^{1/3} < 4
        assert_eq!(
            cmp_pow_products(
                &[(r("3"), r("2/3")), (r("3"), r("1/3"))],
                &[(r("4"), r("1"))]
            ),
            Ordering::Less
        );
    }
}
