//! Dangerous rational points and their open neighborhoods.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{rat_pow_int, FieldReal, Rational};
use crate::interval::IntervalQ;

use super::constants::GameConstants;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PointError {
    #[error("denominator must be positive")]
    NonPositiveDenominator,
    #[error("p, q, r must be coprime as a triple")]
    NotCoprime,
}

/// Rational point `(p/q, r/q)` with `q > 0` and `gcd(p, q, r) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatPoint {
    p: BigInt,
    q: BigInt,
    r: BigInt,
}

impl RatPoint {
    pub fn new(p: BigInt, q: BigInt, r: BigInt) -> Result<Self, PointError> {
        if !q.is_positive() {
            return Err(PointError::NonPositiveDenominator);
        }
        if !p.gcd(&q).gcd(&r).is_one() {
            return Err(PointError::NotCoprime);
        }
        Ok(RatPoint { p, q, r })
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }

    /// `r/q`, the vertical coordinate.
    pub fn center(&self) -> Rational {
        Rational::new(self.r.clone(), self.q.clone())
    }

    /// `p/q`, the horizontal coordinate.
    pub fn x(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }
}

/// Membership in the dangerous set: `|theta - p/q| < c / q^{1+s}`, decided in
/// the cleared form `q^u |q theta - p|^v < c^v`.
pub fn in_c(constants: &GameConstants, point: &RatPoint) -> bool {
    let (u, v, _) = constants.exponents();
    let err = (&constants.q_theta(point.q()) - &FieldReal::from_bigint(point.p().clone())).abs();
    let lhs = err
        .pow(v)
        .scale(&rat_pow_int(&Rational::from_integer(point.q().clone()), u as i64));
    let rhs = rat_pow_int(constants.c(), v as i64);
    (&lhs - &FieldReal::from_rational(rhs)).sign() < 0
}

/// The open danger interval `{ y : |y - r/q| < c / q^{1+t} }`.
#[derive(Debug, Clone)]
pub struct DeltaNbhd {
    point: RatPoint,
    center: Rational,
}

impl DeltaNbhd {
    pub fn of(point: RatPoint) -> Self {
        let center = point.center();
        DeltaNbhd { point, center }
    }

    pub fn point(&self) -> &RatPoint {
        &self.point
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    /// `|y - r/q|^v q^{v+w} < c^v`, the cleared membership test.
    pub fn contains(&self, constants: &GameConstants, y: &Rational) -> bool {
        let gap = (y - &self.center).abs();
        self.gap_inside(constants, &gap)
    }

    /// Open `Delta(P)` meets the closed interval: the distance from the
    /// center to the interval is below the radius.
    pub fn meets(&self, constants: &GameConstants, interval: &IntervalQ) -> bool {
        let gap = interval.distance_to(&self.center);
        self.gap_inside(constants, &gap)
    }

    fn gap_inside(&self, constants: &GameConstants, gap: &Rational) -> bool {
        if gap.is_zero() {
            return true;
        }
        let (_, v, w) = constants.exponents();
        let lhs = rat_pow_int(gap, v as i64)
            * rat_pow_int(
                &Rational::from_integer(self.point.q().clone()),
                (v + w) as i64,
            );
        lhs < rat_pow_int(constants.c(), v as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;
    use crate::pointset::{make_constants, CMode};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn sqrt2_constants(c: &str) -> GameConstants {
        make_constants(
            &r("1/2"),
            &r("1/2"),
            &r("9/10"),
            &FieldReal::sqrt_of(2),
            &r("39"),
            CMode::Override,
            Some(&r(c)),
        )
        .unwrap()
    }

    #[test]
    fn coprimality_enforced() {
        assert!(RatPoint::new(2.into(), 4.into(), 6.into()).is_err());
        assert!(RatPoint::new(2.into(), 4.into(), 3.into()).is_ok());
        assert!(RatPoint::new(1.into(), 0.into(), 1.into()).is_err());
        assert!(RatPoint::new(1.into(), (-2).into(), 1.into()).is_err());
    }

    #[test]
    fn membership_examples() {
        // c = 1/10, s = 1/2: q = 29 is in (|sqrt2 - 41/29| ~ 4.2e-4 < 0.1 * 29^{-3/2}),
        // q = 2 is not (0.0858 >= 0.0354).
        let constants = sqrt2_constants("1/10");
        let inside = RatPoint::new(41.into(), 29.into(), 7.into()).unwrap();
        assert!(in_c(&constants, &inside));
        let outside = RatPoint::new(3.into(), 2.into(), 1.into()).unwrap();
        assert!(!in_c(&constants, &outside));
        // Off by >= 1/q: never in C for small c.
        let far = RatPoint::new(40.into(), 29.into(), 7.into()).unwrap();
        assert!(!in_c(&constants, &far));
    }

    #[test]
    fn delta_geometry() {
        let constants = sqrt2_constants("1/10");
        let p = RatPoint::new(41.into(), 29.into(), 7.into()).unwrap();
        let delta = DeltaNbhd::of(p);
        // radius = c / 29^{3/2} ~ 6.4e-4 around 7/29 ~ 0.2414
        assert!(delta.contains(&constants, &r("7/29")));
        assert!(delta.contains(&constants, &r("2415/10000")));
        assert!(!delta.contains(&constants, &r("243/1000")));
        // strict openness: the boundary is outside; test via an interval
        // touching the center exactly.
        let iv = IntervalQ::new(r("7/29"), r("1/2"));
        assert!(delta.meets(&constants, &iv));
        let far_iv = IntervalQ::new(r("1/4"), r("1/2"));
        assert!(!delta.meets(&constants, &far_iv));
    }
}
