//! Continued-fraction expansion of real quadratic irrationals.
//!
//! Classical surd iteration in exact field arithmetic: `x_{i+1} = 1/(x_i - a_i)`
//! with `a_i = floor(x_i)`. States repeat by Lagrange periodicity; the period is
//! detected on the fractional states (index >= 1) so the integer part always
//! sits in the preperiod.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::exactnum::FieldReal;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CfError {
    #[error("continued-fraction expansion requires an irrational input")]
    RationalInput,
    #[error("period not detected within {0} iterations")]
    PeriodNotFound(usize),
}

const MAX_STATES: usize = 100_000;

/// Eventually periodic continued fraction with cached convergents.
#[derive(Debug, Clone)]
pub struct CFExpansion {
    theta: FieldReal,
    preperiod: Vec<BigInt>,
    period: Vec<BigInt>,
    convergents: Vec<(BigInt, BigInt)>,
    etas: Vec<FieldReal>,
}

pub fn cf_expand(theta: &FieldReal) -> Result<CFExpansion, CfError> {
    if theta.is_rational() {
        return Err(CfError::RationalInput);
    }
    let mut digits: Vec<BigInt> = Vec::new();
    let mut states: Vec<FieldReal> = Vec::new(); // x_i for i >= 1
    let mut x = theta.clone();
    loop {
        let a = x.floor();
        let frac = &x - &FieldReal::from_bigint(a.clone());
        digits.push(a);
        x = frac.recip();
        if let Some(pos) = states.iter().position(|s| s == &x) {
            // digits: a_0 .. a_{len-1}; states[i] = x_{i+1}
            let cycle_start = pos + 1;
            let preperiod = digits[..cycle_start].to_vec();
            let period = digits[cycle_start..].to_vec();
            debug_assert!(!period.is_empty());
            let mut cf = CFExpansion {
                theta: theta.clone(),
                preperiod,
                period,
                convergents: Vec::new(),
                etas: Vec::new(),
            };
            cf.ensure(1);
            return Ok(cf);
        }
        states.push(x.clone());
        if states.len() > MAX_STATES {
            return Err(CfError::PeriodNotFound(MAX_STATES));
        }
    }
}

impl CFExpansion {
    pub fn theta(&self) -> &FieldReal {
        &self.theta
    }

    pub fn preperiod(&self) -> &[BigInt] {
        &self.preperiod
    }

    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    /// Partial quotient `a_i` (periodically extended).
    pub fn partial_quotient(&self, i: usize) -> BigInt {
        if i < self.preperiod.len() {
            self.preperiod[i].clone()
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()].clone()
        }
    }

    /// Largest partial quotient over preperiod and period.
    pub fn max_partial_quotient(&self) -> BigInt {
        self.preperiod
            .iter()
            .chain(self.period.iter())
            .max()
            .cloned()
            .expect("nonempty expansion")
    }

    /// Grows the convergent cache to hold `p_k, q_k` for all `k <= n`.
    pub fn ensure(&mut self, n: usize) {
        while self.convergents.len() <= n {
            let k = self.convergents.len();
            let a = self.partial_quotient(k);
            let (p, q) = if k == 0 {
                (a, BigInt::one())
            } else if k == 1 {
                let (p0, q0) = self.convergents[0].clone();
                (&a * &p0 + BigInt::one(), a * q0)
            } else {
                let (p1, q1) = self.convergents[k - 1].clone();
                let (p2, q2) = self.convergents[k - 2].clone();
                (&a * &p1 + &p2, &a * &q1 + &q2)
            };
            let eta = &self
                .theta
                .scale(&crate::exactnum::Rational::from_integer(q.clone()))
                - &FieldReal::from_bigint(p.clone());
            debug_assert_eq!(
                eta.sign() >= 0,
                k % 2 == 0,
                "convergent error signs must alternate"
            );
            self.convergents.push((p, q));
            self.etas.push(eta);
        }
    }

    /// `(p_k, q_k)`; the cache must already cover `k` (see [`Self::ensure`]).
    pub fn convergent(&self, k: usize) -> &(BigInt, BigInt) {
        &self.convergents[k]
    }

    pub fn denominator(&self, k: usize) -> &BigInt {
        &self.convergents[k].1
    }

    /// `eta_k = q_k theta - p_k`.
    pub fn eta(&self, k: usize) -> &FieldReal {
        &self.etas[k]
    }

    pub fn cached_len(&self) -> usize {
        self.convergents.len()
    }

    /// Smallest `k` with `q_{k+1} > bound`, growing the cache as needed.
    pub fn index_covering(&mut self, bound: &BigInt) -> usize {
        let mut k = 0usize;
        loop {
            self.ensure(k + 1);
            if self.denominator(k + 1) > bound {
                return k;
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_rational, Rational};

    fn golden() -> FieldReal {
        FieldReal::parse("(1+1*sqrt(5))/2").unwrap()
    }

    #[test]
    fn golden_expansion() {
        let cf = cf_expand(&golden()).unwrap();
        assert_eq!(cf.preperiod(), &[BigInt::one()]);
        assert_eq!(cf.period(), &[BigInt::one()]);
    }

    #[test]
    fn sqrt2_expansion() {
        let cf = cf_expand(&FieldReal::sqrt_of(2)).unwrap();
        assert_eq!(cf.preperiod(), &[BigInt::one()]);
        assert_eq!(cf.period(), &[BigInt::from(2)]);
    }

    #[test]
    fn sqrt3_and_shifted() {
        let cf = cf_expand(&FieldReal::sqrt_of(3)).unwrap();
        assert_eq!(cf.preperiod(), &[BigInt::one()]);
        assert_eq!(
            cf.period(),
            &[BigInt::one(), BigInt::from(2)],
            "sqrt 3 = [1; 1,2,1,2,...]"
        );
        // A negative shift exercises a_0 < 0.
        let shifted = &FieldReal::sqrt_of(2) - &FieldReal::from_bigint(3.into());
        let cf = cf_expand(&shifted).unwrap();
        assert_eq!(cf.partial_quotient(0), BigInt::from(-2));
    }

    #[test]
    fn rational_rejected() {
        let x = FieldReal::from_rational(parse_rational("3/2").unwrap());
        assert_eq!(cf_expand(&x).err(), Some(CfError::RationalInput));
        // sqrt(9) is rational in disguise
        let y = FieldReal::sqrt_of(9);
        assert_eq!(cf_expand(&y).err(), Some(CfError::RationalInput));
    }

    #[test]
    fn convergent_recurrence_and_eta() {
        let mut cf = cf_expand(&golden()).unwrap();
        cf.ensure(12);
        // Fibonacci: q = 1,1,2,3,5,8,...
        assert_eq!(cf.denominator(5), &BigInt::from(8));
        assert_eq!(cf.convergent(5).0, BigInt::from(13));
        for k in 2..=12 {
            let a = cf.partial_quotient(k);
            let (p, q) = cf.convergent(k).clone();
            let (p1, q1) = cf.convergent(k - 1).clone();
            let (p2, q2) = cf.convergent(k - 2).clone();
            assert_eq!(p, &a * &p1 + &p2);
            assert_eq!(q, &a * &q1 + &q2);
            assert!(num_integer::gcd(p.clone(), q.clone()).is_one());
        }
        // ||q_k theta|| < 1/q_{k+1}, exactly.
        for k in 0..12 {
            let abs_eta = cf.eta(k).abs();
            let bound = Rational::new(BigInt::one(), cf.denominator(k + 1).clone());
            assert_eq!(
                (&abs_eta - &FieldReal::from_rational(bound)).sign(),
                -1,
                "k={k}"
            );
        }
    }

    #[test]
    fn index_covering_grows() {
        let mut cf = cf_expand(&FieldReal::sqrt_of(2)).unwrap();
        let k = cf.index_covering(&BigInt::from(10_000));
        assert!(cf.denominator(k + 1) > &BigInt::from(10_000));
        assert!(cf.denominator(k) <= &BigInt::from(10_000));
    }
}
