//! Certified lower bounds for `inf q ||q theta||` and the exhaustive oracle.

use num_bigint::BigInt;
use num_traits::One;

use crate::exactnum::{FieldReal, Rational};

use super::cf::CFExpansion;

/// Certified rational floor `1/(M+2) <= inf_q q||q theta||`.
///
/// `M` is the maximum partial quotient; the classical bound
/// `q||q theta|| > 1/(a_{k+1} + 2)` over convergent windows gives the floor.
/// Because `q^{1/s} >= q` for `q >= 1` and `s <= 1`, the same value bounds
/// `inf_q q^{1/s} ||q theta||` for every `s` in `(0, 1]`.
#[derive(Debug, Clone)]
pub struct BadnessBound {
    pub theta: FieldReal,
    pub max_partial_quotient: BigInt,
    pub certified_floor: Rational,
    /// Recorded provenance so certificates can audit the reduction.
    pub provenance: String,
}

pub fn badness_floor(cf: &CFExpansion) -> BadnessBound {
    let m = cf.max_partial_quotient();
    let floor = Rational::new(BigInt::one(), &m + 2);
    BadnessBound {
        theta: cf.theta().clone(),
        max_partial_quotient: m.clone(),
        certified_floor: floor,
        provenance: format!(
            "floor 1/(M+2) with M={m} (max partial quotient); applies to inf q^(1/s)||q theta|| \
             for all s in (0,1] via q^(1/s) >= q"
        ),
    }
}

/// `q * |q theta - p|` with `p` the nearest integer.
pub fn q_fractional_value(theta: &FieldReal, q: u64) -> FieldReal {
    let x = theta.scale(&Rational::from_integer(q.into()));
    let p = x.nearest_integer().expect("irrational multiples never tie");
    (&x - &FieldReal::from_bigint(p))
        .abs()
        .scale(&Rational::from_integer(q.into()))
}

/// Result of the exhaustive scan of `q ||q theta||` over `1..=q_max`.
#[derive(Debug, Clone)]
pub struct BadnessScan {
    pub q_star: u64,
    /// Exact minimizing value.
    pub value: FieldReal,
    /// Rational enclosure of the value, width `10^-13`.
    pub bracket: (Rational, Rational),
}

fn scan_range(theta: &FieldReal, lo: u64, hi: u64) -> (u64, FieldReal) {
    // Incremental fractional part of q*theta: coefficients stay bounded by the
    // denominators of theta, so each step is constant work.
    let step = {
        let f = theta.floor();
        theta - &FieldReal::from_bigint(f)
    };
    let one = FieldReal::one();
    let mut frac = {
        let x = theta.scale(&Rational::from_integer(lo.into()));
        let f = x.floor();
        &x - &FieldReal::from_bigint(f)
    };
    let mut best_q = lo;
    let mut best = {
        let dist = dist_to_int(&frac, &one);
        dist.scale(&Rational::from_integer(lo.into()))
    };
    for q in lo + 1..=hi {
        frac = &frac + &step;
        if (&frac - &one).sign() >= 0 {
            frac = &frac - &one;
        }
        let val = dist_to_int(&frac, &one).scale(&Rational::from_integer(q.into()));
        if (&val - &best).sign() < 0 {
            best = val;
            best_q = q;
        }
    }
    (best_q, best)
}

fn dist_to_int(frac: &FieldReal, one: &FieldReal) -> FieldReal {
    let other = one - frac;
    if (frac - &other).sign() <= 0 {
        frac.clone()
    } else {
        other
    }
}

fn finish(q_star: u64, value: FieldReal) -> BadnessScan {
    let bracket = value.decimal_bracket(13);
    BadnessScan {
        q_star,
        value,
        bracket,
    }
}

/// Sequential exhaustive scan. Exact argmin; ties resolve to the smallest `q`.
pub fn brute_force_badness_seq(theta: &FieldReal, q_max: u64) -> BadnessScan {
    assert!(q_max >= 1);
    let (q, v) = scan_range(theta, 1, q_max);
    finish(q, v)
}

/// Chunked rayon scan; the chunk grid is fixed so results are deterministic
/// and identical to the sequential scan.
#[cfg(feature = "parallel")]
pub fn brute_force_badness_par(theta: &FieldReal, q_max: u64) -> BadnessScan {
    use rayon::prelude::*;
    assert!(q_max >= 1);
    const CHUNK: u64 = 8192;
    let chunks: Vec<(u64, u64)> = (1..=q_max)
        .step_by(CHUNK as usize)
        .map(|lo| (lo, (lo + CHUNK - 1).min(q_max)))
        .collect();
    let (q, v) = chunks
        .into_par_iter()
        .map(|(lo, hi)| scan_range(theta, lo, hi))
        .reduce_with(|a, b| {
            match (&a.1 - &b.1).sign() {
                -1 => a,
                1 => b,
                _ => {
                    if a.0 <= b.0 {
                        a
                    } else {
                        b
                    }
                }
            }
        })
        .expect("nonempty scan");
    finish(q, v)
}

/// Exhaustive minimization of `q ||q theta||` over `1..=q_max`.
pub fn brute_force_badness(theta: &FieldReal, q_max: u64) -> BadnessScan {
    #[cfg(feature = "parallel")]
    {
        brute_force_badness_par(theta, q_max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        brute_force_badness_seq(theta, q_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::cf_expand;
    use crate::exactnum::parse_rational;

    fn golden() -> FieldReal {
        FieldReal::parse("(1+1*sqrt(5))/2").unwrap()
    }

    #[test]
    fn floors() {
        let cf = cf_expand(&golden()).unwrap();
        assert_eq!(badness_floor(&cf).certified_floor, parse_rational("1/3").unwrap());
        let cf = cf_expand(&FieldReal::sqrt_of(2)).unwrap();
        assert_eq!(badness_floor(&cf).certified_floor, parse_rational("1/4").unwrap());
        // Formula instance: any expansion with M = 98 gives 1/100.
        let theta = &FieldReal::sqrt_of(2402).scale(&parse_rational("1/49").unwrap());
        let cf = cf_expand(theta).unwrap();
        let m = cf.max_partial_quotient();
        let b = badness_floor(&cf);
        assert_eq!(
            b.certified_floor,
            Rational::new(BigInt::one(), &m + 2)
        );
    }

    #[test]
    fn golden_small_scans() {
        // Oracle-computed: q* = 1 with value 2 - phi = (3 - sqrt 5)/2 ~ 0.381966.
        let scan = brute_force_badness_seq(&golden(), 10);
        assert_eq!(scan.q_star, 1);
        let expected = FieldReal::parse("(3-1*sqrt(5))/2").unwrap();
        assert_eq!((&scan.value - &expected).sign(), 0);
        let scan1 = brute_force_badness_seq(&golden(), 1);
        assert_eq!(scan1.q_star, 1);
        assert_eq!((&scan1.value - &expected).sign(), 0);
    }

    #[test]
    fn floor_below_scan_for_test_thetas() {
        for theta in [golden(), FieldReal::sqrt_of(2), FieldReal::sqrt_of(3)] {
            let cf = cf_expand(&theta).unwrap();
            let floor = badness_floor(&cf).certified_floor;
            for q_max in [1_000u64, 10_000] {
                let scan = brute_force_badness_seq(&theta, q_max);
                assert!(
                    floor <= scan.bracket.0,
                    "certified floor must sit below the scan minimum"
                );
            }
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn par_matches_seq() {
        let theta = FieldReal::sqrt_of(2);
        let a = brute_force_badness_seq(&theta, 20_000);
        let b = brute_force_badness_par(&theta, 20_000);
        assert_eq!(a.q_star, b.q_star);
        assert_eq!((&a.value - &b.value).sign(), 0);
        assert_eq!(a.bracket, b.bracket);
    }

    #[test]
    fn bracket_width() {
        let scan = brute_force_badness_seq(&FieldReal::sqrt_of(2), 100);
        let width = &scan.bracket.1 - &scan.bracket.0;
        assert_eq!(width, parse_rational("1/10000000000000").unwrap());
        // value inside the bracket
        let lo = FieldReal::from_rational(scan.bracket.0.clone());
        let hi = FieldReal::from_rational(scan.bracket.1.clone());
        assert!((&scan.value - &lo).sign() >= 0);
        assert!((&hi - &scan.value).sign() >= 0);
    }
}
