//! Complete enumeration of denominators with small fractional parts.
//!
//! Finds every `q` in a window with `q^s |q theta - p| < epsilon` for the
//! nearest integer `p`, without scanning: a DFS over Ostrowski digit strings
//! `q = sum c_k q_k` walks the error-significant digits first (small `k`),
//! so the reachable error tail `sum_{k>j} c_k eta_k` shrinks geometrically
//! and branches are cut as soon as the whole tail window stays provably far
//! from every integer. Every emitted pair is verified by an exact cleared
//! power comparison; completeness rests on the unique legal representation
//! of every `q < q_{K+1}` plus the alternating-sign tail bound.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{rat_pow, FieldReal, Rational};

use super::cf::CFExpansion;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("threshold must be positive")]
    InvalidThreshold,
    #[error("exponent must be nonnegative")]
    InvalidExponent,
    #[error("exponent denominator {0} exceeds the supported limit 64")]
    ExponentDenominator(BigInt),
}

struct Walk<'a> {
    cf: &'a CFExpansion,
    top: usize,
    caps: Vec<BigInt>,
    pos_tail: Vec<FieldReal>,
    neg_tail: Vec<FieldReal>,
    max_q_tail: Vec<BigInt>,
    q_min: BigInt,
    q_max: BigInt,
    exp_num: BigInt,
    exp_den: u32,
    eps_pow: Rational,
    out: Vec<(BigInt, BigInt)>,
}

impl Walk<'_> {
    /// `q^u * err^v < eps^v`, the cleared form of `q^s err < eps`.
    fn qualifies(&self, q: &BigInt, err: &FieldReal) -> bool {
        let lhs = err
            .pow(self.exp_den)
            .scale(&rat_pow(&Rational::from_integer(q.clone()), &self.exp_num));
        (&lhs - &FieldReal::from_rational(self.eps_pow.clone())).sign() < 0
    }

    fn dfs(&mut self, j: usize, q_acc: BigInt, p_acc: BigInt, e_acc: FieldReal, prev_zero: bool) {
        if &q_acc > &self.q_max {
            return;
        }
        if j > self.top {
            if q_acc >= self.q_min && q_acc.is_positive() {
                let half = FieldReal::from_rational(Rational::new(BigInt::one(), 2.into()));
                let shift = (&e_acc + &half).floor();
                let p = &p_acc + &shift;
                let err = (&e_acc - &FieldReal::from_bigint(shift)).abs();
                if self.qualifies(&q_acc, &err) {
                    self.out.push((q_acc, p));
                }
            }
            return;
        }
        if &q_acc + &self.max_q_tail[j] < self.q_min {
            return;
        }
        // Error window over every completion of this prefix.
        let lo = &e_acc + &self.neg_tail[j];
        let hi = &e_acc + &self.pos_tail[j];
        let f_lo = lo.floor();
        let f_hi = hi.floor();
        if f_lo == f_hi {
            let d_left = &lo - &FieldReal::from_bigint(f_lo.clone());
            let d_right = &FieldReal::from_bigint(&f_lo + 1) - &hi;
            let dist = if (&d_left - &d_right).sign() <= 0 {
                d_left
            } else {
                d_right
            };
            if dist.sign() > 0 {
                let q_lo = std::cmp::max(std::cmp::max(q_acc.clone(), self.q_min.clone()), BigInt::one());
                if !self.qualifies(&q_lo, &dist) {
                    return;
                }
            }
        }
        let full_allowed = j == 0 || prev_zero;
        let cap = &self.caps[j];
        let top_digit = if j >= 1 && !full_allowed {
            cap - 1
        } else {
            cap.clone()
        };
        let qj = self.cf.denominator(j).clone();
        let pj = self.cf.convergent(j).0.clone();
        let ej = self.cf.eta(j).clone();
        let mut c = BigInt::zero();
        let mut q_next = q_acc;
        let mut p_next = p_acc;
        let mut e_next = e_acc;
        loop {
            if c > top_digit {
                break;
            }
            self.dfs(j + 1, q_next.clone(), p_next.clone(), e_next.clone(), c.is_zero());
            c += 1;
            if c > top_digit {
                break;
            }
            q_next += &qj;
            if &q_next > &self.q_max {
                break;
            }
            p_next += &pj;
            e_next = &e_next + &ej;
        }
    }
}

/// All pairs `(q, p)` with `q_min <= q <= q_max`, `p` the nearest integer to
/// `q theta`, and `q^{s_exp} |q theta - p| < epsilon` (strict, exact).
///
/// The result is sorted by `q` and duplicate free. An empty window is an
/// ordinary empty result.
pub fn small_fractional_parts(
    cf: &mut CFExpansion,
    epsilon: &Rational,
    s_exp: &Rational,
    q_min: &BigInt,
    q_max: &BigInt,
) -> Result<Vec<(BigInt, BigInt)>, WalkError> {
    if !epsilon.is_positive() {
        return Err(WalkError::InvalidThreshold);
    }
    if s_exp.is_negative() {
        return Err(WalkError::InvalidExponent);
    }
    let den = s_exp.denom();
    if den > &BigInt::from(64) {
        return Err(WalkError::ExponentDenominator(den.clone()));
    }
    let exp_den = u32::try_from(den).expect("checked above");
    let q_min = std::cmp::max(q_min.clone(), BigInt::one());
    if q_max < &q_min {
        return Ok(Vec::new());
    }

    let top = cf.index_covering(q_max);
    cf.ensure(top + 1);

    let mut caps = Vec::with_capacity(top + 1);
    for j in 0..=top {
        let a_next = cf.partial_quotient(j + 1);
        caps.push(if j == 0 { &a_next - 1 } else { a_next });
    }
    // Suffix bounds over indices j..=top: reachable error tail and q tail.
    let mut pos_tail = vec![FieldReal::zero(); top + 2];
    let mut neg_tail = vec![FieldReal::zero(); top + 2];
    let mut max_q_tail = vec![BigInt::zero(); top + 2];
    for j in (0..=top).rev() {
        let contrib = cf.eta(j).scale(&Rational::from_integer(caps[j].clone()));
        if contrib.sign() >= 0 {
            pos_tail[j] = &pos_tail[j + 1] + &contrib;
            neg_tail[j] = neg_tail[j + 1].clone();
        } else {
            pos_tail[j] = pos_tail[j + 1].clone();
            neg_tail[j] = &neg_tail[j + 1] + &contrib;
        }
        max_q_tail[j] = &max_q_tail[j + 1] + &caps[j] * cf.denominator(j);
    }

    let mut walk = Walk {
        cf,
        top,
        caps,
        pos_tail,
        neg_tail,
        max_q_tail,
        q_min,
        q_max: q_max.clone(),
        exp_num: s_exp.numer().clone(),
        exp_den,
        eps_pow: rat_pow(epsilon, &BigInt::from(exp_den)),
        out: Vec::new(),
    };
    walk.dfs(0, BigInt::zero(), BigInt::zero(), FieldReal::zero(), true);
    let mut out = walk.out;
    out.sort_by(|a, b| a.0.cmp(&b.0));
    debug_assert!(out.windows(2).all(|w| w[0].0 < w[1].0), "duplicate q");
    Ok(out)
}

/// Direct-scan oracle over a `u64` window; same predicate, same output shape.
pub fn small_fractional_parts_scan(
    theta: &FieldReal,
    epsilon: &Rational,
    s_exp: &Rational,
    q_min: u64,
    q_max: u64,
) -> Vec<(BigInt, BigInt)> {
    let exp_den = u32::try_from(s_exp.denom()).expect("small denominator");
    let eps_pow = rat_pow(epsilon, &BigInt::from(exp_den));
    let exp_num = s_exp.numer().clone();
    let theta_floor = theta.floor();
    let theta_frac = theta - &FieldReal::from_bigint(theta_floor.clone());
    let one = FieldReal::one();
    let mut int_part = BigInt::zero();
    let mut frac = FieldReal::zero();
    let mut out = Vec::new();
    for q in 1..=q_max {
        int_part += &theta_floor;
        frac = &frac + &theta_frac;
        if (&frac - &one).sign() >= 0 {
            frac = &frac - &one;
            int_part += 1;
        }
        if q < q_min {
            continue;
        }
        let comp = &one - &frac;
        let (err, p) = if (&frac - &comp).sign() <= 0 {
            (frac.clone(), int_part.clone())
        } else {
            (comp, &int_part + 1)
        };
        let lhs = err
            .pow(exp_den)
            .scale(&rat_pow(&Rational::from_integer(q.into()), &exp_num));
        if (&lhs - &FieldReal::from_rational(eps_pow.clone())).sign() < 0 {
            out.push((BigInt::from(q), p));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::cf_expand;
    use crate::exactnum::parse_rational;

    fn golden() -> FieldReal {
        FieldReal::parse("(1+1*sqrt(5))/2").unwrap()
    }

    fn walk(
        theta: &FieldReal,
        eps: &str,
        s: &str,
        q_min: u64,
        q_max: u64,
    ) -> Vec<(BigInt, BigInt)> {
        let mut cf = cf_expand(theta).unwrap();
        small_fractional_parts(
            &mut cf,
            &parse_rational(eps).unwrap(),
            &parse_rational(s).unwrap(),
            &BigInt::from(q_min),
            &BigInt::from(q_max),
        )
        .unwrap()
    }

    #[test]
    fn golden_window_examples() {
        let hits = walk(&golden(), "1/100", "0", 1, 1000);
        assert!(hits.contains(&(BigInt::from(55), BigInt::from(89))));
        assert!(walk(&golden(), "1/100", "0", 1, 3).is_empty());
    }

    #[test]
    fn sqrt2_weighted_window() {
        let hits = walk(&FieldReal::sqrt_of(2), "1/10", "1/2", 1, 30);
        assert!(hits.contains(&(BigInt::from(29), BigInt::from(41))));
    }

    #[test]
    fn matches_direct_scan() {
        let cases = [
            (golden(), "1/100", "0", 1u64, 2000u64),
            (golden(), "1/7", "1/2", 5, 1500),
            (FieldReal::sqrt_of(2), "1/10", "1/2", 1, 3000),
            (FieldReal::sqrt_of(3), "1/50", "1/4", 10, 2500),
            (FieldReal::parse("(1+1*sqrt(13))/3").unwrap(), "1/20", "3/4", 1, 1000),
        ];
        for (theta, eps, s, lo, hi) in cases {
            let a = walk(&theta, eps, s, lo, hi);
            let b = small_fractional_parts_scan(
                &theta,
                &parse_rational(eps).unwrap(),
                &parse_rational(s).unwrap(),
                lo,
                hi,
            );
            assert_eq!(a, b, "theta={theta} eps={eps} s={s} window=[{lo},{hi}]");
        }
    }

    #[test]
    fn large_window_stays_sparse() {
        // Tiny threshold over a wide window: the walk must prune, not scan.
        let hits = walk(&golden(), "1/20000", "0", 1, 10_000_000);
        let scan_check: Vec<_> = hits
            .iter()
            .filter(|(q, _)| q <= &BigInt::from(200_000u64))
            .cloned()
            .collect();
        let oracle = small_fractional_parts_scan(
            &golden(),
            &parse_rational("1/20000").unwrap(),
            &parse_rational("0").unwrap(),
            1,
            200_000,
        );
        assert_eq!(scan_check, oracle);
        assert!(!hits.is_empty());
    }

    #[test]
    fn empty_range_is_ok() {
        assert!(walk(&golden(), "1/2", "0", 10, 5).is_empty());
    }

    #[test]
    fn invalid_params_rejected() {
        let mut cf = cf_expand(&golden()).unwrap();
        assert!(matches!(
            small_fractional_parts(
                &mut cf,
                &parse_rational("0").unwrap(),
                &parse_rational("0").unwrap(),
                &BigInt::one(),
                &BigInt::from(10)
            ),
            Err(WalkError::InvalidThreshold)
        ));
        assert!(matches!(
            small_fractional_parts(
                &mut cf,
                &parse_rational("1/2").unwrap(),
                &parse_rational("-1/2").unwrap(),
                &BigInt::one(),
                &BigInt::from(10)
            ),
            Err(WalkError::InvalidExponent)
        ));
    }
}
