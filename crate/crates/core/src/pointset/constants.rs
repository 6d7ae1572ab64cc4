//! Construction of the game constants tuple.
//!
//! `R = 16 beta^-4`, the contraction budget; `c` bounds the danger radius and
//! is either certified (largest dyadic `2^-k` below all three branch bounds)
//! or user-overridden; `H_n = 4 c l^-1 R^n` is the geometric level ladder;
//! `lambda = 3/t^2` and `mu = 1/(t(1+t))` split levels into classes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::diophantine::{badness_floor, cf_expand, BadnessBound, CfError};
use crate::exactnum::{format_rational, rat_pow, rat_pow_int, FieldReal, Rational};

/// Levels precomputed in the `H_n` ladder (depths beyond this are rejected).
pub const MAX_LEVEL: u32 = 160;

/// Hard cap on the tree fanout `[R]`.
pub const MAX_FANOUT: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CMode {
    Certified,
    Override,
}

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("degenerate exponent: s = 0 or t = 0 reduces to the classical one-dimensional problem (Bad(0,1) = R x Bad); this engine requires s, t > 0")]
    DegenerateExponent,
    #[error("s and t must be nonnegative rationals with s + t = 1")]
    ExponentsNotComplementary,
    #[error("exponent denominator {0} exceeds the supported limit 64")]
    ExponentDenominator(BigInt),
    #[error("beta must lie strictly between 0 and 1")]
    InvalidBeta,
    #[error("l (the length of the first interval) must be positive")]
    InvalidLength,
    #[error("certified mode requires an irrational theta: {0}")]
    Theta(#[from] CfError),
    #[error("override mode requires a positive c_override")]
    InvalidOverride,
    #[error("tree fanout [R] = {0} exceeds the supported limit")]
    TreeTooWide(String),
    #[error("no dyadic c satisfies the three branch bounds (search exhausted)")]
    CertifiedSearchFailed,
}

/// The tuple `(s, t, beta, l, R, [R], c, lambda, mu)` plus the `H_n` ladder.
#[derive(Debug, Clone)]
pub struct GameConstants {
    s: Rational,
    t: Rational,
    /// Cleared exponents: `s = u/v`, `t = w/v`, `u + w = v`.
    u: u32,
    v: u32,
    w: u32,
    beta: Rational,
    l: Rational,
    big_r: Rational,
    bracket_r: u64,
    c: Rational,
    c_mode: CMode,
    lambda: Rational,
    mu: Rational,
    theta: FieldReal,
    badness: Option<BadnessBound>,
    /// The second branch bound `l R^-1 / 4` (enforced in both modes).
    quarter_branch: Rational,
    h_cache: Vec<Rational>,
}

/// Builds the constants; `c_override` is required in override mode.
pub fn make_constants(
    s: &Rational,
    t: &Rational,
    beta: &Rational,
    theta: &FieldReal,
    l: &Rational,
    c_mode: CMode,
    c_override: Option<&Rational>,
) -> Result<GameConstants, ConstantsError> {
    if s.is_negative() || t.is_negative() || &(s + t) != &Rational::one() {
        return Err(ConstantsError::ExponentsNotComplementary);
    }
    if s.is_zero() || t.is_zero() {
        return Err(ConstantsError::DegenerateExponent);
    }
    if !(beta > &Rational::zero() && beta < &Rational::one()) {
        return Err(ConstantsError::InvalidBeta);
    }
    if !l.is_positive() {
        return Err(ConstantsError::InvalidLength);
    }
    let v_big: BigInt = s.denom().lcm(t.denom());
    if v_big > BigInt::from(64) {
        return Err(ConstantsError::ExponentDenominator(v_big));
    }
    let v = v_big.to_u32().expect("checked");
    let u = (s * Rational::from_integer(v.into()))
        .to_integer()
        .to_u32()
        .expect("s <= 1");
    let w = v - u;

    let big_r = rat_pow_int(beta, -4) * Rational::from_integer(16.into());
    debug_assert!(big_r > Rational::from_integer(16.into()));
    let bracket_r_big = big_r.floor().to_integer();
    let bracket_r = bracket_r_big
        .to_u64()
        .filter(|&x| x <= MAX_FANOUT)
        .ok_or_else(|| ConstantsError::TreeTooWide(bracket_r_big.to_string()))?;

    let quarter_branch = l * rat_pow_int(&big_r, -1) / Rational::from_integer(4.into());

    let (c, badness) = match c_mode {
        CMode::Override => {
            let ov = c_override.ok_or(ConstantsError::InvalidOverride)?;
            if !ov.is_positive() {
                return Err(ConstantsError::InvalidOverride);
            }
            (std::cmp::min(ov.clone(), quarter_branch.clone()), None)
        }
        CMode::Certified => {
            let cf = cf_expand(theta)?;
            let floor = badness_floor(&cf);
            // Third branch c <= (1/8) R^{-(2 + 3/t^2)} in cleared form:
            // c^{w^2} R^{2 w^2 + 3 v^2} <= (1/8)^{w^2}.
            let w2 = BigInt::from(w) * BigInt::from(w);
            let exp_r = BigInt::from(2) * &w2 + BigInt::from(3) * BigInt::from(v) * BigInt::from(v);
            let r_pow = rat_pow(&big_r, &exp_r);
            let eighth_pow = rat_pow(&Rational::new(BigInt::one(), 8.into()), &w2);
            let half = Rational::new(BigInt::one(), 2.into());
            let mut c = Rational::one();
            let mut found = None;
            for _ in 0..=20_000 {
                let third_ok = &rat_pow(&c, &w2) * &r_pow <= eighth_pow;
                if c <= floor.certified_floor && c <= quarter_branch && third_ok {
                    found = Some(c.clone());
                    break;
                }
                c *= &half;
            }
            match found {
                Some(c) => (c, Some(floor)),
                None => return Err(ConstantsError::CertifiedSearchFailed),
            }
        }
    };

    let lambda = Rational::from_integer(3.into()) / (t * t);
    let mu = (t * &(Rational::one() + t)).recip();

    // H_n ladder, H_0 = 4 c / l.
    let base = Rational::from_integer(4.into()) * &c / l;
    let mut h_cache = Vec::with_capacity(MAX_LEVEL as usize + 2);
    h_cache.push(base);
    for n in 1..=(MAX_LEVEL as usize + 1) {
        let next = &h_cache[n - 1] * &big_r;
        h_cache.push(next);
    }
    debug_assert!(h_cache[1] <= Rational::one(), "H_1 <= 1 must hold");

    Ok(GameConstants {
        s: s.clone(),
        t: t.clone(),
        u,
        v,
        w,
        beta: beta.clone(),
        l: l.clone(),
        big_r,
        bracket_r,
        c,
        c_mode,
        lambda,
        mu,
        theta: theta.clone(),
        badness,
        quarter_branch,
        h_cache,
    })
}

impl GameConstants {
    pub fn s(&self) -> &Rational {
        &self.s
    }
    pub fn t(&self) -> &Rational {
        &self.t
    }
    /// `(u, v, w)` with `s = u/v`, `t = w/v`.
    pub fn exponents(&self) -> (u32, u32, u32) {
        (self.u, self.v, self.w)
    }
    pub fn beta(&self) -> &Rational {
        &self.beta
    }
    pub fn l(&self) -> &Rational {
        &self.l
    }
    pub fn big_r(&self) -> &Rational {
        &self.big_r
    }
    pub fn bracket_r(&self) -> u64 {
        self.bracket_r
    }
    pub fn c(&self) -> &Rational {
        &self.c
    }
    pub fn c_mode(&self) -> CMode {
        self.c_mode
    }
    pub fn certified(&self) -> bool {
        self.c_mode == CMode::Certified
    }
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }
    pub fn mu(&self) -> &Rational {
        &self.mu
    }
    pub fn theta(&self) -> &FieldReal {
        &self.theta
    }
    pub fn badness(&self) -> Option<&BadnessBound> {
        self.badness.as_ref()
    }
    pub fn quarter_branch(&self) -> &Rational {
        &self.quarter_branch
    }

    /// `H_n = 4 c l^-1 R^n`; `n = 0` is the ladder base.
    pub fn h(&self, n: u32) -> &Rational {
        assert!(
            (n as usize) < self.h_cache.len(),
            "level {n} beyond the precomputed ladder"
        );
        &self.h_cache[n as usize]
    }

    /// `t/(1+t)` as a rational (`w/(v+w)`).
    pub fn t_over_1pt(&self) -> Rational {
        Rational::new(BigInt::from(self.w), BigInt::from(self.v + self.w))
    }

    /// `theta` scaled by the integer `q`.
    pub fn q_theta(&self, q: &BigInt) -> FieldReal {
        self.theta.scale(&Rational::from_integer(q.clone()))
    }

    /// Compact digest-friendly description of every constant.
    pub fn snapshot(&self) -> Vec<(String, String)> {
        vec![
            ("theta".into(), self.theta.to_surd_string()),
            ("s".into(), format_rational(&self.s)),
            ("t".into(), format_rational(&self.t)),
            ("beta".into(), format_rational(&self.beta)),
            ("l".into(), format_rational(&self.l)),
            ("R".into(), format_rational(&self.big_r)),
            ("bracket_R".into(), self.bracket_r.to_string()),
            ("c".into(), format_rational(&self.c)),
            (
                "c_mode".into(),
                match self.c_mode {
                    CMode::Certified => "certified".into(),
                    CMode::Override => "override".into(),
                },
            ),
            ("lambda".into(), format_rational(&self.lambda)),
            ("mu".into(), format_rational(&self.mu)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn mk(
        s: &str,
        t: &str,
        beta: &str,
        theta: &str,
        l: &str,
        mode: CMode,
        ov: Option<&str>,
    ) -> Result<GameConstants, ConstantsError> {
        let ov = ov.map(|x| parse_rational(x).unwrap());
        make_constants(
            &r(s),
            &r(t),
            &r(beta),
            &FieldReal::parse(theta).unwrap(),
            &r(l),
            mode,
            ov.as_ref(),
        )
    }

    #[test]
    fn r_values() {
        let g1 = mk("1/2", "1/2", "1/2", "sqrt(2)", "1", CMode::Override, Some("1/1024")).unwrap();
        assert_eq!(g1.big_r(), &r("256"));
        assert_eq!(g1.bracket_r(), 256);
        let g2 = mk(
            "1/4",
            "3/4",
            "9/10",
            "(1+1*sqrt(5))/2",
            "1",
            CMode::Certified,
            None,
        )
        .unwrap();
        assert_eq!(g2.big_r(), &r("160000/6561"));
        assert_eq!(g2.bracket_r(), 24);
        // t = 3/4: lambda = 16/3, mu = 16/21
        assert_eq!(g2.lambda(), &r("16/3"));
        assert_eq!(g2.mu(), &r("16/21"));
        assert_eq!(g2.exponents(), (1, 4, 3));
    }

    #[test]
    fn certified_c_is_dyadic_and_largest() {
        let g2 = mk(
            "1/4",
            "3/4",
            "9/10",
            "(1+1*sqrt(5))/2",
            "1",
            CMode::Certified,
            None,
        )
        .unwrap();
        // Oracle: exact branch checks give c = 2^-37 for this config.
        assert_eq!(g2.c(), &r("1/137438953472"));
        // H_1 <= 1 and the ladder is geometric.
        assert!(g2.h(1) <= &r("1"));
        assert_eq!(g2.h(7) / g2.h(6), r("160000/6561"));
    }

    #[test]
    fn override_capped_by_quarter_branch() {
        let g = mk("1/2", "1/2", "1/2", "sqrt(2)", "1", CMode::Override, Some("1/2")).unwrap();
        assert_eq!(g.c(), &r("1/1024")); // capped at l R^-1 / 4
        assert_eq!(g.h(1), &r("1"));
        let g = mk("1/2", "1/2", "9/10", "sqrt(2)", "39", CMode::Override, Some("1/3")).unwrap();
        assert_eq!(g.c(), &r("1/3"));
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            mk("0", "1", "1/2", "sqrt(2)", "1", CMode::Certified, None),
            Err(ConstantsError::DegenerateExponent)
        ));
        assert!(matches!(
            mk("1/2", "1/3", "1/2", "sqrt(2)", "1", CMode::Certified, None),
            Err(ConstantsError::ExponentsNotComplementary)
        ));
        assert!(matches!(
            mk("1/2", "1/2", "1", "sqrt(2)", "1", CMode::Certified, None),
            Err(ConstantsError::InvalidBeta)
        ));
        assert!(matches!(
            mk("1/2", "1/2", "1/2", "3/2", "1", CMode::Certified, None),
            Err(ConstantsError::Theta(_))
        ));
        assert!(matches!(
            mk("1/2", "1/2", "1/2", "sqrt(2)", "1", CMode::Override, Some("-1/4")),
            Err(ConstantsError::InvalidOverride)
        ));
        assert!(matches!(
            mk("1/2", "1/2", "1/2", "sqrt(2)", "0", CMode::Certified, None),
            Err(ConstantsError::InvalidLength)
        ));
    }
}
