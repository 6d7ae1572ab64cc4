//! Canonical line selection through a dangerous point.
//!
//! The admissible `(A, B)` pairs with `A p - B r + C q = 0` form the rank-2
//! lattice `{(A, B) : A p ≡ B r (mod q)}` of determinant `q`. We Lagrange-
//! reduce a basis under the weighted norm `N(A, B) = A^2 q^{2t} + B^2 q^{2s}`
//! (the box `|A| <= q^s`, `B <= q^t` scaled to a unit square; all comparisons
//! decided exactly by clearing the rational exponents), then search the three
//! lattice lines `m2 in {-1, 0, 1}` through the reduced basis - any vector in
//! the box has `|m2| <= 1` because the weighted determinant is exactly 1 and
//! a reduced `b1` satisfies `N(b1)^2 <= (2/sqrt3) det`. Tie-break: minimal
//! `B`, then minimal `|A|`, then `A >= 0`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::constants::GameConstants;
use super::point::RatPoint;

/// Non-vertical rational line `B y = A x + C` with `B > 0`, `gcd(A,B,C) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

#[derive(Debug, Error)]
pub enum LineError {
    #[error("no admissible line for ({p}/{q}, {r}/{q}); reduced basis ({a1},{b1}), ({a2},{b2})")]
    NoLineFound {
        p: BigInt,
        q: BigInt,
        r: BigInt,
        a1: BigInt,
        b1: BigInt,
        a2: BigInt,
        b2: BigInt,
    },
}

impl Line {
    /// Validated constructor: `B > 0` and `gcd(A, B, C) = 1`. The caller is
    /// responsible for pairing it with a point it passes through.
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Option<Line> {
        if !b.is_positive() || !a.gcd(&b).gcd(&c).is_one() {
            return None;
        }
        Some(Line { a, b, c })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// Defining identity `A p - B r + C q = 0`.
    pub fn passes_through(&self, point: &RatPoint) -> bool {
        (&self.a * point.p() - &self.b * point.r() + &self.c * point.q()).is_zero()
    }

    /// Exact bound checks `|A|^v <= q^u` and `1 <= B`, `B^v <= q^w`.
    pub fn bounds_ok(&self, constants: &GameConstants, q: &BigInt) -> bool {
        let (u, v, w) = constants.exponents();
        self.b.is_positive()
            && self.a.abs().pow(v) <= q.pow(u)
            && self.b.pow(v) <= q.pow(w)
    }

    fn from_pair(a: BigInt, b: BigInt, point: &RatPoint) -> Line {
        let num = &b * point.r() - &a * point.p();
        let (c, rem) = num.div_rem(point.q());
        debug_assert!(rem.is_zero(), "lattice vector must clear the denominator");
        let g = a.gcd(&b).gcd(&c);
        debug_assert!(g.is_one(), "minimal vector is automatically primitive");
        Line {
            a: a / &g,
            b: b / &g,
            c: c / g,
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{},{})", self.a, self.b, self.c)
    }
}

/// Weighted-norm comparisons in cleared integer form.
struct WeightedNorm {
    q2w: BigInt,
    q2u: BigInt,
    v: u32,
}

impl WeightedNorm {
    fn new(q: &BigInt, u: u32, v: u32, w: u32) -> Self {
        WeightedNorm {
            q2w: q.pow(2 * w),
            q2u: q.pow(2 * u),
            v,
        }
    }

    /// Sign of `x q^{2t} + y q^{2s}`.
    fn combo_sign(&self, x: &BigInt, y: &BigInt) -> i8 {
        match (x.sign(), y.sign()) {
            (num_bigint::Sign::NoSign, num_bigint::Sign::NoSign) => 0,
            (sx, sy) if sx != num_bigint::Sign::Minus && sy != num_bigint::Sign::Minus => 1,
            (sx, sy) if sx != num_bigint::Sign::Plus && sy != num_bigint::Sign::Plus => -1,
            _ => {
                // opposite signs: compare |x|^v q^{2w} against |y|^v q^{2u}
                let lhs = x.abs().pow(self.v) * &self.q2w;
                let rhs = y.abs().pow(self.v) * &self.q2u;
                let ord = lhs.cmp(&rhs);
                let lead = if x.is_positive() { 1 } else { -1 };
                match ord {
                    Ordering::Equal => 0,
                    Ordering::Greater => lead,
                    Ordering::Less => -lead,
                }
            }
        }
    }

    /// Sign of `N(lhs) - N(rhs)`.
    fn norm_cmp(&self, lhs: &(BigInt, BigInt), rhs: &(BigInt, BigInt)) -> i8 {
        let x = &lhs.0 * &lhs.0 - &rhs.0 * &rhs.0;
        let y = &lhs.1 * &lhs.1 - &rhs.1 * &rhs.1;
        self.combo_sign(&x, &y)
    }

    /// `true` iff `mu >= m`, where `mu = <b2,b1>/N(b1)`.
    fn mu_at_least(&self, b1: &(BigInt, BigInt), b2: &(BigInt, BigInt), m: &BigInt) -> bool {
        let x = &b2.0 * &b1.0 - m * (&b1.0 * &b1.0);
        let y = &b2.1 * &b1.1 - m * (&b1.1 * &b1.1);
        self.combo_sign(&x, &y) >= 0
    }
}

fn sub_scaled(b2: &(BigInt, BigInt), m: &BigInt, b1: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&b2.0 - m * &b1.0, &b2.1 - m * &b1.1)
}

/// Largest `m` with `mu >= m` (i.e. `floor(mu)`), by exponential + binary search.
fn floor_mu(wn: &WeightedNorm, b1: &(BigInt, BigInt), b2: &(BigInt, BigInt)) -> BigInt {
    let mut step = BigInt::one();
    let mut lo;
    let mut hi;
    if wn.mu_at_least(b1, b2, &BigInt::zero()) {
        lo = BigInt::zero();
        loop {
            let cand = &lo + &step;
            if wn.mu_at_least(b1, b2, &cand) {
                lo = cand;
                step *= 2;
            } else {
                hi = &lo + &step;
                break;
            }
        }
    } else {
        hi = BigInt::zero();
        loop {
            let cand = &hi - &step;
            if !wn.mu_at_least(b1, b2, &cand) {
                hi = cand;
                step *= 2;
            } else {
                lo = &hi - &step;
                break;
            }
        }
    }
    // invariant: mu >= lo, mu < hi
    while &hi - &lo > BigInt::one() {
        let mid = (&lo + &hi) >> 1;
        if wn.mu_at_least(b1, b2, &mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Lagrange reduction under the weighted norm; returns `(b1, b2)` with
/// `N(b1) <= N(b2)` and `|<b1,b2>| <= N(b1)/2`.
fn reduce(
    wn: &WeightedNorm,
    mut b1: (BigInt, BigInt),
    mut b2: (BigInt, BigInt),
) -> ((BigInt, BigInt), (BigInt, BigInt)) {
    for _ in 0..100_000 {
        if wn.norm_cmp(&b1, &b2) > 0 {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mf = floor_mu(wn, &b1, &b2);
        let c1 = sub_scaled(&b2, &mf, &b1);
        let c2 = sub_scaled(&b2, &(&mf + 1), &b1);
        let (m, cand) = if wn.norm_cmp(&c1, &c2) <= 0 {
            (mf, c1)
        } else {
            (&mf + 1, c2)
        };
        if m.is_zero() || wn.norm_cmp(&cand, &b2) >= 0 {
            break;
        }
        b2 = cand;
    }
    if wn.norm_cmp(&b1, &b2) > 0 {
        std::mem::swap(&mut b1, &mut b2);
    }
    (b1, b2)
}

/// Integer `m1` range with `lo <= coef*m1 + off <= hi`; `None` = empty,
/// `Some(None)` = unconstrained.
#[allow(clippy::type_complexity)]
fn linear_range(
    coef: &BigInt,
    off: &BigInt,
    lo: &BigInt,
    hi: &BigInt,
) -> Option<Option<(BigInt, BigInt)>> {
    if coef.is_zero() {
        return if lo <= off && off <= hi {
            Some(None)
        } else {
            None
        };
    }
    let (a, b) = if coef.is_positive() {
        (lo - off, hi - off)
    } else {
        (hi - off, lo - off)
    };
    let m_lo = a.div_ceil(coef);
    let m_hi = b.div_floor(coef);
    if m_lo > m_hi {
        None
    } else {
        Some(Some((m_lo, m_hi)))
    }
}

fn intersect(
    x: Option<Option<(BigInt, BigInt)>>,
    y: Option<Option<(BigInt, BigInt)>>,
) -> Option<(BigInt, BigInt)> {
    match (x?, y?) {
        (Some((a, b)), Some((c, d))) => {
            let lo = a.max(c);
            let hi = b.min(d);
            (lo <= hi).then_some((lo, hi))
        }
        (Some(r), None) | (None, Some(r)) => Some(r),
        (None, None) => unreachable!("both constraints degenerate"),
    }
}

/// Rank key implementing the tie-break: minimal `B`, minimal `|A|`, `A >= 0`.
fn rank_key(v: &(BigInt, BigInt)) -> (BigInt, BigInt, u8) {
    (v.1.clone(), v.0.abs(), u8::from(v.0.is_negative()))
}

/// The canonical admissible line through `point`, if one exists.
pub fn find_line(constants: &GameConstants, point: &RatPoint) -> Result<Line, LineError> {
    let (u, v, w) = constants.exponents();
    let q = point.q();
    let a_max = q.pow(u).nth_root(v);
    let b_max = q.pow(w).nth_root(v);

    // Basis of {(A,B): A p ≡ B r (mod q)}: (q/g, 0) and (A*, g) with
    // g = gcd(p, q) and A* p/g ≡ r (mod q/g).
    let g = point.p().gcd(q);
    let q_red = q / &g;
    let p_red = point.p() / &g;
    let a_star = if q_red.is_one() {
        BigInt::zero()
    } else {
        let e = p_red.extended_gcd(&q_red);
        debug_assert!(e.gcd.is_one());
        (point.r() * e.x).mod_floor(&q_red)
    };
    let basis1 = (q_red.clone(), BigInt::zero());
    let basis2 = (a_star, g);

    let wn = WeightedNorm::new(q, u, v, w);
    let (b1, b2) = reduce(&wn, basis1, basis2);

    let neg_a_max = -&a_max;
    let one = BigInt::one();
    let mut best: Option<(BigInt, BigInt)> = None;
    let mut consider = |cand: (BigInt, BigInt)| {
        if cand.1 < one || cand.1 > b_max || cand.0 < neg_a_max || cand.0 > a_max {
            return;
        }
        match &best {
            Some(cur) if rank_key(cur) <= rank_key(&cand) => {}
            _ => best = Some(cand),
        }
    };

    for m2 in [-1i32, 0, 1] {
        let m2 = BigInt::from(m2);
        let off_a = &m2 * &b2.0;
        let off_b = &m2 * &b2.1;
        let range_a = linear_range(&b1.0, &off_a, &neg_a_max, &a_max);
        let range_b = linear_range(&b1.1, &off_b, &one, &b_max);
        let Some((lo, hi)) = intersect(range_a, range_b) else {
            continue;
        };
        if !b1.1.is_zero() {
            // B monotone in m1: minimal B at one endpoint.
            let m1 = if b1.1.is_positive() { lo } else { hi };
            consider((&b1.0 * &m1 + &off_a, &b1.1 * &m1 + &off_b));
        } else {
            // B constant along this line; minimize |A| (A = m1 b1.0 + off_a).
            let target = -&off_a;
            let m_mid = target.div_floor(&b1.0);
            for m1 in [m_mid.clone(), &m_mid + 1, lo.clone(), hi.clone()] {
                if m1 < lo || m1 > hi {
                    continue;
                }
                consider((&b1.0 * &m1 + &off_a, &b1.1 * &m1 + &off_b));
            }
        }
    }

    match best {
        Some((a, b)) => Ok(Line::from_pair(a, b, point)),
        None => Err(LineError::NoLineFound {
            p: point.p().clone(),
            q: q.clone(),
            r: point.r().clone(),
            a1: b1.0,
            b1: b1.1,
            a2: b2.0,
            b2: b2.1,
        }),
    }
}

/// Exhaustive oracle: ascending `B`, then `A` in the order `0, 1, -1, 2, ...`;
/// the first hit is the canonical line. Only for small boxes.
pub fn find_line_exhaustive(constants: &GameConstants, point: &RatPoint) -> Option<Line> {
    let (u, v, w) = constants.exponents();
    let q = point.q();
    let a_max = q.pow(u).nth_root(v);
    let b_max = q.pow(w).nth_root(v);
    let a_lim: u64 = (&a_max).try_into().expect("oracle box too wide");
    let b_lim: u64 = (&b_max).try_into().expect("oracle box too wide");
    assert!(
        (2 * a_lim + 1).saturating_mul(b_lim) <= 200_000_000,
        "exhaustive search box too large"
    );
    for b in 1..=b_lim {
        let b = BigInt::from(b);
        let base = &b * point.r();
        for a_mag in 0..=a_lim {
            for a in [BigInt::from(a_mag), BigInt::from(-(a_mag as i64))] {
                if a_mag == 0 && a.is_negative() {
                    continue;
                }
                if (&a * point.p() - &base).mod_floor(q).is_zero() {
                    return Some(Line::from_pair(a, b, point));
                }
                if a_mag == 0 {
                    break;
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_rational, FieldReal};
    use crate::pointset::{make_constants, CMode};

    fn half_half_constants() -> GameConstants {
        make_constants(
            &parse_rational("1/2").unwrap(),
            &parse_rational("1/2").unwrap(),
            &parse_rational("9/10").unwrap(),
            &FieldReal::sqrt_of(2),
            &parse_rational("39").unwrap(),
            CMode::Override,
            Some(&parse_rational("1/3").unwrap()),
        )
        .unwrap()
    }

    fn pt(p: i64, q: i64, r: i64) -> RatPoint {
        RatPoint::new(p.into(), q.into(), r.into()).unwrap()
    }

    #[test]
    fn example_point_3_5() {
        // P = (3/5, 1/5), s = t = 1/2: canonical line is L(2,1,-1).
        let c = half_half_constants();
        let line = find_line(&c, &pt(3, 5, 1)).unwrap();
        assert_eq!(
            (line.a().clone(), line.b().clone(), line.c().clone()),
            (2.into(), 1.into(), (-1).into())
        );
        assert!(line.passes_through(&pt(3, 5, 1)));
        assert!(line.bounds_ok(&c, &BigInt::from(5)));
        assert_eq!(find_line_exhaustive(&c, &pt(3, 5, 1)), Some(line));
    }

    #[test]
    fn q_one_case() {
        // q = 1: the box is |A| <= 1, B = 1; minimal-B/minimal-|A| gives (0,1,r).
        let c = half_half_constants();
        let line = find_line(&c, &pt(1, 1, 0)).unwrap();
        assert!(line.passes_through(&pt(1, 1, 0)));
        assert!(line.bounds_ok(&c, &BigInt::one()));
        assert_eq!(
            (line.a().clone(), line.b().clone(), line.c().clone()),
            (0.into(), 1.into(), 0.into())
        );
    }

    #[test]
    fn matches_exhaustive_on_a_grid() {
        let c = half_half_constants();
        for q in 2i64..=60 {
            for p in 1..=q {
                for r in 0..q {
                    let Ok(point) = RatPoint::new(p.into(), q.into(), r.into()) else {
                        continue;
                    };
                    let lat = find_line(&c, &point);
                    let exh = find_line_exhaustive(&c, &point);
                    match (lat, exh) {
                        (Ok(l), Some(e)) => {
                            assert_eq!(l, e, "mismatch at ({p},{q},{r})");
                            assert!(l.passes_through(&point));
                            assert!(l.bounds_ok(&c, point.q()));
                        }
                        (Err(_), None) => {}
                        (l, e) => panic!("disagreement at ({p},{q},{r}): {l:?} vs {e:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn larger_denominators_stay_consistent() {
        let c = half_half_constants();
        // convergent-denominator points of sqrt 2 with assorted r
        for (p, q) in [(41i64, 29i64), (99, 70), (239, 169), (577, 408)] {
            for r in [0i64, 1, 7, 13, 28] {
                let Ok(point) = RatPoint::new(p.into(), q.into(), r.into()) else {
                    continue;
                };
                let lat = find_line(&c, &point).unwrap();
                let exh = find_line_exhaustive(&c, &point).unwrap();
                assert_eq!(lat, exh, "({p},{q},{r})");
            }
        }
    }
}
