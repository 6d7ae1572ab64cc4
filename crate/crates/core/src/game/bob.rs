//! Programmable opponents.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{rat_pow_int, Rational};
use crate::interval::IntervalQ;
use crate::pointset::{ClassifiedPoint, DangerProbe};

use super::state::GameState;

/// What a Bob implementation may look at before moving.
#[derive(Debug, Clone)]
pub struct BobView {
    pub required_length: Rational,
    /// Left offsets range over `[0, offset_range]`.
    pub offset_range: Rational,
    /// Dangerous cells of the current block.
    pub danger_cells: Vec<IntervalQ>,
}

pub enum BobMove {
    Play(IntervalQ),
    Quit,
}

pub trait BobPlayer {
    fn name(&self) -> &'static str;
    fn choose(&mut self, state: &GameState, view: &BobView) -> Result<BobMove, String>;
}

/// Uniform play on the `2^-32` grid of the allowed offset range.
pub struct RandomBob {
    rng: ChaCha8Rng,
}

impl RandomBob {
    pub fn new(seed: u64) -> Self {
        RandomBob {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The legal interval at grid position `i` of `0..=2^32`.
    pub fn at_grid(state: &GameState, view: &BobView, i: u64) -> IntervalQ {
        debug_assert!(i <= 1 << 32);
        let offset = &view.offset_range * Rational::new(BigInt::from(i), BigInt::from(1u64 << 32));
        state.current().sub_at(&offset, &view.required_length)
    }
}

impl BobPlayer for RandomBob {
    fn name(&self) -> &'static str {
        "random"
    }

    fn choose(&mut self, state: &GameState, view: &BobView) -> Result<BobMove, String> {
        let i = self.rng.gen_range(0..=(1u64 << 32));
        Ok(BobMove::Play(Self::at_grid(state, view, i)))
    }
}

/// Scripted offsets as fractions of the allowed range, one per move.
pub struct ScriptBob {
    fractions: Vec<Rational>,
    next: usize,
}

impl ScriptBob {
    pub fn new(fractions: Vec<Rational>) -> Self {
        ScriptBob { fractions, next: 0 }
    }
}

impl BobPlayer for ScriptBob {
    fn name(&self) -> &'static str {
        "script"
    }

    fn choose(&mut self, state: &GameState, view: &BobView) -> Result<BobMove, String> {
        let frac = self
            .fractions
            .get(self.next)
            .ok_or_else(|| format!("script exhausted after {} moves", self.next))?;
        if frac.is_negative() || frac > &Rational::from_integer(1.into()) {
            return Err(format!("script offset fraction {frac} outside [0, 1]"));
        }
        self.next += 1;
        let offset = &view.offset_range * frac;
        Ok(BobMove::Play(
            state.current().sub_at(&offset, &view.required_length),
        ))
    }
}

/// Greedy adversary: keeps as many dangerous cells as possible, then
/// maximizes overlap with the nearest enumerated danger interval; ties to
/// the left. Candidate offsets are the alignment breakpoints, so the
/// optimum over the continuous range is attained at one of them.
pub struct AdversarialBob<'a, P: DangerProbe> {
    probe: &'a P,
    max_level: u32,
    budget: usize,
}

impl<'a, P: DangerProbe> AdversarialBob<'a, P> {
    pub fn new(probe: &'a P, max_level: u32, budget: usize) -> Self {
        AdversarialBob {
            probe,
            max_level,
            budget,
        }
    }

    /// The enumerated danger point nearest to the interval, when the local
    /// window is explorable under budget.
    fn nearest_danger(&self, iv: &IntervalQ) -> Option<ClassifiedPoint> {
        let mut best: Option<(Rational, ClassifiedPoint)> = None;
        for level in 1..=self.max_level {
            if self.probe.provably_empty(level) {
                continue;
            }
            let Ok(points) = self.probe.probe(level, iv, self.budget) else {
                continue;
            };
            for cp in points {
                let d = iv.distance_to(&cp.point.center());
                let better = match &best {
                    None => true,
                    Some((bd, bcp)) => {
                        d < *bd
                            || (d == *bd
                                && (cp.point.center(), cp.point.q().clone())
                                    < (bcp.point.center(), bcp.point.q().clone()))
                    }
                };
                if better {
                    best = Some((d, cp));
                }
            }
        }
        best.map(|(_, cp)| cp)
    }
}

/// Exact comparison helper for `alpha + beta * rho` with `rho = c/q^{1+t}`
/// (irrational in general): `rho^v` is rational, so signs clear by raising
/// to the `v`-th power.
struct RhoArith {
    rho_pow_v: Rational,
    v: u32,
}

impl RhoArith {
    fn for_point(constants: &crate::pointset::GameConstants, q: &BigInt) -> Self {
        let (_, v, w) = constants.exponents();
        let rho_pow_v = rat_pow_int(constants.c(), v as i64)
            / Rational::from_integer(q.pow(v + w));
        RhoArith { rho_pow_v, v }
    }

    /// sign of `alpha + beta * rho`
    fn sign(&self, alpha: &Rational, beta: i64) -> i8 {
        let sa = rat_sign(alpha);
        let sb = beta.signum() as i8;
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // opposite signs: compare |alpha|^v against |beta|^v rho^v
        let lhs = rat_pow_int(&alpha.abs(), self.v as i64);
        let rhs = rat_pow_int(
            &Rational::from_integer(BigInt::from(beta.abs())),
            self.v as i64,
        ) * &self.rho_pow_v;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
        }
    }
}

fn rat_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Overlap length of `[x, x+len]` with the open `(center-rho, center+rho)`
/// as a linear form `alpha + beta rho`, for exact comparison.
fn overlap_form(
    x: &Rational,
    len: &Rational,
    center: &Rational,
    arith: &RhoArith,
) -> (Rational, i64) {
    // lo = max(x, center - rho), hi = min(x + len, center + rho)
    let (lo_a, lo_b) = {
        let diff = x - center; // x vs center - rho: sign(diff + rho)
        if arith.sign(&diff, 1) >= 0 {
            (x.clone(), 0i64)
        } else {
            (center.clone(), -1)
        }
    };
    let (hi_a, hi_b) = {
        let xe = x + len;
        let diff = &xe - center; // x+len vs center + rho: sign(diff - rho)
        if arith.sign(&diff, -1) <= 0 {
            (xe, 0i64)
        } else {
            (center.clone(), 1)
        }
    };
    let alpha = hi_a - lo_a;
    let beta = hi_b - lo_b;
    // negative overlap clamps to zero
    if arith.sign(&alpha, beta) <= 0 {
        (Rational::zero(), 0)
    } else {
        (alpha, beta)
    }
}

impl<P: DangerProbe> BobPlayer for AdversarialBob<'_, P> {
    fn name(&self) -> &'static str {
        "adversarial"
    }

    fn choose(&mut self, state: &GameState, view: &BobView) -> Result<BobMove, String> {
        let cur = state.current();
        let len = &view.required_length;
        let range = &view.offset_range;
        let zero = Rational::zero();

        // Candidate offsets: range ends, danger-cell alignments, and the
        // nearest-danger alignments.
        let mut candidates: Vec<Rational> = vec![zero.clone(), range.clone()];
        let mut push = |off: Rational| {
            if off >= zero && &off <= range {
                candidates.push(off);
            }
        };
        for cell in &view.danger_cells {
            push(cell.left() - cur.left());
            push(cell.right() - len - cur.left());
        }
        let target = self.nearest_danger(cur);
        if let Some(cp) = &target {
            let center = cp.point.center();
            let half = len / Rational::from_integer(2.into());
            push(&center - &half - cur.left());
            push(&center - len - cur.left());
            push(center - cur.left());
        }
        candidates.sort();
        candidates.dedup();

        let arith = target
            .as_ref()
            .map(|cp| RhoArith::for_point(self.probe.constants(), cp.point.q()));

        let mut best: Option<(usize, (Rational, i64), Rational)> = None;
        for off in candidates {
            let iv = cur.sub_at(&off, len);
            let retained = view.danger_cells.iter().filter(|c| iv.contains(c)).count();
            let overlap = match (&target, &arith) {
                (Some(cp), Some(a)) => overlap_form(iv.left(), len, &cp.point.center(), a),
                _ => (Rational::zero(), 0),
            };
            let better = match &best {
                None => true,
                Some((bret, bover, boff)) => {
                    use std::cmp::Ordering::*;
                    match retained.cmp(bret) {
                        Greater => true,
                        Less => false,
                        Equal => {
                            let diff_a = &overlap.0 - &bover.0;
                            let diff_b = overlap.1 - bover.1;
                            let s = match &arith {
                                Some(a) => a.sign(&diff_a, diff_b),
                                None => rat_sign(&diff_a),
                            };
                            s > 0 || (s == 0 && &off < boff)
                        }
                    }
                }
            };
            if better {
                best = Some((retained, overlap, off));
            }
        }
        let off = best.map(|(_, _, off)| off).unwrap_or(zero);
        Ok(BobMove::Play(cur.sub_at(&off, len)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;
    use crate::game::state::GameConfig;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn opened() -> (GameState, BobView) {
        let config = GameConfig {
            beta: r("1/2"),
            b0: IntervalQ::new(r("0"), r("2")),
            rounds: 4,
        };
        let mut st = GameState::open(&config);
        st.push(super::super::state::Mover::Alice, IntervalQ::new(r("1/2"), r("3/2")));
        let view = BobView {
            required_length: st.required_length(),
            offset_range: st.offset_range(),
            danger_cells: Vec::new(),
        };
        (st, view)
    }

    #[test]
    fn grid_alignment() {
        let (st, view) = opened();
        // offset 0: left-aligned; max grid: right-aligned
        let left = RandomBob::at_grid(&st, &view, 0);
        assert_eq!(left, IntervalQ::new(r("1/2"), r("1")));
        let right = RandomBob::at_grid(&st, &view, 1 << 32);
        assert_eq!(right, IntervalQ::new(r("1"), r("3/2")));
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let (st, view) = opened();
        let mut a = RandomBob::new(7);
        let mut b = RandomBob::new(7);
        for _ in 0..5 {
            let (BobMove::Play(x), BobMove::Play(y)) = (
                a.choose(&st, &view).unwrap(),
                b.choose(&st, &view).unwrap(),
            ) else {
                panic!("random bob never quits")
            };
            assert_eq!(x, y);
        }
    }

    #[test]
    fn script_fractions() {
        let (st, view) = opened();
        let mut bob = ScriptBob::new(vec![r("0"), r("1"), r("1/2")]);
        let BobMove::Play(a) = bob.choose(&st, &view).unwrap() else {
            panic!()
        };
        assert_eq!(a, IntervalQ::new(r("1/2"), r("1")));
        let BobMove::Play(b) = bob.choose(&st, &view).unwrap() else {
            panic!()
        };
        assert_eq!(b, IntervalQ::new(r("1"), r("3/2")));
        let BobMove::Play(c) = bob.choose(&st, &view).unwrap() else {
            panic!()
        };
        assert_eq!(c, IntervalQ::new(r("3/4"), r("5/4")));
        assert!(bob.choose(&st, &view).is_err());
    }
}
