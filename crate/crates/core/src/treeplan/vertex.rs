//! Tree vertices as digit paths and the left-packed interval map.

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::exactnum::{rat_floor, rat_pow_int, Rational};
use crate::interval::IntervalQ;
use crate::pointset::{DeltaNbhd, GameConstants};

/// A vertex of the `[R]`-regular rooted tree, addressed by its digit path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    digits: Vec<u64>,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex { digits: Vec::new() }
    }

    pub fn from_digits(digits: Vec<u64>) -> Self {
        Vertex { digits }
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn height(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.digits.is_empty() {
            None
        } else {
            Some(Vertex {
                digits: self.digits[..self.digits.len() - 1].to_vec(),
            })
        }
    }

    pub fn child(&self, digit: u64) -> Vertex {
        let mut digits = self.digits.clone();
        digits.push(digit);
        Vertex { digits }
    }

    /// Ancestor at the given height (every vertex is its own ancestor).
    pub fn ancestor_at(&self, height: u32) -> Option<Vertex> {
        (height <= self.height()).then(|| Vertex {
            digits: self.digits[..height as usize].to_vec(),
        })
    }

    pub fn is_descendant_of(&self, other: &Vertex) -> bool {
        self.digits.len() >= other.digits.len()
            && self.digits[..other.digits.len()] == other.digits[..]
    }

    /// The adjacent cell at the same height (`dir = -1` or `+1`), carrying
    /// across parent boundaries; `None` beyond the tree edge.
    pub fn step(&self, fanout: u64, dir: i8) -> Option<Vertex> {
        let mut digits = self.digits.clone();
        if digits.is_empty() {
            return None;
        }
        let mut i = digits.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if dir > 0 {
                if digits[i] + 1 < fanout {
                    digits[i] += 1;
                    for d in digits[i + 1..].iter_mut() {
                        *d = 0;
                    }
                    return Some(Vertex { digits });
                }
            } else if digits[i] > 0 {
                digits[i] -= 1;
                for d in digits[i + 1..].iter_mut() {
                    *d = fanout - 1;
                }
                return Some(Vertex { digits });
            }
        }
    }

    pub fn path_string(&self) -> String {
        if self.digits.is_empty() {
            return "root".to_string();
        }
        self.digits
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("root interval length {0} does not match l = {1}")]
    LengthMismatch(String, String),
}

/// The interval map: the root carries `A_0`, and the `j`-th successor of a
/// height-`(n-1)` vertex with interval start `a` carries
/// `[a + j l R^-n, a + (j+1) l R^-n]`. Cells pack to the left; the slack
/// `l R^-(n-1) - [R] l R^-n` sits at the right end of each parent.
pub struct TreeFrame {
    constants: std::sync::Arc<GameConstants>,
    root: IntervalQ,
}

impl TreeFrame {
    pub fn new(
        constants: std::sync::Arc<GameConstants>,
        root: IntervalQ,
    ) -> Result<Self, FrameError> {
        if &root.length() != constants.l() {
            return Err(FrameError::LengthMismatch(
                root.length().to_string(),
                constants.l().to_string(),
            ));
        }
        Ok(TreeFrame { constants, root })
    }

    pub fn constants(&self) -> &GameConstants {
        &self.constants
    }

    pub fn constants_arc(&self) -> std::sync::Arc<GameConstants> {
        std::sync::Arc::clone(&self.constants)
    }

    pub fn root_interval(&self) -> &IntervalQ {
        &self.root
    }

    pub fn fanout(&self) -> u64 {
        self.constants.bracket_r()
    }

    /// `l R^-n`, the cell width at height `n`.
    pub fn cell_width(&self, height: u32) -> Rational {
        self.constants.l() * rat_pow_int(self.constants.big_r(), -(height as i64))
    }

    pub fn interval_of(&self, v: &Vertex) -> IntervalQ {
        let mut left = self.root.left().clone();
        for (i, &d) in v.digits().iter().enumerate() {
            let w = self.cell_width(i as u32 + 1);
            left += Rational::from_integer(BigInt::from(d)) * w;
        }
        let w = self.cell_width(v.height());
        IntervalQ::new(left.clone(), left + w)
    }

    /// The height-`h` cell containing `x` (on a shared boundary the right
    /// cell wins); `None` when `x` falls outside the packed cells.
    pub fn locate(&self, x: &Rational, h: u32) -> Option<Vertex> {
        self.locate_impl(x, h, false)
    }

    /// Like [`Self::locate`] but clamps out-of-range digits to the nearest
    /// cell, so every `x` gets a base cell for neighborhood scans.
    pub fn locate_clamped(&self, x: &Rational, h: u32) -> Vertex {
        self.locate_impl(x, h, true).expect("clamped locate is total")
    }

    fn locate_impl(&self, x: &Rational, h: u32, clamp: bool) -> Option<Vertex> {
        let fanout = self.fanout();
        let mut v = Vertex::root();
        let mut left = self.root.left().clone();
        for i in 1..=h {
            let w = self.cell_width(i);
            let offset = x - &left;
            let raw = rat_floor(&(&offset / &w));
            let digit: u64 = if raw.is_negative() {
                if clamp {
                    0
                } else {
                    return None;
                }
            } else {
                match u64::try_from(&raw) {
                    Ok(d) if d < fanout => d,
                    _ if clamp => fanout - 1,
                    _ => return None,
                }
            };
            left += Rational::from_integer(BigInt::from(digit)) * w;
            v = v.child(digit);
        }
        Some(v)
    }

    /// All height-`h` cells whose closed interval meets the open danger
    /// interval. The radius is at most a quarter cell for points at level
    /// `>= h`, so the base cell and its two neighbors cover every case.
    pub fn cells_meeting_delta(&self, delta: &DeltaNbhd, h: u32) -> Vec<Vertex> {
        let base = self.locate_clamped(delta.center(), h);
        let fanout = self.fanout();
        let mut cands = Vec::with_capacity(3);
        if let Some(left) = base.step(fanout, -1) {
            cands.push(left);
        }
        cands.push(base.clone());
        if let Some(right) = base.step(fanout, 1) {
            cands.push(right);
        }
        cands.retain(|cell| delta.meets(&self.constants, &self.interval_of(cell)));
        cands
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

    fn frame() -> TreeFrame {
        // G1-shaped: R = 256, l = 1, root [0,1]
        let c = make_constants(
            &r("1/2"),
            &r("1/2"),
            &r("1/2"),
            &crate::exactnum::FieldReal::sqrt_of(2),
            &r("1"),
            CMode::Override,
            Some(&r("1/1024")),
        )
        .unwrap();
        TreeFrame::new(std::sync::Arc::new(c), IntervalQ::new(r("0"), r("1"))).unwrap()
    }

    #[test]
    fn positional_intervals() {
        let f = frame();
        assert_eq!(
            f.interval_of(&Vertex::root()),
            IntervalQ::new(r("0"), r("1"))
        );
        assert_eq!(
            f.interval_of(&Vertex::from_digits(vec![0])),
            IntervalQ::new(r("0"), r("1/256"))
        );
        assert_eq!(
            f.interval_of(&Vertex::from_digits(vec![2, 3])),
            IntervalQ::new(r("515/65536"), r("516/65536"))
        );
    }

    #[test]
    fn locate_and_step() {
        let f = frame();
        let v = f.locate(&r("515/65536"), 2).unwrap();
        // boundary point: the right cell wins
        assert_eq!(v.digits(), &[2, 3]);
        let left = v.step(256, -1).unwrap();
        assert_eq!(left.digits(), &[2, 2]);
        // carry across the parent
        let edge = Vertex::from_digits(vec![3, 0]);
        assert_eq!(edge.step(256, -1).unwrap().digits(), &[2, 255]);
        assert_eq!(Vertex::from_digits(vec![0, 0]).step(256, -1), None);
        assert_eq!(
            Vertex::from_digits(vec![255, 255]).step(256, 1),
            None
        );
        assert!(f.locate(&r("2"), 1).is_none());
        assert_eq!(f.locate_clamped(&r("2"), 1).digits(), &[255]);
    }

    #[test]
    fn interval_map_conditions() {
        let f = frame();
        // length law at a few heights
        for (h, v) in [
            (1u32, Vertex::from_digits(vec![7])),
            (2, Vertex::from_digits(vec![0, 9])),
            (3, Vertex::from_digits(vec![1, 2, 3])),
        ] {
            assert_eq!(f.interval_of(&v).length(), f.cell_width(h));
        }
        // nesting along ancestry
        let v = Vertex::from_digits(vec![5, 17, 200]);
        let iv = f.interval_of(&v);
        for h in 0..3 {
            let anc = v.ancestor_at(h).unwrap();
            assert!(f.interval_of(&anc).contains(&iv));
        }
        // siblings: disjoint interiors, connected union (shared endpoints)
        let p = Vertex::from_digits(vec![5]);
        for d in 0..255u64 {
            let a = f.interval_of(&p.child(d));
            let b = f.interval_of(&p.child(d + 1));
            assert_eq!(a.right(), b.left());
        }
    }
}
