//! Closed rational intervals.

use std::fmt;

use num_traits::Zero;

use crate::exactnum::{format_rational, Rational};

/// Closed interval `[left, right]` with rational endpoints, `left <= right`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntervalQ {
    left: Rational,
    right: Rational,
}

impl IntervalQ {
    pub fn new(left: Rational, right: Rational) -> Self {
        assert!(left <= right, "inverted interval");
        IntervalQ { left, right }
    }

    pub fn point(x: Rational) -> Self {
        IntervalQ {
            left: x.clone(),
            right: x,
        }
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &Rational {
        &self.right
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn midpoint(&self) -> Rational {
        (&self.left + &self.right) / Rational::from_integer(2.into())
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        &self.left <= x && x <= &self.right
    }

    /// Closed containment `other ⊆ self`.
    pub fn contains(&self, other: &IntervalQ) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    /// Nonempty closed intersection.
    pub fn meets(&self, other: &IntervalQ) -> bool {
        self.left <= other.right && other.left <= self.right
    }

    /// Distance from `x` to the interval (zero if inside).
    pub fn distance_to(&self, x: &Rational) -> Rational {
        if x < &self.left {
            &self.left - x
        } else if x > &self.right {
            x - &self.right
        } else {
            Rational::zero()
        }
    }

    /// Left and right closed halves (sharing the midpoint).
    pub fn halves(&self) -> (IntervalQ, IntervalQ) {
        let mid = self.midpoint();
        (
            IntervalQ::new(self.left.clone(), mid.clone()),
            IntervalQ::new(mid, self.right.clone()),
        )
    }

    /// The subinterval of length `len` starting `offset` above the left end.
    pub fn sub_at(&self, offset: &Rational, len: &Rational) -> IntervalQ {
        let lo = &self.left + offset;
        IntervalQ::new(lo.clone(), lo + len.clone())
    }
}

impl fmt::Display for IntervalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_rational(&self.left),
            format_rational(&self.right)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn iv(a: &str, b: &str) -> IntervalQ {
        IntervalQ::new(r(a), r(b))
    }

    #[test]
    fn basic_geometry() {
        let i = iv("0", "1");
        assert_eq!(i.length(), r("1"));
        assert_eq!(i.midpoint(), r("1/2"));
        let (l, rgt) = i.halves();
        assert_eq!(l, iv("0", "1/2"));
        assert_eq!(rgt, iv("1/2", "1"));
        assert!(l.meets(&rgt)); // share the midpoint
        assert!(i.contains(&l));
        assert!(!l.contains(&rgt));
        assert_eq!(i.distance_to(&r("3/2")), r("1/2"));
        assert_eq!(i.distance_to(&r("1/2")), r("0"));
    }
}
