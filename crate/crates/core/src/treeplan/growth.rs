//! Growth audit of the safe subtree against an adversarial 6-regular
//! selector.
//!
//! `a_n` counts the level-`n` vertices of `R` (a 6-regular subtree chosen to
//! prefer unsafe successors) that lie in `S`. The audited inequalities are
//! `a_n >= 6 a_{n-1} - sum_{k=1..n} 2 a_{n-k}` and the doubling law
//! `a_n > 2 a_{n-1}`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::safeset::{SafeSet, SafeSetError, WindowView};
use super::vertex::Vertex;

const NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone)]
pub struct GrowthAudit {
    /// `a_0 .. a_depth`, exact.
    pub counts: Vec<BigUint>,
    /// Levels `n` with `a_n <= 2 a_{n-1}`.
    pub doubling_failures: Vec<u32>,
    /// Levels `n` violating the subtraction recurrence.
    pub recurrence_failures: Vec<u32>,
}

impl GrowthAudit {
    pub fn all_ok(&self) -> bool {
        self.doubling_failures.is_empty() && self.recurrence_failures.is_empty()
    }
}

fn six_powers(depth: u32) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(depth as usize + 1);
    let mut x = BigUint::one();
    for _ in 0..=depth {
        out.push(x.clone());
        x *= 6u32;
    }
    out
}

fn count_rec<S: SafeSet>(
    s: &S,
    v: &Vertex,
    depth: u32,
    nodes: &mut u64,
) -> Result<Vec<BigUint>, SafeSetError> {
    *nodes += 1;
    if *nodes > NODE_BUDGET {
        return Err(SafeSetError::TraversalBudget);
    }
    // An unsafe vertex has no safe descendants (S is ancestor closed).
    if !s.in_safe(v)? {
        return Ok(vec![BigUint::zero(); depth as usize + 1]);
    }
    let mut out = vec![BigUint::zero(); depth as usize + 1];
    out[0] = BigUint::one();
    if depth == 0 {
        return Ok(out);
    }
    if s.window_view(v, depth)? == WindowView::Clean {
        // Whole window exactly clean: every choice of R below v is fully
        // safe, so the counts close to powers of six.
        return Ok(six_powers(depth));
    }
    // Adversarial choice: prefer unsafe successors, leftmost within each
    // group, then take six.
    let fanout = s.fanout();
    let mut unsafe_children = Vec::new();
    let mut safe_children = Vec::new();
    for d in 0..fanout {
        let child = v.child(d);
        if s.in_safe(&child)? {
            safe_children.push(child);
        } else {
            unsafe_children.push(child);
        }
    }
    let chosen = unsafe_children
        .into_iter()
        .chain(safe_children)
        .take(6)
        .collect::<Vec<_>>();
    for child in &chosen {
        let sub = count_rec(s, child, depth - 1, nodes)?;
        for (j, c) in sub.into_iter().enumerate() {
            out[j + 1] += c;
        }
    }
    Ok(out)
}

/// Runs the adversarial growth audit to the given depth (exact counts).
pub fn growth_audit<S: SafeSet>(s: &S, depth: u32) -> Result<GrowthAudit, SafeSetError> {
    assert!(s.fanout() >= 6, "the selector needs at least six successors");
    let mut nodes = 0u64;
    let counts = count_rec(s, &Vertex::root(), depth, &mut nodes)?;
    let mut doubling_failures = Vec::new();
    let mut recurrence_failures = Vec::new();
    let two = BigUint::from(2u32);
    let six = BigUint::from(6u32);
    for n in 1..=depth as usize {
        if counts[n].clone() <= &counts[n - 1] * &two {
            doubling_failures.push(n as u32);
        }
        // a_n >= 6 a_{n-1} - sum_{k=1..n} 2 a_{n-k}, kept in added form to
        // stay in unsigned arithmetic.
        let mut subtracted = BigUint::zero();
        for k in 1..=n {
            subtracted += &counts[n - k] * &two;
        }
        if &counts[n] + &subtracted < &counts[n - 1] * &six {
            recurrence_failures.push(n as u32);
        }
    }
    Ok(GrowthAudit {
        counts,
        doubling_failures,
        recurrence_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treeplan::MaskTree;

    #[test]
    fn full_tree_counts_are_powers_of_six() {
        let full = MaskTree::full(8, 3);
        let audit = growth_audit(&full, 3).unwrap();
        assert_eq!(
            audit.counts,
            vec![
                BigUint::from(1u32),
                BigUint::from(6u32),
                BigUint::from(36u32),
                BigUint::from(216u32)
            ]
        );
        assert!(audit.all_ok());
    }

    #[test]
    fn adversary_prefers_unsafe() {
        // 8 children, the two rightmost unsafe: the adversary picks both
        // unsafe ones plus four safe -> a_1 = 4.
        let mut level1 = vec![true; 8];
        level1[6] = false;
        level1[7] = false;
        let m = MaskTree::new(8, 1, vec![vec![true], level1]);
        let audit = growth_audit(&m, 1).unwrap();
        assert_eq!(audit.counts[1], BigUint::from(4u32));
        assert!(audit.doubling_failures.is_empty()); // 4 > 2
    }

    #[test]
    fn heavy_damage_is_reported_not_hidden() {
        // 6 of 8 children unsafe: the adversary picks exactly those six, so
        // a_1 = 0 and both laws fail.
        let mut level1 = vec![false; 8];
        level1[0] = true;
        level1[1] = true;
        let m = MaskTree::new(8, 1, vec![vec![true], level1]);
        let audit = growth_audit(&m, 1).unwrap();
        assert_eq!(audit.counts[1], BigUint::from(0u32));
        assert_eq!(audit.doubling_failures, vec![1]);
        assert_eq!(audit.recurrence_failures, vec![1]); // 0 < 6*1 - 2*1
        // 3 unsafe children: adversary keeps them all, fills with 3 safe.
        let mut level1b = vec![true; 8];
        level1b[3] = false;
        level1b[5] = false;
        level1b[7] = false;
        let m2 = MaskTree::new(8, 1, vec![vec![true], level1b]);
        let audit2 = growth_audit(&m2, 1).unwrap();
        assert_eq!(audit2.counts[1], BigUint::from(3u32));
        assert_eq!(audit2.recurrence_failures, vec![1]); // 3 < 6 - 2
    }
}
