//! Brute-force enumeration of `(m, h)`-regular subtrees.
//!
//! Oracle side of the hit predicate: a subtree is a choice of an `m`-subset
//! of successors at every internal vertex. Enumeration walks an odometer
//! over those subsets; the visitor sees the level-`h` vertex indices of each
//! complete subtree and can stop early.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} subtrees exceed the materialization limit {limit}")]
    SizeLimit { count: BigUint, limit: u64 },
}

/// A complete `(m, h)`-regular subtree as a digit-choice map
/// (internal vertex path -> chosen successor digits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularChoice {
    pub n: u64,
    pub m: u64,
    pub h: u32,
    pub choices: BTreeMap<Vec<u64>, Vec<u64>>,
}

impl RegularChoice {
    /// The level-`h` vertex paths of the subtree.
    pub fn leaves(&self) -> Vec<Vec<u64>> {
        let mut frontier = vec![Vec::new()];
        for _ in 0..self.h {
            let mut next = Vec::new();
            for p in &frontier {
                for &d in &self.choices[p] {
                    let mut q = p.clone();
                    q.push(d);
                    next.push(q);
                }
            }
            frontier = next;
        }
        frontier
    }
}

/// `prod_{j<h} C(n,m)^(m^j)`, the number of `(m,h)`-regular subtrees.
pub fn count_regular_subtrees(n: u64, m: u64, h: u32) -> BigUint {
    let choose = binomial(n, m);
    let mut total = BigUint::one();
    let mut width = 1u64;
    for _ in 0..h {
        for _ in 0..width {
            total *= &choose;
        }
        width *= m;
    }
    total
}

fn binomial(n: u64, m: u64) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..m {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// All `m`-subsets of `0..n`, lexicographic.
fn subsets(n: u64, m: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur: Vec<u64> = (0..m).collect();
    loop {
        out.push(cur.clone());
        // next combination
        let k = m as usize;
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] + (k as u64 - i as u64) < n {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Visits every `(m, h)`-regular subtree of the full `(n, h)`-regular tree.
/// The visitor receives the level-`h` vertex indices (base-`n` encodings of
/// the digit paths) and returns `false` to stop. Returns the number visited.
pub fn for_each_leafset(
    n: u64,
    m: u64,
    h: u32,
    visit: &mut dyn FnMut(&[u64]) -> bool,
) -> u64 {
    assert!(m >= 1 && m <= n);
    let subsets = subsets(n, m);
    let mut visited = 0u64;
    // frontier of vertex indices at the current level
    fn rec(
        n: u64,
        h: u32,
        level: u32,
        frontier: &[u64],
        subsets: &[Vec<u64>],
        visit: &mut dyn FnMut(&[u64]) -> bool,
        visited: &mut u64,
    ) -> bool {
        if level == h {
            *visited += 1;
            return visit(frontier);
        }
        // odometer over one subset choice per frontier vertex
        let k = frontier.len();
        let mut pick = vec![0usize; k];
        loop {
            let mut children = Vec::with_capacity(k * subsets[0].len());
            for (i, &idx) in frontier.iter().enumerate() {
                for &d in &subsets[pick[i]] {
                    children.push(idx * n + d);
                }
            }
            if !rec(n, h, level + 1, &children, subsets, visit, visited) {
                return false;
            }
            // advance odometer
            let mut i = 0;
            loop {
                if i == k {
                    return true;
                }
                pick[i] += 1;
                if pick[i] < subsets.len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }
    rec(n, h, 0, &[0u64], &subsets, visit, &mut visited);
    visited
}

/// Visits every subtree as a full digit-choice map (slower; for listings).
pub fn for_each_regular_subtree(
    n: u64,
    m: u64,
    h: u32,
    visit: &mut dyn FnMut(&RegularChoice) -> bool,
) -> u64 {
    assert!(m >= 1 && m <= n);
    let subsets = subsets(n, m);
    let mut visited = 0u64;
    fn rec(
        n: u64,
        m: u64,
        h: u32,
        level: u32,
        frontier: &[Vec<u64>],
        subsets: &[Vec<u64>],
        choices: &mut BTreeMap<Vec<u64>, Vec<u64>>,
        visit: &mut dyn FnMut(&RegularChoice) -> bool,
        visited: &mut u64,
    ) -> bool {
        if level == h {
            *visited += 1;
            let rc = RegularChoice {
                n,
                m,
                h,
                choices: choices.clone(),
            };
            return visit(&rc);
        }
        let k = frontier.len();
        let mut pick = vec![0usize; k];
        loop {
            let mut children = Vec::new();
            for (i, path) in frontier.iter().enumerate() {
                choices.insert(path.clone(), subsets[pick[i]].clone());
                for &d in &subsets[pick[i]] {
                    let mut q = path.clone();
                    q.push(d);
                    children.push(q);
                }
            }
            if !rec(n, m, h, level + 1, &children, subsets, choices, visit, visited) {
                return false;
            }
            let mut i = 0;
            loop {
                if i == k {
                    for path in frontier {
                        choices.remove(path);
                    }
                    return true;
                }
                pick[i] += 1;
                if pick[i] < subsets.len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }
    rec(
        n,
        m,
        h,
        0,
        &[Vec::new()],
        &subsets,
        &mut BTreeMap::new(),
        visit,
        &mut visited,
    );
    visited
}

/// Oracle form of the hit hypothesis: every `(m, h)`-regular subtree has a
/// level-`h` vertex satisfying `safe_leaf` (indices are base-`n` path
/// encodings). Exhaustive with early exit on the first counterexample.
pub fn every_subtree_meets(n: u64, m: u64, h: u32, safe_leaf: &dyn Fn(u64) -> bool) -> bool {
    let mut all_meet = true;
    for_each_leafset(n, m, h, &mut |leaves| {
        if leaves.iter().any(|&idx| safe_leaf(idx)) {
            true
        } else {
            all_meet = false;
            false
        }
    });
    all_meet
}

const MATERIALIZE_LIMIT: u64 = 200_000;

/// Materializes the whole family, refusing oversized cases.
pub fn enumerate_regular_subtrees(
    n: u64,
    m: u64,
    h: u32,
) -> Result<Vec<RegularChoice>, OracleError> {
    let count = count_regular_subtrees(n, m, h);
    if count > BigUint::from(MATERIALIZE_LIMIT) {
        return Err(OracleError::SizeLimit {
            count,
            limit: MATERIALIZE_LIMIT,
        });
    }
    let mut out = Vec::new();
    for_each_regular_subtree(n, m, h, &mut |rc| {
        out.push(rc.clone());
        true
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(count_regular_subtrees(3, 2, 1), BigUint::from(3u32));
        assert_eq!(count_regular_subtrees(3, 2, 2), BigUint::from(27u32));
        assert_eq!(count_regular_subtrees(2, 2, 2), BigUint::from(1u32));
        assert_eq!(count_regular_subtrees(4, 3, 3), BigUint::from(4u64.pow(13)));
    }

    #[test]
    fn enumeration_matches_formula() {
        for (n, m, h) in [(3, 2, 1), (3, 2, 2), (2, 2, 2), (4, 2, 2), (4, 1, 3)] {
            let subtrees = enumerate_regular_subtrees(n, m, h).unwrap();
            assert_eq!(
                BigUint::from(subtrees.len() as u64),
                count_regular_subtrees(n, m, h),
                "({n},{m},{h})"
            );
            // no duplicates
            for i in 1..subtrees.len() {
                assert_ne!(subtrees[i - 1], subtrees[i]);
            }
            // leafset enumeration agrees in count
            let mut cnt = 0u64;
            for_each_leafset(n, m, h, &mut |_| {
                cnt += 1;
                true
            });
            assert_eq!(BigUint::from(cnt), count_regular_subtrees(n, m, h));
        }
    }

    #[test]
    fn leaves_have_the_right_shape() {
        let subtrees = enumerate_regular_subtrees(3, 2, 2).unwrap();
        for rc in &subtrees {
            let leaves = rc.leaves();
            assert_eq!(leaves.len(), 4); // m^h
            for leaf in &leaves {
                assert_eq!(leaf.len(), 2);
            }
        }
    }

    #[test]
    fn size_limit() {
        assert!(matches!(
            enumerate_regular_subtrees(4, 3, 3),
            Err(OracleError::SizeLimit { .. })
        ));
    }

    #[test]
    fn early_exit() {
        let mut seen = 0;
        let visited = for_each_leafset(3, 2, 2, &mut |_| {
            seen += 1;
            seen < 5
        });
        assert_eq!(visited, 5);
    }
}
