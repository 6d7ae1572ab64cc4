//! The safe subtree `S`, the finite-horizon hit predicate, and selector
//! extraction.
//!
//! `S_n` removes the height-`n` cells whose interval meets a level-`n`
//! danger. `hit(v, k)` decides whether every `(m, k)`-regular subtree below
//! `v` meets `S` at depth `k`; equivalently, whether `S` holds an
//! `(N-m+1, k)`-regular subtree rooted at `v`. The recursion prunes when a
//! whole lookahead window is exactly clean over `I(v)`. When a window is too
//! wide to enumerate under the budget the lookahead is capped at the deepest
//! exactly-verified prefix and the cap is recorded: safety of every chosen
//! vertex stays exact, only the extendability lookahead shortens.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::pointset::{ClassifiedPoint, DangerProbe, ProbeError};

use super::vertex::{TreeFrame, Vertex};

#[derive(Debug, Error)]
pub enum SafeSetError {
    #[error("per-cell danger query failed at height {height}: {source}")]
    Cell {
        height: u32,
        source: ProbeError,
    },
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("extraction failed at {vertex}: only {found} of {needed} successors hit")]
    ExtractionFailed {
        vertex: String,
        found: usize,
        needed: usize,
    },
    #[error("node budget exhausted during tree traversal")]
    TraversalBudget,
}

/// Lookahead window verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowView {
    /// Every level of the window is exactly empty over the interval.
    Clean,
    /// Some level holds a danger over the interval; recursion required.
    Dirty,
    /// Levels up to `clean_to` (relative) verified clean; the next level is
    /// too wide to enumerate under the budget.
    Capped { clean_to: u32 },
}

/// A view of the safe subtree: exact per-vertex membership plus a window
/// probe for pruning.
pub trait SafeSet: Sync {
    fn fanout(&self) -> u64;
    fn in_safe(&self, v: &Vertex) -> Result<bool, SafeSetError>;
    fn window_view(&self, v: &Vertex, lookahead: u32) -> Result<WindowView, SafeSetError>;
    /// Optional cache warm-up: prefetch the danger windows of `v` for the
    /// given levels so sibling queries filter instead of re-probing.
    fn warm(&self, _v: &Vertex, _levels: std::ops::RangeInclusive<u32>) {}
}

/// Finite explicit mask, for toys and oracle suites. Must be ancestor closed.
pub struct MaskTree {
    fanout: u64,
    height: u32,
    levels: Vec<Vec<bool>>,
}

impl MaskTree {
    /// `levels[h][index]` marks safety of the height-`h` vertex whose digits
    /// encode `index` in base `fanout`. The constructor re-closes the mask
    /// downward (a vertex with an unsafe ancestor is unsafe).
    pub fn new(fanout: u64, height: u32, mut levels: Vec<Vec<bool>>) -> Self {
        assert_eq!(levels.len() as u32, height + 1);
        assert!(levels[0].len() == 1);
        for h in 1..=height as usize {
            assert_eq!(levels[h].len(), (fanout as usize).pow(h as u32));
            for i in 0..levels[h].len() {
                if !levels[h - 1][i / fanout as usize] {
                    levels[h][i] = false;
                }
            }
        }
        MaskTree {
            fanout,
            height,
            levels,
        }
    }

    pub fn full(fanout: u64, height: u32) -> Self {
        let levels = (0..=height)
            .map(|h| vec![true; (fanout as usize).pow(h)])
            .collect();
        MaskTree::new(fanout, height, levels)
    }

    /// Random ancestor-closed mask; `keep_permille` is the per-vertex
    /// survival rate below the root.
    pub fn random(fanout: u64, height: u32, keep_permille: u32, rng: &mut impl rand::Rng) -> Self {
        let mut levels: Vec<Vec<bool>> = vec![vec![true]];
        for h in 1..=height {
            let len = (fanout as usize).pow(h);
            let mut row = Vec::with_capacity(len);
            for i in 0..len {
                let parent_ok = levels[h as usize - 1][i / fanout as usize];
                row.push(parent_ok && rng.gen_range(0..1000) < keep_permille);
            }
            levels.push(row);
        }
        MaskTree::new(fanout, height, levels)
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn index_of(&self, v: &Vertex) -> usize {
        v.digits()
            .iter()
            .fold(0usize, |acc, &d| acc * self.fanout as usize + d as usize)
    }

    pub fn is_safe_index(&self, h: u32, idx: usize) -> bool {
        self.levels[h as usize][idx]
    }
}

impl SafeSet for MaskTree {
    fn fanout(&self) -> u64 {
        self.fanout
    }

    fn in_safe(&self, v: &Vertex) -> Result<bool, SafeSetError> {
        Ok(self.levels[v.height() as usize][self.index_of(v)])
    }

    fn window_view(&self, _v: &Vertex, _lookahead: u32) -> Result<WindowView, SafeSetError> {
        // Toy trees are tiny; never prune, always recurse explicitly.
        Ok(WindowView::Dirty)
    }
}

/// The safe subtree induced by a danger source over a tree frame.
pub struct DangerTree<'a, P: DangerProbe> {
    frame: &'a TreeFrame,
    probe: &'a P,
    budget: usize,
    cell_points: Mutex<HashMap<(u32, Vertex), Arc<Vec<ClassifiedPoint>>>>,
    safe_cache: Mutex<HashMap<Vertex, bool>>,
}

impl<'a, P: DangerProbe> DangerTree<'a, P> {
    pub fn new(frame: &'a TreeFrame, probe: &'a P, budget: usize) -> Self {
        DangerTree {
            frame,
            probe,
            budget,
            cell_points: Mutex::new(HashMap::new()),
            safe_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn frame(&self) -> &TreeFrame {
        self.frame
    }

    /// Level-`level` dangers meeting `I(v)`, answered from the cache, by
    /// filtering the nearest cached ancestor window, or by a fresh probe.
    pub fn window_points(
        &self,
        level: u32,
        v: &Vertex,
    ) -> Result<Arc<Vec<ClassifiedPoint>>, ProbeError> {
        if self.probe.provably_empty(level) {
            return Ok(Arc::new(Vec::new()));
        }
        let key = (level, v.clone());
        if let Some(hit) = self.cell_points.lock().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        // Nearest cached ancestor at the same level.
        let mut anc = v.parent();
        let from_ancestor = loop {
            let Some(a) = anc else { break None };
            if let Some(pts) = self
                .cell_points
                .lock()
                .unwrap()
                .get(&(level, a.clone()))
            {
                break Some(Arc::clone(pts));
            }
            anc = a.parent();
        };
        let iv = self.frame.interval_of(v);
        let pts = match from_ancestor {
            Some(parent_pts) => parent_pts
                .iter()
                .filter(|cp| cp.delta().meets(self.frame.constants(), &iv))
                .cloned()
                .collect(),
            None => self.probe.probe(level, &iv, self.budget)?,
        };
        let arc = Arc::new(pts);
        self.cell_points
            .lock()
            .unwrap()
            .insert(key, Arc::clone(&arc));
        Ok(arc)
    }

    /// Exact per-vertex exclusion test: level-`height` dangers avoid `I(v)`.
    fn cell_clean(&self, v: &Vertex) -> Result<bool, SafeSetError> {
        let h = v.height();
        if h == 0 {
            return Ok(true);
        }
        self.window_points(h, v)
            .map(|pts| pts.is_empty())
            .map_err(|source| SafeSetError::Cell { height: h, source })
    }

}

impl<P: DangerProbe> SafeSet for DangerTree<'_, P> {
    fn fanout(&self) -> u64 {
        self.frame.fanout()
    }

    fn in_safe(&self, v: &Vertex) -> Result<bool, SafeSetError> {
        if let Some(&hit) = self.safe_cache.lock().unwrap().get(v) {
            return Ok(hit);
        }
        let verdict = match v.parent() {
            Some(parent) => self.in_safe(&parent)? && self.cell_clean(v)?,
            None => true,
        };
        self.safe_cache.lock().unwrap().insert(v.clone(), verdict);
        Ok(verdict)
    }

    fn window_view(&self, v: &Vertex, lookahead: u32) -> Result<WindowView, SafeSetError> {
        let h = v.height();
        for j in h + 1..=h + lookahead {
            if self.probe.provably_empty(j) {
                continue;
            }
            match self.window_points(j, v) {
                Ok(pts) if pts.is_empty() => continue,
                Ok(_) => return Ok(WindowView::Dirty),
                Err(ProbeError::TooMany { .. }) => {
                    return Ok(WindowView::Capped {
                        clean_to: j - h - 1,
                    })
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(WindowView::Clean)
    }

    fn warm(&self, v: &Vertex, levels: std::ops::RangeInclusive<u32>) {
        for level in levels {
            // budget refusals are fine: children re-probe independently
            let _ = self.window_points(level, v);
        }
    }
}

/// `in_S`: exact membership of `v` in the safe subtree.
pub fn in_safe<S: SafeSet>(s: &S, v: &Vertex) -> Result<bool, SafeSetError> {
    s.in_safe(v)
}

/// Outcome of a hit evaluation: the verdict plus the depth to which it was
/// verified (`lookahead == k` means fully exact).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HitOutcome {
    pub ok: bool,
    pub lookahead: u32,
}

/// `hit(v, k)`: `v` is safe and at least `N - m + 1` successors hit at
/// lookahead `k - 1`; equivalently every `(m, k)`-regular subtree below `v`
/// meets `S` at depth `k`.
pub fn hit<S: SafeSet>(s: &S, v: &Vertex, k: u32, m: u64) -> Result<HitOutcome, SafeSetError> {
    let fanout = s.fanout();
    assert!(m >= 1 && m <= fanout, "m must lie in [1, fanout]");
    if !s.in_safe(v)? {
        return Ok(HitOutcome {
            ok: false,
            lookahead: k,
        });
    }
    if k == 0 {
        return Ok(HitOutcome {
            ok: true,
            lookahead: 0,
        });
    }
    match s.window_view(v, k)? {
        WindowView::Clean => Ok(HitOutcome {
            ok: true,
            lookahead: k,
        }),
        WindowView::Capped { clean_to } => Ok(HitOutcome {
            ok: true,
            lookahead: clean_to,
        }),
        WindowView::Dirty => {
            let needed = (fanout - m + 1) as usize;
            let mut found = 0usize;
            let mut min_child_lookahead = k - 1;
            for d in 0..fanout {
                let remaining = (fanout - d) as usize;
                if found + remaining < needed {
                    break;
                }
                let child = hit(s, &v.child(d), k - 1, m)?;
                if child.ok {
                    found += 1;
                    min_child_lookahead = min_child_lookahead.min(child.lookahead);
                    if found == needed {
                        return Ok(HitOutcome {
                            ok: true,
                            lookahead: 1 + min_child_lookahead,
                        });
                    }
                }
            }
            Ok(HitOutcome {
                ok: false,
                lookahead: k,
            })
        }
    }
}

/// Chosen successors of a selected vertex, with the lookahead they carried.
#[derive(Debug, Clone)]
pub struct ChosenInfo {
    pub digits: Vec<u64>,
    pub lookahead: u32,
}

/// Lazily materialized `(N - m + 1, D)`-regular selector inside `S`:
/// leftmost hitting successors, horizon-capped adaptively.
#[derive(Debug)]
pub struct SubtreeSelector {
    m: u64,
    horizon: u32,
    chosen: Mutex<HashMap<Vertex, Arc<ChosenInfo>>>,
}

impl SubtreeSelector {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// The chosen successor digits of a selected vertex (leftmost
    /// `N - m + 1` with a positive hit verdict).
    pub fn chosen<S: SafeSet>(&self, s: &S, v: &Vertex) -> Result<Arc<ChosenInfo>, SafeSetError> {
        if let Some(hit) = self.chosen.lock().unwrap().get(v) {
            return Ok(Arc::clone(hit));
        }
        let n = v.height();
        assert!(n < self.horizon, "no choices beyond the horizon");
        let lookahead = self.horizon - n - 1;
        let fanout = s.fanout();
        let needed = (fanout - self.m + 1) as usize;
        // One pass over the sibling window, then per-child queries filter
        // from the parent cache instead of re-scanning buckets.
        s.warm(v, n + 1..=self.horizon);
        let mut digits = Vec::with_capacity(needed);
        let mut min_lookahead = lookahead;
        for d in 0..fanout {
            let outcome = hit(s, &v.child(d), lookahead, self.m)?;
            if outcome.ok {
                digits.push(d);
                min_lookahead = min_lookahead.min(outcome.lookahead);
                if digits.len() == needed {
                    break;
                }
            }
        }
        if digits.len() < needed {
            return Err(SafeSetError::ExtractionFailed {
                vertex: v.path_string(),
                found: digits.len(),
                needed,
            });
        }
        let info = Arc::new(ChosenInfo {
            digits,
            lookahead: min_lookahead,
        });
        self.chosen
            .lock()
            .unwrap()
            .insert(v.clone(), Arc::clone(&info));
        Ok(info)
    }

    /// The `m - 1` successor digits not chosen: the dangerous intervals.
    pub fn dangerous_digits<S: SafeSet>(
        &self,
        s: &S,
        v: &Vertex,
    ) -> Result<Vec<u64>, SafeSetError> {
        let chosen = self.chosen(s, v)?;
        Ok((0..s.fanout())
            .filter(|d| !chosen.digits.contains(d))
            .collect())
    }

    /// Serializes the materialized choices as `path: digits` lines.
    pub fn to_records(&self) -> String {
        let map = self.chosen.lock().unwrap();
        let mut entries: Vec<_> = map.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for (v, info) in entries {
            out.push_str(&format!(
                "{}: {} (lookahead {})\n",
                v.path_string(),
                info.digits
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                info.lookahead
            ));
        }
        out
    }
}

/// Verifies `hit(root, D)` and returns the lazy selector.
pub fn extract_selector<S: SafeSet>(
    s: &S,
    depth: u32,
    m: u64,
) -> Result<SubtreeSelector, SafeSetError> {
    let root = Vertex::root();
    let outcome = hit(s, &root, depth, m)?;
    if !outcome.ok {
        return Err(SafeSetError::ExtractionFailed {
            vertex: root.path_string(),
            found: 0,
            needed: (s.fanout() - m + 1) as usize,
        });
    }
    Ok(SubtreeSelector {
        m,
        horizon: depth,
        chosen: Mutex::new(HashMap::new()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_hit_examples() {
        // N = 3, m = 2, h = 1: two safe successors -> hit; one -> miss.
        let two = MaskTree::new(3, 1, vec![vec![true], vec![true, true, false]]);
        assert!(hit(&two, &Vertex::root(), 1, 2).unwrap().ok);
        let one = MaskTree::new(3, 1, vec![vec![true], vec![false, true, false]]);
        assert!(!hit(&one, &Vertex::root(), 1, 2).unwrap().ok);
    }

    #[test]
    fn mask_ancestor_closure() {
        // child of an unsafe vertex is unsafe even if marked safe
        let m = MaskTree::new(
            2,
            2,
            vec![
                vec![true],
                vec![false, true],
                vec![true, true, true, true],
            ],
        );
        assert!(!m.in_safe(&Vertex::from_digits(vec![0, 0])).unwrap());
        assert!(m.in_safe(&Vertex::from_digits(vec![1, 1])).unwrap());
    }

    #[test]
    fn koenig_special_case() {
        // m = N: hit(v, k) iff some full-height safe path descends from v.
        let mut levels = vec![vec![true], vec![true, false, false]];
        levels.push({
            let mut row = vec![false; 9];
            row[2] = true; // path 0 -> 2
            row
        });
        let m = MaskTree::new(3, 2, levels);
        assert!(hit(&m, &Vertex::root(), 2, 3).unwrap().ok);
        // remove the deep leaf: no full path survives
        let mut levels2 = vec![vec![true], vec![true, false, false]];
        levels2.push(vec![false; 9]);
        let m2 = MaskTree::new(3, 2, levels2);
        assert!(!hit(&m2, &Vertex::root(), 2, 3).unwrap().ok);
    }

    #[test]
    fn selector_on_full_tree_is_leftmost() {
        let full = MaskTree::full(3, 2);
        let sel = extract_selector(&full, 2, 2).unwrap();
        let info = sel.chosen(&full, &Vertex::root()).unwrap();
        assert_eq!(info.digits, vec![0, 1]);
        assert_eq!(
            sel.dangerous_digits(&full, &Vertex::root()).unwrap(),
            vec![2]
        );
    }

    #[test]
    fn extraction_failure_reports_witness() {
        let one = MaskTree::new(3, 1, vec![vec![true], vec![false, true, false]]);
        match extract_selector(&one, 1, 2) {
            Err(SafeSetError::ExtractionFailed { vertex, found, needed }) => {
                assert_eq!(vertex, "root");
                assert_eq!(found, 0);
                assert_eq!(needed, 2);
            }
            other => panic!("expected extraction failure, got {other:?}"),
        }
    }
}
