//! Black-box audits of the structural lemmas on enumerated data.
//!
//! Per class `(n, k)` and safe vertex `tau'` at height `n - k`, the points of
//! that class whose danger interval meets `I(tau')` must all carry one line,
//! and the level-`n` cells below `tau'` meeting the union of their danger
//! intervals number at most two. Both are audited point-driven: each point
//! locates its own `tau'` cells, groups accumulate, then every group is
//! checked. Violations are report entries, never panics; certified
//! configurations are expected to show none.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::pointset::{ClassifiedPoint, PointWindow};
use crate::treeplan::{growth_audit, GrowthAudit, SafeSet, SafeSetError, TreeFrame, Vertex};

#[derive(Debug, Clone, Serialize)]
pub struct LineViolation {
    pub level: u32,
    pub class_k: u32,
    pub tau: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellViolation {
    pub level: u32,
    pub class_k: u32,
    pub tau: String,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaAuditReport {
    pub depth: u32,
    pub points_seen: usize,
    pub groups: usize,
    pub multi_point_groups: usize,
    /// Lemma "one line per class and cell": groups with differing lines.
    pub line_violations: Vec<LineViolation>,
    /// Lemma "at most two cells": the largest observed cell count.
    pub max_cell_count: usize,
    pub cell_violations: Vec<CellViolation>,
}

impl LemmaAuditReport {
    pub fn clean(&self) -> bool {
        self.line_violations.is_empty() && self.cell_violations.is_empty()
    }
}

/// Runs both lemma audits over an enumerated window.
pub fn audit_lemmas<S: SafeSet>(
    frame: &TreeFrame,
    safe: &S,
    window: &PointWindow,
    depth: u32,
) -> Result<LemmaAuditReport, SafeSetError> {
    let mut groups: BTreeMap<(u32, u32, Vertex), Vec<&ClassifiedPoint>> = BTreeMap::new();
    let mut points_seen = 0usize;
    for cp in window.points() {
        if cp.level > depth {
            continue;
        }
        points_seen += 1;
        let tau_height = cp.level - cp.class_k;
        for tau in frame.cells_meeting_delta(&cp.delta(), tau_height) {
            if safe.in_safe(&tau)? {
                groups.entry((cp.level, cp.class_k, tau)).or_default().push(cp);
            }
        }
    }

    let mut report = LemmaAuditReport {
        depth,
        points_seen,
        groups: groups.len(),
        multi_point_groups: 0,
        line_violations: Vec::new(),
        max_cell_count: 0,
        cell_violations: Vec::new(),
    };

    for ((level, class_k, tau), members) in &groups {
        if members.len() > 1 {
            report.multi_point_groups += 1;
        }
        // constancy of the chosen line over the class
        let mut lines: Vec<String> = members.iter().map(|cp| cp.line.to_string()).collect();
        lines.sort();
        lines.dedup();
        if lines.len() > 1 {
            report.line_violations.push(LineViolation {
                level: *level,
                class_k: *class_k,
                tau: tau.path_string(),
                lines,
            });
        }
        // level-n cells below tau' meeting the union of danger intervals
        let mut cells: BTreeSet<Vertex> = BTreeSet::new();
        for cp in members {
            for cell in frame.cells_meeting_delta(&cp.delta(), *level) {
                if cell.is_descendant_of(tau) {
                    cells.insert(cell);
                }
            }
        }
        report.max_cell_count = report.max_cell_count.max(cells.len());
        if cells.len() > 2 {
            report.cell_violations.push(CellViolation {
                level: *level,
                class_k: *class_k,
                tau: tau.path_string(),
                count: cells.len(),
            });
        }
    }
    Ok(report)
}

/// Growth audit with the certified-mode pass verdict attached.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub audit: GrowthAudit,
    pub certified_expectations_met: bool,
}

pub fn audit_growth<S: SafeSet>(safe: &S, depth: u32) -> Result<GrowthReport, SafeSetError> {
    let audit = growth_audit(safe, depth)?;
    let certified_expectations_met = audit.all_ok();
    Ok(GrowthReport {
        audit,
        certified_expectations_met,
    })
}
