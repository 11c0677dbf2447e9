//! Warped metrics on cone levels, the product metric on `Γ × X`, the
//! quotient identity and faithfulness radii.

mod faithful;
mod mileage;
pub(crate) mod paths;
mod product;

pub use faithful::{faithfulness_radius, injectivity_threshold, FaithfulnessReport, FaithfulnessStatus, LevelVerdict};
pub use mileage::mileage_bruteforce;
pub(crate) use mileage::mileage_layers;
pub use product::{d1_distance, quotient_metric_check, ProductGraph, QuotientReport};

use std::io::Write;
use std::sync::Arc;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::actions::ActionModel;
use crate::error::{Error, Result};

/// Default largest net for which a complete base graph is built.
pub const DEFAULT_COMPLETE_CAP: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseEdgeRule {
    /// Every pair of net points is joined by a base edge.
    Complete,
    /// Each point is joined to its `k` nearest neighbours (symmetrized).
    Knn(usize),
}

/// One level `rY` of the warped cone on a net.
#[derive(Clone, Debug)]
pub struct WarpedLevel {
    level: f64,
    action: Arc<ActionModel>,
    rule: BaseEdgeRule,
    dmat: Vec<f64>,
    snap_error_max: f64,
}

impl WarpedLevel {
    /// Build the level graph (base edges of weight `r d(x, y)`, unit
    /// shortcuts `x -- snap(s x)`) and all-pairs warped distances.
    ///
    /// `complete_cap` bounds the net size for the complete rule. A
    /// disconnected k-nearest-neighbour base graph falls back to the
    /// complete rule with a warning.
    pub fn build(
        action: Arc<ActionModel>,
        level: f64,
        rule: BaseEdgeRule,
        complete_cap: usize,
    ) -> Result<Self> {
        if !(level > 0.0) || !level.is_finite() {
            return Err(Error::param("level", format!("{level} is not positive")));
        }
        let space = action.space();
        let n = space.len();
        let mut rule = rule;
        let mut adjacency = None;
        if let BaseEdgeRule::Knn(k) = rule {
            if k == 0 {
                return Err(Error::param("knn", "k must be positive"));
            }
            let adj = knn_base_graph(&action, level, k);
            if connected(&adj) {
                adjacency = Some(adj);
            } else {
                warn!("knn({k}) base graph is disconnected; falling back to the complete rule");
                rule = BaseEdgeRule::Complete;
            }
        }
        let mut dmat = vec![0.0; n * n];
        match adjacency {
            Some(mut adj) => {
                for (a, b) in shortcut_pairs(&action) {
                    adj[a].push((b, 1.0));
                    adj[b].push((a, 1.0));
                }
                dmat.par_chunks_mut(n)
                    .enumerate()
                    .for_each(|(src, row)| paths::sparse_dijkstra(&adj, src, row));
            }
            None => {
                if n > complete_cap {
                    return Err(Error::CapExceeded {
                        what: "complete base graph",
                        needed: n,
                        cap: complete_cap,
                    });
                }
                let mut w: Vec<f64> = space.dist_matrix().iter().map(|d| level * d).collect();
                for (a, b) in shortcut_pairs(&action) {
                    w[a * n + b] = w[a * n + b].min(1.0);
                    w[b * n + a] = w[b * n + a].min(1.0);
                }
                dmat.par_chunks_mut(n)
                    .enumerate()
                    .for_each(|(src, row)| paths::dense_dijkstra(&w, n, src, row));
            }
        }
        // path sums accumulated from opposite ends can differ in the last bit
        for i in 0..n {
            for j in (i + 1)..n {
                let m = dmat[i * n + j].min(dmat[j * n + i]);
                dmat[i * n + j] = m;
                dmat[j * n + i] = m;
            }
        }
        let snap_error_max = action.snap_error_max();
        Ok(WarpedLevel {
            level,
            action,
            rule,
            dmat,
            snap_error_max,
        })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn action(&self) -> &ActionModel {
        &self.action
    }

    pub fn action_arc(&self) -> Arc<ActionModel> {
        Arc::clone(&self.action)
    }

    /// Effective base edge rule (after any fallback).
    pub fn rule(&self) -> BaseEdgeRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.action.space().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dmat[i * self.len() + j]
    }

    pub fn dmat(&self) -> &[f64] {
        &self.dmat
    }

    /// Largest snapping error over shortcut edges, in base-metric units.
    pub fn snap_error_max(&self) -> f64 {
        self.snap_error_max
    }

    /// Check the level invariants: `dmat <= r d`, shortcuts of length at
    /// most 1, and the metric axioms. Returns the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.len();
        let space = self.action.space();
        let slack = 1e-12 * (1.0 + self.level * space.diameter());
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(Error::MetricViolation(format!("dmat({i},{i}) = {}", self.dist(i, i))));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if d != self.dist(j, i) {
                    return Err(Error::MetricViolation(format!("dmat({i},{j}) is not symmetric")));
                }
                if self.rule == BaseEdgeRule::Complete && d > self.level * space.dist(i, j) + slack {
                    return Err(Error::MetricViolation(format!(
                        "dmat({i},{j}) = {d} exceeds r d = {}",
                        self.level * space.dist(i, j)
                    )));
                }
            }
        }
        for s in 0..self.action.generator_count() {
            for x in 0..n {
                let y = self.action.image(s, x);
                if self.dist(x, y) > 1.0 {
                    return Err(Error::MetricViolation(format!(
                        "dmat({x}, snap(s{s} x)) = {} > 1",
                        self.dist(x, y)
                    )));
                }
            }
        }
        for i in 0..n {
            for k in 0..n {
                let dik = self.dist(i, k);
                for j in (i + 1)..n {
                    if self.dist(i, j) > dik + self.dist(k, j) + slack {
                        return Err(Error::MetricViolation(format!(
                            "dmat({i},{j}) > dmat({i},{k}) + dmat({k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Write `i,j,distance` rows for `i < j`, prefixed by `prefix` columns.
    pub fn write_csv<W: Write>(&self, out: &mut W, prefix: &str) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                writeln!(out, "{prefix}{i},{j},{}", self.dist(i, j))?;
            }
        }
        Ok(())
    }
}

/// Undirected shortcut pairs `{x, snap(s x)}` without loops, deduplicated
/// and sorted.
pub(crate) fn shortcut_pairs(action: &ActionModel) -> Vec<(usize, usize)> {
    let n = action.space().len();
    let mut pairs = Vec::new();
    for s in 0..action.generator_count() {
        for x in 0..n {
            let y = action.image(s, x);
            if x != y {
                pairs.push((x.min(y), x.max(y)));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn knn_base_graph(action: &ActionModel, level: f64, k: usize) -> Vec<Vec<(usize, f64)>> {
    let space = action.space();
    let n = space.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| space.dist(i, a).total_cmp(&space.dist(i, b)).then(a.cmp(&b)));
        for &j in order.iter().take(k) {
            let w = level * space.dist(i, j);
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
    }
    for row in &mut adj {
        row.sort_by_key(|e| e.0);
        row.dedup_by_key(|e| e.0);
    }
    adj
}

fn connected(adj: &[Vec<(usize, f64)>]) -> bool {
    if adj.is_empty() {
        return true;
    }
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == adj.len()
}
