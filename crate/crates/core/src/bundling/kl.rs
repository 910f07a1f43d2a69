//! Kernighan-Lin style refinement with single-node moves.

use super::graph::{BundlePartition, Method, WeightedGraph};
use crate::error::Result;

const IMPROVE_TOL: f64 = 1e-12;

/// Node-to-community bookkeeping shared by the local-move heuristics.
pub(crate) struct MoveState<'g> {
    pub graph: &'g WeightedGraph,
    pub label: Vec<usize>,
    /// `ec[i * n + c]`: weight from node `i` to members of community `c`.
    pub ec: Vec<f64>,
    pub s: Vec<f64>,
    pub size: Vec<usize>,
}

impl<'g> MoveState<'g> {
    pub fn new(graph: &'g WeightedGraph, assignment: &[usize]) -> Self {
        let n = graph.len();
        let label = super::graph::normalize_labels(assignment);
        let mut ec = vec![0.0; n * n];
        let mut s = vec![0.0; n];
        let mut size = vec![0; n];
        for i in 0..n {
            s[label[i]] += graph.strength(i);
            size[label[i]] += 1;
            let row = graph.row(i);
            for j in 0..n {
                ec[i * n + label[j]] += row[j];
            }
        }
        Self {
            graph,
            label,
            ec,
            s,
            size,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.len()
    }

    /// Change in modularity from moving `i` into community `to`.
    pub fn delta(&self, i: usize, to: usize) -> f64 {
        let from = self.label[i];
        if from == to {
            return 0.0;
        }
        let n = self.n();
        let two_m = self.graph.two_m();
        let k = self.graph.strength(i);
        let e_to = self.ec[i * n + to];
        let e_from = self.ec[i * n + from];
        2.0 * (e_to - e_from) / two_m - 2.0 * k * (self.s[to] - self.s[from] + k) / (two_m * two_m)
    }

    pub fn apply(&mut self, i: usize, to: usize) {
        let from = self.label[i];
        if from == to {
            return;
        }
        let n = self.n();
        let k = self.graph.strength(i);
        self.s[from] -= k;
        self.s[to] += k;
        self.size[from] -= 1;
        self.size[to] += 1;
        self.label[i] = to;
        let row = self.graph.row(i);
        for j in 0..n {
            let w = row[j];
            if w != 0.0 {
                self.ec[j * n + from] -= w;
                self.ec[j * n + to] += w;
            }
        }
    }

    pub fn empty_community(&self) -> Option<usize> {
        self.size.iter().position(|s| *s == 0)
    }
}

/// Repeated passes in which every node moves once, each time to the target
/// (any community or a fresh one) with the largest modularity change; each
/// pass is rolled back to its best prefix. Stops when a pass gains nothing.
pub fn refine_kl(graph: &WeightedGraph, partition: &BundlePartition) -> Result<BundlePartition> {
    let n = graph.len();
    let method = match partition.method {
        Method::Eo => Method::EoKl,
        m => m,
    };
    if n < 2 || graph.two_m() == 0.0 {
        return BundlePartition::new(graph, &partition.assignment, method);
    }
    let mut st = MoveState::new(graph, &partition.assignment);
    let movable: Vec<usize> = (0..n).filter(|i| !graph.is_isolated(*i)).collect();
    loop {
        let mut locked = vec![false; n];
        let mut history: Vec<(usize, usize)> = Vec::new();
        let mut cum = 0.0;
        let mut best = 0.0;
        let mut best_len = 0;
        for _ in 0..movable.len() {
            let mut pick: Option<(f64, usize, usize)> = None;
            let fresh = st.empty_community();
            for &i in &movable {
                if locked[i] {
                    continue;
                }
                let own = st.label[i];
                for c in 0..n {
                    let target_ok = c != own && (st.size[c] > 0 || (Some(c) == fresh && st.size[own] > 1));
                    if !target_ok {
                        continue;
                    }
                    let d = st.delta(i, c);
                    if pick.is_none_or(|p| d > p.0) {
                        pick = Some((d, i, c));
                    }
                }
            }
            let Some((d, i, c)) = pick else { break };
            history.push((i, st.label[i]));
            st.apply(i, c);
            locked[i] = true;
            cum += d;
            if cum > best + IMPROVE_TOL {
                best = cum;
                best_len = history.len();
            }
        }
        while history.len() > best_len {
            let (i, from) = history.pop().expect("nonempty history");
            st.apply(i, from);
        }
        if best_len == 0 {
            break;
        }
    }
    let refined = BundlePartition::new(graph, &st.label, method)?;
    if refined.q + IMPROVE_TOL < partition.q {
        return Ok(BundlePartition {
            method,
            ..partition.clone()
        });
    }
    Ok(refined)
}
