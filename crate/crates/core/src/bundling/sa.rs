//! Simulated annealing over node moves plus merge and split moves.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::graph::{modularity, BundlePartition, Method, WeightedGraph};
use super::kl::MoveState;
use crate::error::{Error, Result};
use crate::stats::PermutationPlan;

/// Geometric cooling: `T <- cooling * T` after each temperature step of
/// `sweeps` sweeps. A sweep proposes `n` node moves and one collective
/// (merge or split) move. The initial temperature is `t0_scale` times the
/// mean absolute modularity change of random node moves from the start
/// state; annealing stops once `T < t_min_ratio * T0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaSchedule {
    pub cooling: f64,
    pub sweeps: usize,
    pub t0_scale: f64,
    pub t_min_ratio: f64,
}

impl Default for SaSchedule {
    fn default() -> Self {
        Self {
            cooling: 0.995,
            sweeps: 1,
            t0_scale: 1.0,
            t_min_ratio: 1e-4,
        }
    }
}

fn metropolis(delta: f64, t: f64, rng: &mut ChaCha8Rng) -> bool {
    delta >= 0.0 || rng.random::<f64>() < (delta / t).exp()
}

fn nonempty(st: &MoveState) -> Vec<usize> {
    (0..st.n()).filter(|c| st.size[*c] > 0).collect()
}

fn members(st: &MoveState, c: usize) -> Vec<usize> {
    (0..st.n()).filter(|i| st.label[*i] == c).collect()
}

fn random_node_move(st: &MoveState, movable: &[usize], rng: &mut ChaCha8Rng) -> Option<(usize, usize)> {
    let i = movable[rng.random_range(0..movable.len())];
    let comms = nonempty(st);
    let fresh = if st.size[st.label[i]] > 1 {
        st.empty_community()
    } else {
        None
    };
    let options = comms.len() - 1 + usize::from(fresh.is_some());
    if options == 0 {
        return None;
    }
    let mut pick = rng.random_range(0..options);
    for c in comms {
        if c == st.label[i] {
            continue;
        }
        if pick == 0 {
            return Some((i, c));
        }
        pick -= 1;
    }
    fresh.map(|c| (i, c))
}

/// Merge of two communities: gain is `2 (w_ab / 2m - s_a s_b / (2m)^2)`.
fn try_merge(st: &mut MoveState, t: f64, rng: &mut ChaCha8Rng) {
    let comms = nonempty(st);
    if comms.len() < 2 {
        return;
    }
    let a = comms[rng.random_range(0..comms.len())];
    let mut b = comms[rng.random_range(0..comms.len() - 1)];
    if b == a {
        b = comms[comms.len() - 1];
    }
    let n = st.n();
    let two_m = st.graph.two_m();
    let w_ab: f64 = members(st, a).iter().map(|&i| st.ec[i * n + b]).sum();
    let delta = 2.0 * (w_ab / two_m - st.s[a] * st.s[b] / (two_m * two_m));
    if metropolis(delta, t, rng) {
        for i in members(st, b) {
            st.apply(i, a);
        }
    }
}

/// Split of one community: random halves improved greedily inside the
/// community, then accepted or rejected as a single move.
fn try_split(st: &mut MoveState, t: f64, rng: &mut ChaCha8Rng) {
    let comms: Vec<usize> = nonempty(st).into_iter().filter(|c| st.size[*c] > 1).collect();
    if comms.is_empty() {
        return;
    }
    let a = comms[rng.random_range(0..comms.len())];
    let Some(b) = st.empty_community() else { return };
    let group = members(st, a);
    let mut moved = Vec::new();
    for &i in &group {
        if rng.random::<bool>() {
            moved.push(i);
        }
    }
    if moved.is_empty() || moved.len() == group.len() {
        return;
    }
    let before = st.label.clone();
    let q0 = split_gain_base(st);
    for &i in &moved {
        st.apply(i, b);
    }
    for _ in 0..group.len() {
        let mut improved = false;
        for &i in &group {
            let own = st.label[i];
            let other = if own == a { b } else { a };
            if st.size[own] > 1 && st.delta(i, other) > 1e-15 {
                st.apply(i, other);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let delta = split_gain_base(st) - q0;
    if !metropolis(delta, t, rng) {
        for &i in &group {
            st.apply(i, before[i]);
        }
    }
}

fn split_gain_base(st: &MoveState) -> f64 {
    modularity(st.graph, &st.label).unwrap_or(0.0)
}

/// Anneals from the all-singletons state and returns the best partition seen.
pub fn detect_bundles_sa(graph: &WeightedGraph, schedule: &SaSchedule, seed: u64) -> Result<BundlePartition> {
    if !(schedule.cooling > 0.0 && schedule.cooling < 1.0) {
        return Err(Error::config("cooling", "must lie in (0, 1)"));
    }
    if schedule.sweeps == 0 || !(schedule.t_min_ratio > 0.0 && schedule.t_min_ratio < 1.0) || !(schedule.t0_scale > 0.0)
    {
        return Err(Error::config(
            "schedule",
            "sweeps, t0_scale and t_min_ratio must be positive",
        ));
    }
    let n = graph.len();
    if n < 2 || graph.two_m() == 0.0 {
        return BundlePartition::new(graph, &vec![0; n], Method::Sa);
    }
    let movable: Vec<usize> = (0..n).filter(|i| !graph.is_isolated(*i)).collect();
    let mut rng = PermutationPlan::new(seed, 1).rng(0);
    let init: Vec<usize> = (0..n).collect();
    let mut st = MoveState::new(graph, &init);

    let mut probe = 0.0;
    let mut probes = 0;
    for _ in 0..(4 * n).max(20) {
        if let Some((i, c)) = random_node_move(&st, &movable, &mut rng) {
            probe += st.delta(i, c).abs();
            probes += 1;
        }
    }
    let t0 = schedule.t0_scale
        * if probes > 0 && probe > 0.0 {
            probe / probes as f64
        } else {
            1.0 / n as f64
        };
    let t_min = t0 * schedule.t_min_ratio;

    let mut q = modularity(graph, &st.label)?;
    let mut best_q = q;
    let mut best = st.label.clone();
    let mut t = t0;
    while t >= t_min {
        for _ in 0..schedule.sweeps {
            for _ in 0..n {
                if let Some((i, c)) = random_node_move(&st, &movable, &mut rng) {
                    let d = st.delta(i, c);
                    if metropolis(d, t, &mut rng) {
                        st.apply(i, c);
                        q += d;
                        if q > best_q + 1e-12 {
                            best_q = modularity(graph, &st.label)?;
                            q = best_q;
                            best.copy_from_slice(&st.label);
                        }
                    }
                }
            }
            if rng.random::<bool>() {
                try_merge(&mut st, t, &mut rng);
            } else {
                try_split(&mut st, t, &mut rng);
            }
            q = modularity(graph, &st.label)?;
            if q > best_q + 1e-12 {
                best_q = q;
                best.copy_from_slice(&st.label);
            }
        }
        t *= schedule.cooling;
    }
    BundlePartition::new(graph, &best, Method::Sa)
}
