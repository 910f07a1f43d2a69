//! Extremal optimisation by recursive bisection.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::graph::{BundlePartition, Method, WeightedGraph};
use crate::error::Result;
use crate::par::{map_indexed, Execution};
use crate::stats::PermutationPlan;

const IMPROVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct EoOptions {
    pub restarts: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl EoOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            restarts: 20,
            seed,
            exec: Execution::default(),
        }
    }
}

/// Best of `restarts` independent runs; restart `r` draws from stream `r`
/// of `seed`, ties go to the lowest restart index.
pub fn detect_bundles_eo(graph: &WeightedGraph, opts: &EoOptions) -> Result<BundlePartition> {
    let n = graph.len();
    if n < 2 || graph.two_m() == 0.0 {
        return BundlePartition::new(graph, &vec![0; n], Method::Eo);
    }
    let plan = PermutationPlan::new(opts.seed, opts.restarts.max(1));
    let runs = map_indexed(opts.exec, opts.restarts.max(1), |r| {
        let mut rng = plan.rng(r);
        BundlePartition::new(graph, &eo_run(graph, &mut rng), Method::Eo)
    });
    let mut best: Option<BundlePartition> = None;
    for p in runs {
        let p = p?;
        if best.as_ref().is_none_or(|b| p.q > b.q) {
            best = Some(p);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn eo_run(graph: &WeightedGraph, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut assignment = graph.components();
    let mut next = assignment.iter().max().map_or(0, |m| m + 1);
    let mut queue: Vec<usize> = (0..next).collect();
    while let Some(c) = queue.pop() {
        let members: Vec<usize> = (0..graph.len()).filter(|i| assignment[*i] == c).collect();
        if members.len() < 2 {
            continue;
        }
        if let Some(side_b) = bisect(graph, &members, rng) {
            for (k, &i) in members.iter().enumerate() {
                if side_b[k] {
                    assignment[i] = next;
                }
            }
            queue.push(c);
            queue.push(next);
            next += 1;
        }
    }
    assignment
}

/// Searches for a split of `members` that raises global modularity.
/// Returns the side flags of the best split, or `None` when no split helps.
fn bisect(graph: &WeightedGraph, members: &[usize], rng: &mut ChaCha8Rng) -> Option<Vec<bool>> {
    let n = members.len();
    let two_m = graph.two_m();
    let k: Vec<f64> = members.iter().map(|&i| graph.strength(i)).collect();

    let mut side = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    crate::stats::fisher_yates(&mut order, rng);
    for &o in &order[..n / 2] {
        side[o] = true;
    }

    // kin[x][i]: weight from member i to members currently on side x
    let mut kin = [vec![0.0; n], vec![0.0; n]];
    for a in 0..n {
        let row = graph.row(members[a]);
        for b in 0..n {
            if a != b {
                kin[side[b] as usize][a] += row[members[b]];
            }
        }
    }
    let mut s = [0.0, 0.0];
    let mut size = [0usize, 0];
    for a in 0..n {
        s[side[a] as usize] += k[a];
        size[side[a] as usize] += 1;
    }
    let mut cross: f64 = (0..n).filter(|a| !side[*a]).map(|a| kin[1][a]).sum();

    let gain = |cross: f64, s: &[f64; 2]| 2.0 * (s[0] * s[1] / two_m - cross) / two_m;

    let tau = 1.0 + 1.0 / (n as f64).ln();
    let cdf: Vec<f64> = {
        let mut acc = 0.0;
        let mut v: Vec<f64> = (1..=n)
            .map(|r| {
                acc += (r as f64).powf(-tau);
                acc
            })
            .collect();
        let total = acc;
        v.iter_mut().for_each(|x| *x /= total);
        v
    };

    let mut best_gain = if size[0] > 0 && size[1] > 0 {
        gain(cross, &s)
    } else {
        f64::NEG_INFINITY
    };
    let mut best_side = side.clone();
    let steps = (20 * n).max(100);
    let mut fitness: Vec<(f64, usize)> = Vec::with_capacity(n);
    for _ in 0..steps {
        fitness.clear();
        for a in 0..n {
            let x = side[a] as usize;
            let lambda = if k[a] > 0.0 {
                kin[x][a] / k[a] - s[x] / two_m
            } else {
                0.0
            };
            fitness.push((lambda, a));
        }
        fitness.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        let u: f64 = rng.random();
        let rank = cdf.partition_point(|c| *c < u).min(n - 1);
        let a = fitness[rank].1;
        let from = side[a] as usize;
        if size[from] == 1 {
            continue;
        }
        let to = 1 - from;
        cross += kin[from][a] - kin[to][a];
        s[from] -= k[a];
        s[to] += k[a];
        size[from] -= 1;
        size[to] += 1;
        side[a] = !side[a];
        let row = graph.row(members[a]);
        for b in 0..n {
            if b != a {
                let w = row[members[b]];
                kin[from][b] -= w;
                kin[to][b] += w;
            }
        }
        if size[0] > 0 && size[1] > 0 {
            let g = gain(cross, &s);
            if g > best_gain {
                best_gain = g;
                best_side.copy_from_slice(&side);
            }
        }
    }
    (best_gain > IMPROVE_TOL).then_some(best_side)
}

#[cfg(test)]
mod tests {
    use super::super::graph::tests::{exhaustive, two_cliques};
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn splits_two_cliques() {
        let g = two_cliques(5);
        let p = detect_bundles_eo(&g, &EoOptions::new(1)).unwrap();
        assert_eq!(p.n_bundles(), 2);
        assert!((p.q - 0.5).abs() < 1e-12);
        assert_eq!(p.assignment, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn tiny_inputs_give_single_bundle() {
        let g = WeightedGraph::from_dense(1, vec![0.0]).unwrap();
        let p = detect_bundles_eo(&g, &EoOptions::new(0)).unwrap();
        assert_eq!(p.assignment, vec![0]);
    }

    #[test]
    fn more_restarts_never_worse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = 12;
            let w: Vec<(usize, usize, f64)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| {
                    (
                        i,
                        j,
                        if rng.random::<f64>() < 0.4 {
                            rng.random::<f64>()
                        } else {
                            0.0
                        },
                    )
                })
                .collect();
            let g = WeightedGraph::from_edges(n, &w).unwrap();
            let a = detect_bundles_eo(
                &g,
                &EoOptions {
                    restarts: 3,
                    ..EoOptions::new(5)
                },
            )
            .unwrap();
            let b = detect_bundles_eo(
                &g,
                &EoOptions {
                    restarts: 9,
                    ..EoOptions::new(5)
                },
            )
            .unwrap();
            assert!(b.q >= a.q);
        }
    }

    #[test]
    fn close_to_enumeration_on_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut hits = 0;
        for _ in 0..20 {
            let n = 8;
            let w: Vec<(usize, usize, f64)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, rng.random::<f64>().powi(3)))
                .collect();
            let g = WeightedGraph::from_edges(n, &w).unwrap();
            let p = detect_bundles_eo(&g, &EoOptions::new(3)).unwrap();
            let (best, _) = exhaustive(&g);
            assert!(p.q <= best + 1e-12);
            if p.q >= best - 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 15, "{hits}/20");
    }
}
