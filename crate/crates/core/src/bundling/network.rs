use super::graph::WeightedGraph;
use crate::corpus::DailyFrequencyMatrix;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::stats::{word_seed, PermutationPlan};

const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct NetworkOptions {
    pub n_shuffles: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl NetworkOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            n_shuffles: 1000,
            seed,
            exec: Execution::default(),
        }
    }
}

/// Pairwise first-difference correlations, their permutation z-scores and
/// the clipped weight graph.
#[derive(Debug, Clone)]
pub struct CorrelationNetwork {
    words: Vec<String>,
    rho: Vec<f64>,
    z: Vec<f64>,
    graph: WeightedGraph,
    dropped: Vec<String>,
}

impl CorrelationNetwork {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.len() + j]
    }

    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.len() + j]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.graph.weight(i, j)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    /// Words removed because their difference series had zero variance.
    pub fn dropped(&self) -> &[String] {
        &self.dropped
    }

    /// Builds a network from precomputed matrices; weights are `max(z, 0)`.
    pub fn from_parts(words: Vec<String>, rho: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        let n = words.len();
        if rho.len() != n * n || z.len() != n * n {
            return Err(Error::invalid("rho and z must be n by n"));
        }
        let w: Vec<f64> = z.iter().map(|v| if v.is_finite() { v.max(0.0) } else { 0.0 }).collect();
        let graph = WeightedGraph::from_dense(n, w)?;
        Ok(Self {
            words,
            rho,
            z,
            graph,
            dropped: Vec::new(),
        })
    }

    /// CSV `word_i,word_j,rho,z,weight`, one row per unordered pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("word_i,word_j,rho,z,weight\n");
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    self.words[i],
                    self.words[j],
                    self.rho(i, j),
                    self.z(i, j),
                    self.weight(i, j)
                ));
            }
        }
        out
    }
}

/// First differences over days with a positive total.
fn differences(series: &[u64], totals: &[u64]) -> Vec<f64> {
    let active: Vec<f64> = series
        .iter()
        .zip(totals)
        .filter(|(_, n)| **n > 0)
        .map(|(f, _)| *f as f64)
        .collect();
    active.windows(2).map(|p| p[1] - p[0]).collect()
}

/// Centres and scales so that a dot product of two vectors is their Pearson
/// correlation. `None` for zero variance.
fn standardize(x: &[f64]) -> Option<Vec<f64>> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss <= 0.0 || !ss.is_finite() {
        return None;
    }
    let s = ss.sqrt();
    Some(x.iter().map(|v| (v - mean) / s).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Correlation network over the words of `matrix`.
///
/// Each word's difference vector is permuted independently; replicate `r`
/// of word `w` uses stream `r` of `word_seed(seed, w)`. Replicates are
/// processed in fixed chunks whose partial sums are combined in chunk
/// order, so the result does not depend on scheduling.
pub fn pairwise_network(matrix: &DailyFrequencyMatrix, opts: &NetworkOptions) -> Result<CorrelationNetwork> {
    if opts.n_shuffles < 2 {
        return Err(Error::invalid("pairwise null needs at least two shuffles"));
    }
    let totals = matrix.totals();
    let active_days = totals.iter().filter(|n| **n > 0).count();
    if active_days < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 days with words, got {active_days}"
        )));
    }
    let mut words = Vec::new();
    let mut dropped = Vec::new();
    let mut vecs = Vec::new();
    for (w, word) in matrix.words().iter().enumerate() {
        match standardize(&differences(matrix.series(w), totals)) {
            Some(v) => {
                words.push(word.clone());
                vecs.push(v);
            }
            None => {
                eprintln!("warning: dropping `{word}` from the network: constant difference series");
                dropped.push(word.clone());
            }
        }
    }
    let n = words.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 words with varying differences, got {n}"
        )));
    }
    let n_pairs = n * (n - 1) / 2;
    let plans: Vec<PermutationPlan> = words
        .iter()
        .map(|w| PermutationPlan::new(word_seed(opts.seed, w), opts.n_shuffles))
        .collect();

    let n_chunks = opts.n_shuffles.div_ceil(CHUNK);
    let partials = map_indexed(opts.exec, n_chunks, |c| {
        let mut sum = vec![0.0; n_pairs];
        let mut sumsq = vec![0.0; n_pairs];
        let mut perm: Vec<Vec<f64>> = vecs.clone();
        for r in c * CHUNK..((c + 1) * CHUNK).min(opts.n_shuffles) {
            for (w, p) in perm.iter_mut().enumerate() {
                p.copy_from_slice(&vecs[w]);
                plans[w].shuffle(p, r);
            }
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let d = dot(&perm[i], &perm[j]);
                    sum[k] += d;
                    sumsq[k] += d * d;
                    k += 1;
                }
            }
        }
        (sum, sumsq)
    });
    let mut sum = vec![0.0; n_pairs];
    let mut sumsq = vec![0.0; n_pairs];
    for (s, q) in partials {
        for k in 0..n_pairs {
            sum[k] += s[k];
            sumsq[k] += q[k];
        }
    }

    let reps = opts.n_shuffles as f64;
    let mut rho = vec![0.0; n * n];
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        rho[i * n + i] = 1.0;
        for j in i + 1..n {
            let k = pair_index(n, i, j);
            let r = dot(&vecs[i], &vecs[j]).clamp(-1.0, 1.0);
            let mean = sum[k] / reps;
            let sd = (sumsq[k] / reps - mean * mean).max(0.0).sqrt();
            let zij = if sd > 0.0 { (r - mean) / sd } else { 0.0 };
            rho[i * n + j] = r;
            rho[j * n + i] = r;
            z[i * n + j] = zij;
            z[j * n + i] = zij;
        }
    }
    let mut net = CorrelationNetwork::from_parts(words, rho, z)?;
    net.dropped = dropped;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::pearson;
    use chrono::NaiveDate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(cols: Vec<Vec<u64>>) -> DailyFrequencyMatrix {
        let days = cols[0].len();
        let d0 = NaiveDate::from_ymd_opt(2008, 1, 1).unwrap();
        let dates = (0..days).map(|i| d0 + chrono::Days::new(i as u64)).collect();
        let words = (0..cols.len()).map(|i| format!("w{i}")).collect();
        let totals = (0..days).map(|t| cols.iter().map(|c| c[t]).sum::<u64>() + 1).collect();
        DailyFrequencyMatrix::new(dates, words, cols, totals).unwrap()
    }

    fn noise(rng: &mut ChaCha8Rng, days: usize) -> Vec<u64> {
        (0..days).map(|_| rng.random_range(20..80)).collect()
    }

    #[test]
    fn identical_differences_give_unit_rho_and_large_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = noise(&mut rng, 200);
        let b: Vec<u64> = a.iter().map(|v| v + 5).collect();
        let c = noise(&mut rng, 200);
        let net = pairwise_network(&matrix(vec![a, b, c]), &NetworkOptions::new(4)).unwrap();
        assert!((net.rho(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(net.rho(0, 0), 1.0);
        assert!(net.z(0, 1) > 10.0);
        assert_eq!(net.weight(0, 0), 0.0);
    }

    #[test]
    fn rho_is_pearson_of_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = noise(&mut rng, 50);
        let b = noise(&mut rng, 50);
        let da: Vec<f64> = a.windows(2).map(|p| p[1] as f64 - p[0] as f64).collect();
        let db: Vec<f64> = b.windows(2).map(|p| p[1] as f64 - p[0] as f64).collect();
        let net = pairwise_network(
            &matrix(vec![a, b]),
            &NetworkOptions {
                n_shuffles: 100,
                ..NetworkOptions::new(0)
            },
        )
        .unwrap();
        assert!((net.rho(0, 1) - pearson(&da, &db).unwrap()).abs() < 1e-12);
        assert!((net.rho(1, 0) - net.rho(0, 1)).abs() == 0.0);
    }

    #[test]
    fn constant_difference_word_dropped() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lin: Vec<u64> = (0..40).map(|t| 10 + t).collect();
        let net = pairwise_network(
            &matrix(vec![noise(&mut rng, 40), lin, noise(&mut rng, 40)]),
            &NetworkOptions {
                n_shuffles: 100,
                ..NetworkOptions::new(0)
            },
        )
        .unwrap();
        assert_eq!(net.dropped(), ["w1".to_string()]);
        assert_eq!(net.words(), ["w0".to_string(), "w2".to_string()]);
    }

    #[test]
    fn independent_noise_z_within_three() {
        let trials = 300;
        let mut inside = 0;
        for s in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + s);
            let m = matrix(vec![noise(&mut rng, 858), noise(&mut rng, 858)]);
            let net = pairwise_network(
                &m,
                &NetworkOptions {
                    n_shuffles: 200,
                    seed: s,
                    exec: Execution::Sequential,
                },
            )
            .unwrap();
            if net.z(0, 1).abs() < 3.0 {
                inside += 1;
            }
        }
        assert!(inside as f64 >= 0.99 * trials as f64, "{inside}/{trials}");
    }

    #[test]
    fn execution_mode_does_not_change_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = matrix((0..6).map(|_| noise(&mut rng, 120)).collect());
        let mut o = NetworkOptions {
            n_shuffles: 300,
            ..NetworkOptions::new(5)
        };
        let a = pairwise_network(&m, &o).unwrap().to_csv();
        o.exec = Execution::Sequential;
        assert_eq!(a, pairwise_network(&m, &o).unwrap().to_csv());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn constant_shift_leaves_network_unchanged(seed in 0u64..1000, shift in 1u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cols: Vec<Vec<u64>> = (0..4).map(|_| noise(&mut rng, 60)).collect();
            let shifted: Vec<Vec<u64>> = cols.iter().map(|c| c.iter().map(|v| v + shift).collect()).collect();
            let o = NetworkOptions { n_shuffles: 100, seed, exec: Execution::Sequential };
            let a = pairwise_network(&matrix(cols), &o).unwrap();
            let b = pairwise_network(&matrix(shifted), &o).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert!((a.rho(i, j) - b.rho(i, j)).abs() < 1e-12);
                    prop_assert!((a.z(i, j) - b.z(i, j)).abs() < 1e-9);
                }
            }
        }
    }
}
