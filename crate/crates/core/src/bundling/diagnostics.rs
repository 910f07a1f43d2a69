use super::graph::{BundlePartition, WeightedGraph};
use super::network::CorrelationNetwork;
use crate::error::{Error, Result};

/// Proportions of significant (`z > 2`) pairs inside and across bundles.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleDiagnostics {
    pub within: f64,
    pub between: f64,
    pub within_pairs: usize,
    pub between_pairs: usize,
}

pub const SIGNIFICANT_Z: f64 = 2.0;

/// Isolated nodes are left out of both counts.
pub fn bundle_diagnostics(network: &CorrelationNetwork, partition: &BundlePartition) -> Result<BundleDiagnostics> {
    let n = network.len();
    if partition.assignment.len() != n {
        return Err(Error::invalid("partition does not match network"));
    }
    let g = network.graph();
    let active: Vec<usize> = (0..n).filter(|i| !g.is_isolated(*i)).collect();
    let mut bundles: Vec<usize> = active.iter().map(|i| partition.assignment[*i]).collect();
    bundles.sort_unstable();
    bundles.dedup();
    if bundles.len() < 2 {
        return Err(Error::degenerate("diagnostics need at least two bundles"));
    }
    let (mut wi, mut ws, mut bi, mut bs) = (0usize, 0usize, 0usize, 0usize);
    for (a, &i) in active.iter().enumerate() {
        for &j in &active[a + 1..] {
            let sig = network.z(i, j) > SIGNIFICANT_Z;
            if partition.assignment[i] == partition.assignment[j] {
                wi += 1;
                ws += usize::from(sig);
            } else {
                bi += 1;
                bs += usize::from(sig);
            }
        }
    }
    let frac = |s: usize, t: usize| if t == 0 { 0.0 } else { s as f64 / t as f64 };
    Ok(BundleDiagnostics {
        within: frac(ws, wi),
        between: frac(bs, bi),
        within_pairs: wi,
        between_pairs: bi,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleSummary {
    /// Zero-based; written one-based in CSV output.
    pub bundle: usize,
    pub size: usize,
    pub share: f64,
    pub q_contribution: f64,
}

/// Per-bundle size, share of nodes and modularity term; the terms sum to `q`.
pub fn bundle_summary(graph: &WeightedGraph, partition: &BundlePartition) -> Vec<BundleSummary> {
    let k = partition.n_bundles();
    let n = graph.len();
    let mut w_in = vec![0.0; k];
    let mut s = vec![0.0; k];
    for i in 0..n {
        let c = partition.assignment[i];
        s[c] += graph.strength(i);
        for j in 0..n {
            if partition.assignment[j] == c {
                w_in[c] += graph.weight(i, j);
            }
        }
    }
    let two_m = graph.two_m();
    partition
        .sizes()
        .into_iter()
        .enumerate()
        .map(|(c, size)| BundleSummary {
            bundle: c,
            size,
            share: size as f64 / n as f64,
            q_contribution: if two_m > 0.0 {
                w_in[c] / two_m - (s[c] / two_m).powi(2)
            } else {
                0.0
            },
        })
        .collect()
}

/// CSV `word,bundle_id` with one-based ids.
pub fn bundles_csv(words: &[String], partition: &BundlePartition) -> String {
    let mut out = String::from("word,bundle_id\n");
    for (w, c) in words.iter().zip(&partition.assignment) {
        out.push_str(&format!("{w},{}\n", c + 1));
    }
    out
}

/// CSV `bundle_id,size,share,q_contribution` with one-based ids.
pub fn summary_csv(rows: &[BundleSummary]) -> String {
    let mut out = String::from("bundle_id,size,share,q_contribution\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.bundle + 1,
            r.size,
            r.share,
            r.q_contribution
        ));
    }
    out
}
