use std::collections::HashMap;

use super::graph::BundlePartition;
use super::network::{pairwise_network, NetworkOptions};
use super::{detect_bundles, BundleOptions};
use crate::corpus::DailyFrequencyMatrix;
use crate::error::{Error, Result};

pub const MIN_STABILITY_DAYS: usize = 60;

#[derive(Debug, Clone, Copy)]
pub struct StabilityOptions {
    pub network: NetworkOptions,
    pub bundles: BundleOptions,
}

impl StabilityOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            network: NetworkOptions::new(seed),
            bundles: BundleOptions::new(seed),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub nmi: f64,
    pub shared_words: Vec<String>,
    pub first: BundlePartition,
    pub second: BundlePartition,
    pub first_words: Vec<String>,
    pub second_words: Vec<String>,
}

/// Normalized mutual information `2 I / (H1 + H2)`; equal to 1 when both
/// labelings are a single identical cluster.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::invalid("labelings must be nonempty and of equal length"));
    }
    let n = a.len() as f64;
    let mut ca: HashMap<usize, f64> = HashMap::new();
    let mut cb: HashMap<usize, f64> = HashMap::new();
    let mut cab: HashMap<(usize, usize), f64> = HashMap::new();
    for (x, y) in a.iter().zip(b) {
        *ca.entry(*x).or_default() += 1.0;
        *cb.entry(*y).or_default() += 1.0;
        *cab.entry((*x, *y)).or_default() += 1.0;
    }
    let entropy = |m: &HashMap<usize, f64>| -> f64 {
        let mut v: Vec<f64> = m.values().copied().collect();
        v.sort_by(f64::total_cmp);
        v.iter().map(|c| -(c / n) * (c / n).ln()).sum()
    };
    let ha = entropy(&ca);
    let hb = entropy(&cb);
    if ha + hb == 0.0 {
        return Ok(1.0);
    }
    let mut terms: Vec<((usize, usize), f64)> = cab.into_iter().collect();
    terms.sort_by_key(|t| t.0);
    let mi: f64 = terms
        .iter()
        .map(|((x, y), c)| (c / n) * ((c * n) / (ca[x] * cb[y])).ln())
        .sum();
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

/// Detects bundles separately on the first and second half of the date
/// range and scores their agreement over the words kept in both networks.
pub fn stability_check(matrix: &DailyFrequencyMatrix, opts: &StabilityOptions) -> Result<StabilityReport> {
    let t = matrix.n_dates();
    if t < MIN_STABILITY_DAYS {
        return Err(Error::invalid(format!(
            "stability check needs at least {MIN_STABILITY_DAYS} days, got {t}"
        )));
    }
    let half = t / 2;
    let first_m = matrix.slice_dates(0..half);
    let second_m = matrix.slice_dates(half..2 * half);
    let mut parts = Vec::new();
    for m in [&first_m, &second_m] {
        if m.n_dates() < 3 {
            return Err(Error::invalid("half has fewer than 3 days"));
        }
        let net = pairwise_network(m, &opts.network)?;
        let p = detect_bundles(net.graph(), &opts.bundles)?;
        parts.push((net.words().to_vec(), p));
    }
    let (second_words, second) = parts.pop().expect("two halves");
    let (first_words, first) = parts.pop().expect("two halves");
    let idx2: HashMap<&str, usize> = second_words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let mut shared_words = Vec::new();
    let mut la = Vec::new();
    let mut lb = Vec::new();
    for (i, w) in first_words.iter().enumerate() {
        if let Some(&j) = idx2.get(w.as_str()) {
            shared_words.push(w.clone());
            la.push(first.assignment[i]);
            lb.push(second.assignment[j]);
        }
    }
    if shared_words.is_empty() {
        return Err(Error::degenerate("halves share no network words"));
    }
    Ok(StabilityReport {
        nmi: nmi(&la, &lb)?,
        shared_words,
        first,
        second,
        first_words,
        second_words,
    })
}
