use std::fmt;

use super::decompose::{decompose, eta_ratio, pop_std_masked};
use crate::corpus::DailyFrequencyMatrix;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::stats::{word_seed, PermutationPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Routinary,
    External,
    Ambiguous,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Routinary => "routinary",
            Label::External => "external",
            Label::Ambiguous => "ambiguous",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "routinary" => Some(Label::Routinary),
            "external" => Some(Label::External),
            "ambiguous" => Some(Label::Ambiguous),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rule that turns the scores into a label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// External iff `lo < z < hi`.
    ZWindow { lo: f64, hi: f64 },
    /// External iff `eta < cut`.
    EtaBelow(f64),
}

impl Default for Criterion {
    fn default() -> Self {
        Criterion::ZWindow { lo: -2.0, hi: 2.0 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub n_shuffles: usize,
    pub seed: u64,
    pub criterion: Criterion,
    pub exec: Execution,
}

impl ClassifyOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            n_shuffles: 1000,
            seed,
            criterion: Criterion::default(),
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordClassification {
    pub word: String,
    pub eta: f64,
    pub eta_null_mean: f64,
    pub eta_null_std: f64,
    pub z: f64,
    pub label: Label,
}

impl WordClassification {
    fn ambiguous(word: &str, eta: f64) -> Self {
        Self {
            word: word.to_string(),
            eta,
            eta_null_mean: f64::NAN,
            eta_null_std: f64::NAN,
            z: f64::NAN,
            label: Label::Ambiguous,
        }
    }
}

pub const MIN_SHUFFLES: usize = 100;

/// Scores every word of `matrix` against its own shuffle null.
///
/// Each word's replicates are driven by `word_seed(seed, word)`, so the
/// output does not depend on word order, thread count or execution mode.
pub fn classify(matrix: &DailyFrequencyMatrix, opts: &ClassifyOptions) -> Result<Vec<WordClassification>> {
    if opts.n_shuffles < MIN_SHUFFLES {
        return Err(Error::invalid(format!(
            "n_shuffles = {} is below the minimum of {MIN_SHUFFLES}",
            opts.n_shuffles
        )));
    }
    if let Criterion::ZWindow { lo, hi } = opts.criterion {
        if !(lo < hi) {
            return Err(Error::invalid("z window must satisfy lo < hi"));
        }
    }
    let totals = matrix.totals_f64();
    if totals.iter().all(|n| *n == 0.0) {
        return Err(Error::degenerate("every day has zero total words"));
    }
    let words = matrix.words();
    let out = map_indexed(opts.exec, words.len(), |w| {
        classify_word(&words[w], &matrix.series_f64(w), &totals, opts)
    });
    out.into_iter().collect()
}

fn classify_word(word: &str, series: &[f64], totals: &[f64], opts: &ClassifyOptions) -> Result<WordClassification> {
    let d = decompose(series, totals)?;
    let eta = match eta_ratio(&d) {
        Ok(e) => e,
        Err(Error::Degenerate(_)) => return Ok(WordClassification::ambiguous(word, f64::NAN)),
        Err(e) => return Err(e),
    };

    let active: Vec<usize> = (0..totals.len()).filter(|t| totals[*t] > 0.0).collect();
    let f_active: Vec<f64> = active.iter().map(|t| series[*t]).collect();
    let r_active: Vec<f64> = active.iter().map(|t| d.routinary[*t]).collect();
    let mask = vec![true; active.len()];

    let plan = PermutationPlan::new(word_seed(opts.seed, word), opts.n_shuffles);
    let mut perm = f_active.clone();
    let mut ext = vec![0.0; active.len()];
    let mut null = Vec::with_capacity(opts.n_shuffles);
    for r in 0..opts.n_shuffles {
        perm.copy_from_slice(&f_active);
        plan.shuffle(&mut perm, r);
        for i in 0..ext.len() {
            ext[i] = perm[i] - r_active[i];
        }
        let s_ext = pop_std_masked(&ext, &mask);
        null.push(d.sigma_r / s_ext);
    }
    if null.iter().any(|v| !v.is_finite()) {
        return Ok(WordClassification::ambiguous(word, eta));
    }
    let n = null.len() as f64;
    let mean = null.iter().sum::<f64>() / n;
    let std = (null.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();

    let z = if eta.is_infinite() {
        f64::INFINITY
    } else if std > 0.0 {
        (eta - mean) / std
    } else {
        f64::NAN
    };
    let label = if eta.is_infinite() {
        Label::Routinary
    } else if !z.is_finite() {
        match opts.criterion {
            Criterion::EtaBelow(cut) if eta < cut => Label::External,
            Criterion::EtaBelow(_) => Label::Routinary,
            Criterion::ZWindow { .. } => Label::Ambiguous,
        }
    } else {
        match opts.criterion {
            Criterion::ZWindow { lo, hi } if lo < z && z < hi => Label::External,
            Criterion::EtaBelow(cut) if eta < cut => Label::External,
            _ => Label::Routinary,
        }
    };
    Ok(WordClassification {
        word: word.to_string(),
        eta,
        eta_null_mean: mean,
        eta_null_std: std,
        z,
        label,
    })
}

/// CSV with header `word,eta,eta_null_mean,eta_null_std,z,label`.
pub fn classifications_csv(rows: &[WordClassification]) -> String {
    let mut out = String::from("word,eta,eta_null_mean,eta_null_std,z,label\n");
    for c in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.word, c.eta, c.eta_null_mean, c.eta_null_std, c.z, c.label
        ));
    }
    out
}
