//! Power-law diagnostic for word frequencies.

use rand::Rng;

use super::DailyFrequencyMatrix;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::stats::{discrete_powerlaw_fit, PermutationPlan};

const MIN_WORDS: usize = 100;
const MIN_TAIL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfFit {
    pub exponent: f64,
    pub ks_statistic: f64,
    pub ks_p: f64,
    pub xmin: u64,
    pub n_tail: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ZipfOptions {
    pub bootstrap: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for ZipfOptions {
    fn default() -> Self {
        Self {
            bootstrap: 500,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// Distinct values in ascending order with multiplicities.
fn histogram(sorted: &[u64]) -> (Vec<u64>, Vec<usize>) {
    let mut values = Vec::new();
    let mut mult = Vec::new();
    for &v in sorted {
        if values.last() == Some(&v) {
            *mult.last_mut().expect("nonempty") += 1;
        } else {
            values.push(v);
            mult.push(1);
        }
    }
    (values, mult)
}

fn model_cdf(x: f64, xmin: u64, alpha: f64) -> f64 {
    let lower = xmin as f64 - 0.5;
    1.0 - ((x + 0.5) / lower).powf(1.0 - alpha)
}

/// KS distance between the tail histogram and the discretised power law.
/// The model CDF jumps at every integer, so the gap is checked both at each
/// observed value and just below it.
fn discrete_ks(values: &[u64], mult: &[usize], xmin: u64, alpha: f64) -> f64 {
    let n: usize = mult.iter().sum();
    let n = n as f64;
    let mut cum = 0usize;
    let mut d: f64 = 0.0;
    for (v, m) in values.iter().zip(mult) {
        let before = cum as f64 / n;
        let model_before = model_cdf(*v as f64 - 1.0, xmin, alpha).max(0.0);
        cum += m;
        let after = cum as f64 / n;
        let model_at = model_cdf(*v as f64, xmin, alpha);
        d = d.max((before - model_before).abs()).max((after - model_at).abs());
    }
    d
}

fn sample_discrete(rng: &mut impl Rng, xmin: u64, alpha: f64) -> u64 {
    let u: f64 = rng.random();
    let lower = xmin as f64 - 0.5;
    (lower * (1.0 - u).powf(-1.0 / (alpha - 1.0)) + 0.5).floor() as u64
}

/// Fits a power law to positive integer counts.
///
/// `xmin` is chosen by minimising the KS distance over candidate thresholds
/// that leave at least 50 values in the tail. The exponent is the
/// continuous-approximation MLE with lower bound `xmin - 1/2`, and the KS
/// p-value comes from a parametric bootstrap at the fitted `(xmin, alpha)`.
pub fn fit_counts(counts: &[u64], opts: &ZipfOptions) -> Result<ZipfFit> {
    let mut sorted: Vec<u64> = counts.iter().copied().filter(|c| *c > 0).collect();
    if sorted.len() < MIN_WORDS {
        return Err(Error::invalid(format!(
            "Zipf diagnostic needs at least {MIN_WORDS} words, got {}",
            sorted.len()
        )));
    }
    sorted.sort_unstable();
    if sorted.first() == sorted.last() {
        return Err(Error::degenerate("all word counts are equal"));
    }
    if opts.bootstrap == 0 {
        return Err(Error::invalid("bootstrap count must be positive"));
    }
    let (values, mult) = histogram(&sorted);

    let mut suffix_n = vec![0usize; values.len() + 1];
    for k in (0..values.len()).rev() {
        suffix_n[k] = suffix_n[k + 1] + mult[k];
    }
    let mut best: Option<(f64, usize, f64)> = None;
    for j in 0..values.len() {
        if suffix_n[j] < MIN_TAIL {
            break;
        }
        if values[j] == *values.last().expect("nonempty") {
            break;
        }
        let xmin = values[j];
        let alpha = discrete_powerlaw_fit(&sorted[sorted.len() - suffix_n[j]..], xmin)?;
        let d = discrete_ks(&values[j..], &mult[j..], xmin, alpha);
        if best.is_none_or(|(bd, _, _)| d < bd) {
            best = Some((d, j, alpha));
        }
    }
    let (d_obs, j, alpha) = best.ok_or_else(|| Error::degenerate("no threshold leaves a usable tail"))?;
    let xmin = values[j];
    let n_tail = suffix_n[j];

    let plan = PermutationPlan::new(opts.seed, opts.bootstrap);
    let exceed = par::map_indexed(opts.exec, plan.replicates, |r| {
        let mut rng = plan.rng(r);
        let mut sample: Vec<u64> = (0..n_tail).map(|_| sample_discrete(&mut rng, xmin, alpha)).collect();
        sample.sort_unstable();
        let a = match discrete_powerlaw_fit(&sample, xmin) {
            Ok(a) => a,
            Err(_) => return true,
        };
        let (v, m) = histogram(&sample);
        discrete_ks(&v, &m, xmin, a) >= d_obs
    });
    let ks_p = exceed.iter().filter(|e| **e).count() as f64 / plan.replicates as f64;

    Ok(ZipfFit {
        exponent: alpha,
        ks_statistic: d_obs,
        ks_p,
        xmin,
        n_tail,
    })
}

/// Power-law fit of the word totals of `matrix`.
pub fn zipf_diagnostic(matrix: &DailyFrequencyMatrix, opts: &ZipfOptions) -> Result<ZipfFit> {
    let totals: Vec<u64> = (0..matrix.n_words()).map(|w| matrix.word_total(w)).collect();
    fit_counts(&totals, opts)
}
