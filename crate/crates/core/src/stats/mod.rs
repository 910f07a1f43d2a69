//! Statistical primitives shared by the rest of the crate.

mod fisher;
mod ks;
mod ols;
mod powerlaw;
mod rng;

pub use fisher::{fisher_exact_2x2, format_probability, FisherExact, MIN_REPORTED_P};
pub use ks::{kolmogorov_survival, ks_statistic, ks_test, KsResult};
pub use ols::{nested_f_test, ols, ols_with_intercept, OlsFit};
pub use powerlaw::{discrete_powerlaw_fit, powerlaw_fit};
pub(crate) use rng::fisher_yates;
pub use rng::{derive_seed, fnv1a64, word_seed, PermutationPlan};

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance (divides by n).
pub fn pop_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

pub fn pop_std(x: &[f64]) -> f64 {
    pop_variance(x).sqrt()
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// z-scores against the full-sample mean and population standard deviation.
pub fn zscore(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::invalid("cannot z-score an empty series"));
    }
    let m = mean(x);
    let s = pop_std(x);
    if s == 0.0 || !s.is_finite() {
        return Err(Error::degenerate("zero standard deviation"));
    }
    Ok(x.iter().map(|v| (v - m) / s).collect())
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::invalid("pearson needs at least 3 observations"));
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::degenerate("zero variance in correlation input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Confidence interval for a correlation via Fisher's z transform.
pub fn fisher_ci(r: f64, n: usize, level: f64) -> Result<(f64, f64)> {
    if !(r.abs() < 1.0) {
        return Err(Error::invalid(format!("|r| must be < 1, got {r}")));
    }
    if n < 4 {
        return Err(Error::invalid("fisher_ci needs n >= 4"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid("confidence level must lie in (0, 1)"));
    }
    let z = r.atanh();
    let half = normal_quantile(0.5 + level / 2.0) / ((n - 3) as f64).sqrt();
    Ok(((z - half).tanh(), (z + half).tanh()))
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
