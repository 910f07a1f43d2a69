//! Maximum-likelihood power-law exponents.

use crate::error::{Error, Result};

const MIN_TAIL: usize = 50;

/// Continuous MLE `1 + n / sum(ln(x / xmin))` over values `>= xmin`.
pub fn powerlaw_fit(values: &[f64], xmin: f64) -> Result<f64> {
    if !(xmin > 0.0) {
        return Err(Error::invalid("xmin must be positive"));
    }
    let tail: Vec<f64> = values.iter().copied().filter(|v| *v >= xmin).collect();
    if tail.len() < MIN_TAIL {
        return Err(Error::invalid(format!(
            "power-law fit needs at least {MIN_TAIL} values >= xmin, got {}",
            tail.len()
        )));
    }
    let s: f64 = tail.iter().map(|v| (v / xmin).ln()).sum();
    if s <= 0.0 {
        return Err(Error::degenerate("all values equal xmin"));
    }
    Ok(1.0 + tail.len() as f64 / s)
}

/// Continuous approximation for integer data: the lower bound is shifted to
/// `xmin - 1/2`.
pub fn discrete_powerlaw_fit(counts: &[u64], xmin: u64) -> Result<f64> {
    if xmin == 0 {
        return Err(Error::invalid("xmin must be >= 1"));
    }
    let lower = xmin as f64 - 0.5;
    let tail: Vec<f64> = counts.iter().filter(|c| **c >= xmin).map(|c| *c as f64).collect();
    if tail.len() < MIN_TAIL {
        return Err(Error::invalid(format!(
            "power-law fit needs at least {MIN_TAIL} values >= xmin, got {}",
            tail.len()
        )));
    }
    let s: f64 = tail.iter().map(|v| (v / lower).ln()).sum();
    Ok(1.0 + tail.len() as f64 / s)
}
