//! Two-sided Fisher exact test for 2x2 tables, computed in log space.

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};

/// Smallest probability written to reports; anything below prints as this bound.
pub const MIN_REPORTED_P: f64 = 1e-300;

/// Relative slack when deciding that a table is "no more probable" than the
/// observed one, so that mathematically tied tables are not lost to rounding.
const TIE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherExact {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    /// Natural log of the two-sided p-value.
    pub ln_p: f64,
}

impl FisherExact {
    pub fn p(&self) -> f64 {
        self.ln_p.exp()
    }
}

/// Formats a probability, clamping at [`MIN_REPORTED_P`].
pub fn format_probability(ln_p: f64) -> String {
    if ln_p < MIN_REPORTED_P.ln() {
        format!("<{MIN_REPORTED_P:e}")
    } else {
        format!("{:e}", ln_p.exp().min(1.0))
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Table layout:
///
/// ```text
///            col 1   col 2
///   row 1      a       b
///   row 2      c       d
/// ```
///
/// The two-sided p-value sums the hypergeometric probabilities of every table
/// with the observed margins whose probability does not exceed that of the
/// observed table.
pub fn fisher_exact_2x2(a: u64, b: u64, c: u64, d: u64) -> Result<FisherExact> {
    let n = a + b + c + d;
    if n == 0 {
        return Err(Error::invalid("empty contingency table"));
    }
    let row1 = a + b;
    let row2 = c + d;
    let col1 = a + c;
    let lo = col1.saturating_sub(row2);
    let hi = row1.min(col1);
    let ln_denom = ln_choose(n, col1);
    let ln_prob = |x: u64| ln_choose(row1, x) + ln_choose(row2, col1 - x) - ln_denom;

    let ln_obs = ln_prob(a);
    let cutoff = ln_obs + TIE_SLACK.ln_1p();
    let terms: Vec<f64> = (lo..=hi).map(ln_prob).filter(|lp| *lp <= cutoff).collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    let ln_p = (max + sum.ln()).min(0.0);
    Ok(FisherExact { a, b, c, d, ln_p })
}
