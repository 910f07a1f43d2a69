use super::aligned::AlignedSeries;
use crate::error::{Error, Result};
use crate::stats::{nested_f_test, ols_with_intercept};

pub const MIN_GRANGER_LEN: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct GrangerResult {
    pub f: f64,
    pub p: f64,
    /// Coefficient on the predictor in the unrestricted model.
    pub coefficient: f64,
    pub nobs: usize,
}

/// Compares `target(t+1) ~ target(t)` against `target(t+1) ~ target(t) +
/// predictor(t)`; `p` is the upper tail of `F(1, nobs - 3)`.
pub fn granger_test(target: &AlignedSeries, predictor: &AlignedSeries) -> Result<GrangerResult> {
    if target.dates() != predictor.dates() {
        return Err(Error::invalid(format!(
            "series `{}` and `{}` are not aligned",
            target.name, predictor.name
        )));
    }
    let n = target.len();
    if n < MIN_GRANGER_LEN {
        return Err(Error::invalid(format!(
            "Granger test needs {MIN_GRANGER_LEN} days, got {n}"
        )));
    }
    let y = &target.values()[1..];
    let own = &target.values()[..n - 1];
    let pred = &predictor.values()[..n - 1];
    let restricted = ols_with_intercept(y, &[own])?;
    if pred.iter().all(|v| *v == pred[0]) {
        return Ok(GrangerResult {
            f: 0.0,
            p: 1.0,
            coefficient: 0.0,
            nobs: n - 1,
        });
    }
    let unrestricted = ols_with_intercept(y, &[own, pred])?;
    let (f, p) = nested_f_test(&restricted, &unrestricted)?;
    Ok(GrangerResult {
        f,
        p,
        coefficient: unrestricted.coefficients[2],
        nobs: n - 1,
    })
}
