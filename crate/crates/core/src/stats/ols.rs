//! Ordinary least squares through a Householder QR factorisation.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};

const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// Total sum of squares, centred when the design carries an intercept.
    pub tss: f64,
    pub n: usize,
    pub k: usize,
    pub dof: usize,
    pub has_intercept: bool,
    /// F statistic against the intercept-only model (or the empty model when
    /// there is no intercept column). `None` when the design is intercept-only.
    pub f_stat: Option<f64>,
    pub f_p: Option<f64>,
}

impl OlsFit {
    pub fn r_squared(&self) -> f64 {
        if self.tss == 0.0 {
            return 1.0;
        }
        1.0 - self.rss / self.tss
    }

    pub fn sigma2(&self) -> f64 {
        self.rss / self.dof as f64
    }
}

fn is_constant_nonzero(col: &[f64]) -> bool {
    col.first().is_some_and(|v| *v != 0.0) && col.iter().all(|v| *v == col[0])
}

/// Fits `y = X b + e` where `columns` are the columns of `X`.
pub fn ols(y: &[f64], columns: &[&[f64]]) -> Result<OlsFit> {
    let n = y.len();
    let k = columns.len();
    if k == 0 {
        return Err(Error::invalid("design matrix has no columns"));
    }
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::invalid(format!(
            "design column has {} rows, response has {n}",
            bad.len()
        )));
    }
    if n <= k {
        return Err(Error::invalid(format!("need n > k, got n={n}, k={k}")));
    }

    let x = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let rank = (0..k)
        .filter(|&i| r[(i, i)].abs() > RANK_TOL * max_diag.max(f64::MIN_POSITIVE))
        .count();
    if rank < k {
        return Err(Error::RankDeficient { rank, columns: k });
    }

    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { rank, columns: k })?;
    let fitted = &x * &beta;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let dof = n - k;
    let sigma2 = rss / dof as f64;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::RankDeficient { rank, columns: k })?;
    let cov_unscaled = &r_inv * r_inv.transpose();

    let tdist = StudentsT::new(0.0, 1.0, dof as f64).map_err(|e| Error::invalid(e.to_string()))?;
    let mut std_errors = Vec::with_capacity(k);
    let mut t_stats = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for j in 0..k {
        let se = (sigma2 * cov_unscaled[(j, j)]).sqrt();
        let t = beta[j] / se;
        std_errors.push(se);
        t_stats.push(t);
        p_values.push(if t.is_finite() {
            2.0 * tdist.sf(t.abs())
        } else if t.is_nan() {
            1.0
        } else {
            0.0
        });
    }

    let has_intercept = columns.iter().any(|c| is_constant_nonzero(c));
    let tss = if has_intercept {
        let m = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - m) * (v - m)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    let df_model = if has_intercept { k - 1 } else { k };
    let (f_stat, f_p) = if df_model == 0 {
        (None, None)
    } else {
        let f = ((tss - rss) / df_model as f64) / sigma2;
        let p = f_sf(f, df_model as f64, dof as f64)?;
        (Some(f), Some(p))
    };

    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        t_stats,
        p_values,
        residuals,
        rss,
        tss,
        n,
        k,
        dof,
        has_intercept,
        f_stat,
        f_p,
    })
}

/// OLS with a leading intercept column.
pub fn ols_with_intercept(y: &[f64], regressors: &[&[f64]]) -> Result<OlsFit> {
    let ones = vec![1.0; y.len()];
    let mut cols: Vec<&[f64]> = Vec::with_capacity(regressors.len() + 1);
    cols.push(&ones);
    cols.extend_from_slice(regressors);
    ols(y, &cols)
}

pub(crate) fn f_sf(f: f64, d1: f64, d2: f64) -> Result<f64> {
    if f.is_nan() {
        return Ok(1.0);
    }
    if f == f64::INFINITY {
        return Ok(0.0);
    }
    if f <= 0.0 {
        return Ok(1.0);
    }
    let dist = FisherSnedecor::new(d1, d2).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(dist.sf(f))
}

/// F test of a restricted model nested in an unrestricted one fitted to the
/// same observations. Returns `(F, p)`.
pub fn nested_f_test(restricted: &OlsFit, unrestricted: &OlsFit) -> Result<(f64, f64)> {
    if restricted.n != unrestricted.n || restricted.k >= unrestricted.k {
        return Err(Error::invalid("models are not nested"));
    }
    let q = (unrestricted.k - restricted.k) as f64;
    let f = ((restricted.rss - unrestricted.rss) / q) / unrestricted.sigma2();
    let f = f.max(0.0);
    let p = f_sf(f, q, unrestricted.dof as f64)?;
    Ok((f, p))
}
