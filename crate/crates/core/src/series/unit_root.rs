//! Unit-root tests with a constant and no trend.
//!
//! p-values come from MacKinnon's response-surface approximation for a
//! single series with a constant: `p = Phi(poly(tau))`, with a quadratic
//! polynomial for `tau <= -1.61` and a cubic above it, `p = 0` below
//! `-18.83` and `p = 1` above `2.74`. Finite-sample critical values use
//! `b0 + b1/T + b2/T^2 + b3/T^3`.

use super::aligned::AlignedSeries;
use crate::error::{Error, Result};
use crate::stats::{normal_cdf, ols_with_intercept};

const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 0.038269];
const LARGE_P: [f64; 4] = [1.7339, 0.93202, -0.12745, -0.010368];
const CRIT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

pub const MIN_UNIT_ROOT_LEN: usize = 25;

/// Approximate left-tail probability of the Dickey-Fuller tau statistic.
pub fn mackinnon_p(tau: f64) -> f64 {
    if tau.is_nan() {
        return f64::NAN;
    }
    if tau > TAU_MAX {
        return 1.0;
    }
    if tau < TAU_MIN {
        return 0.0;
    }
    let poly = if tau <= TAU_STAR {
        SMALL_P[0] + SMALL_P[1] * tau + SMALL_P[2] * tau * tau
    } else {
        LARGE_P[0] + LARGE_P[1] * tau + LARGE_P[2] * tau * tau + LARGE_P[3] * tau.powi(3)
    };
    normal_cdf(poly)
}

/// 1%, 5% and 10% critical values for `nobs` observations.
pub fn critical_values(nobs: usize) -> [f64; 3] {
    let t = nobs as f64;
    CRIT.map(|b| b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitRootResult {
    pub statistic: f64,
    pub p: f64,
    /// Augmentation lags (ADF) or bandwidth (PP).
    pub lags: usize,
    pub nobs: usize,
    pub critical: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdfLags {
    Fixed(usize),
    /// Lag order in `0..=max` minimising AIC on a common sample.
    Aic {
        max: usize,
    },
}

impl Default for AdfLags {
    fn default() -> Self {
        AdfLags::Fixed(1)
    }
}

fn check(y: &[f64], name: &str, lags: usize) -> Result<()> {
    if y.len() < MIN_UNIT_ROOT_LEN + lags {
        return Err(Error::invalid(format!(
            "series `{name}` has {} values, needs at least {}",
            y.len(),
            MIN_UNIT_ROOT_LEN + lags
        )));
    }
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::degenerate(format!("series `{name}` is constant")));
    }
    Ok(())
}

/// `dy_t = a + g y_{t-1} + sum_i phi_i dy_{t-i}` over `t` from `skip + 1`.
fn adf_regression(y: &[f64], lags: usize, skip: usize) -> Result<crate::stats::OlsFit> {
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let start = skip.max(lags);
    let resp = &dy[start..];
    let level: Vec<f64> = (start..dy.len()).map(|t| y[t]).collect();
    let lagged: Vec<Vec<f64>> = (1..=lags)
        .map(|i| (start..dy.len()).map(|t| dy[t - i]).collect())
        .collect();
    let mut cols: Vec<&[f64]> = vec![&level];
    cols.extend(lagged.iter().map(Vec::as_slice));
    ols_with_intercept(resp, &cols)
}

pub fn adf_test(s: &AlignedSeries, lags: AdfLags) -> Result<UnitRootResult> {
    let y = s.values();
    let max = match lags {
        AdfLags::Fixed(l) | AdfLags::Aic { max: l } => l,
    };
    check(y, &s.name, max)?;
    let chosen = match lags {
        AdfLags::Fixed(l) => l,
        AdfLags::Aic { max } => {
            let mut best = (f64::INFINITY, 0);
            for l in 0..=max {
                let fit = adf_regression(y, l, max)?;
                let n = fit.n as f64;
                let aic = n * (fit.rss / n).ln() + 2.0 * fit.k as f64;
                if aic < best.0 {
                    best = (aic, l);
                }
            }
            best.1
        }
    };
    let fit = adf_regression(y, chosen, chosen)?;
    let tau = fit.t_stats[1];
    Ok(UnitRootResult {
        statistic: tau,
        p: mackinnon_p(tau),
        lags: chosen,
        nobs: fit.n,
        critical: critical_values(fit.n),
    })
}

/// Phillips-Perron `Z_tau` with a Bartlett-kernel long-run variance.
/// `bandwidth = None` uses `floor(4 (T/100)^(2/9))`.
pub fn pp_test(s: &AlignedSeries, bandwidth: Option<usize>) -> Result<UnitRootResult> {
    let y = s.values();
    check(y, &s.name, 0)?;
    let fit = adf_regression(y, 0, 0)?;
    let t_obs = fit.n;
    let tn = t_obs as f64;
    let l = bandwidth.unwrap_or_else(|| (4.0 * (tn / 100.0).powf(2.0 / 9.0)).floor() as usize);
    if l >= t_obs {
        return Err(Error::invalid(format!("bandwidth {l} not below sample size {t_obs}")));
    }
    let u = &fit.residuals;
    let gamma = |j: usize| u[j..].iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / tn;
    let g0 = gamma(0);
    let lambda2 = g0
        + 2.0
            * (1..=l)
                .map(|j| (1.0 - j as f64 / (l as f64 + 1.0)) * gamma(j))
                .sum::<f64>();
    if !(lambda2 > 0.0) {
        return Err(Error::degenerate("long-run variance estimate is not positive"));
    }
    let s_hat = fit.sigma2().sqrt();
    let se = fit.std_errors[1];
    let t = fit.t_stats[1];
    let z = (g0 / lambda2).sqrt() * t - (lambda2 - g0) / (2.0 * lambda2.sqrt()) * (tn * se / s_hat);
    Ok(UnitRootResult {
        statistic: z,
        p: mackinnon_p(z),
        lags: l,
        nobs: t_obs,
        critical: critical_values(t_obs),
    })
}

/// Slope of `s(t)` on `s(t-1)` with an intercept.
pub fn ar1_coefficient(s: &AlignedSeries) -> Result<f64> {
    let v = s.values();
    if v.len() < 10 {
        return Err(Error::invalid(format!("series `{}` needs at least 10 values", s.name)));
    }
    if v.iter().all(|x| *x == v[0]) {
        return Err(Error::degenerate(format!("series `{}` is constant", s.name)));
    }
    let fit = ols_with_intercept(&v[1..], &[&v[..v.len() - 1]])?;
    Ok(fit.coefficients[1])
}
