use super::aligned::AlignedSeries;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::stats::{derive_seed, fisher_ci, pearson, quantile, PermutationPlan};

pub const MIN_CCF_OVERLAP: usize = 30;

#[derive(Debug, Clone, Copy)]
pub struct CcfOptions {
    pub max_lag: usize,
    pub n_null: usize,
    pub seed: u64,
    pub level: f64,
    pub exec: Execution,
}

impl CcfOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            max_lag: 5,
            n_null: 1000,
            seed,
            level: 0.95,
            exec: Execution::default(),
        }
    }
}

/// `rho[k] = corr(x(t), y(t + lags[k]))` over the overlapping days.
#[derive(Debug, Clone, PartialEq)]
pub struct CcfResult {
    pub lags: Vec<i64>,
    pub rho: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    /// Two-sided band of `|rho|` under independent permutations of both series.
    pub null_band: Vec<f64>,
    /// Share of null replicates with `|rho*| >= |rho|`, with the observed
    /// value counted once.
    pub p_perm: Vec<f64>,
    pub overlap: Vec<usize>,
}

impl CcfResult {
    pub fn at(&self, lag: i64) -> Option<usize> {
        self.lags.iter().position(|l| *l == lag)
    }

    pub fn significant(&self, k: usize) -> bool {
        self.rho[k].abs() > self.null_band[k]
    }
}

fn overlap<'a>(x: &'a [f64], y: &'a [f64], lag: i64) -> (&'a [f64], &'a [f64]) {
    let n = x.len();
    let l = lag.unsigned_abs() as usize;
    if lag >= 0 {
        (&x[..n - l], &y[l..])
    } else {
        (&x[l..], &y[..n - l])
    }
}

/// Cross-correlation of two series already aligned on the same dates. With
/// `x` the index movement and `y` a bundle movement, negative lags mean the
/// bundle leads.
pub fn cross_correlation(x: &AlignedSeries, y: &AlignedSeries, opts: &CcfOptions) -> Result<CcfResult> {
    if x.dates() != y.dates() {
        return Err(Error::invalid(format!(
            "series `{}` and `{}` are not aligned",
            x.name, y.name
        )));
    }
    let n = x.len();
    if n < opts.max_lag + MIN_CCF_OVERLAP {
        return Err(Error::invalid(format!(
            "{n} aligned days leave fewer than {MIN_CCF_OVERLAP} overlapping days at lag {}",
            opts.max_lag
        )));
    }
    if opts.n_null < 20 {
        return Err(Error::invalid("null band needs at least 20 replicates"));
    }
    let (xv, yv) = (x.values(), y.values());
    let m = opts.max_lag as i64;
    let lags: Vec<i64> = (-m..=m).collect();
    let mut rho = Vec::with_capacity(lags.len());
    let mut lo = Vec::with_capacity(lags.len());
    let mut hi = Vec::with_capacity(lags.len());
    let mut ov = Vec::with_capacity(lags.len());
    for &lag in &lags {
        let (a, b) = overlap(xv, yv, lag);
        let r = pearson(a, b)?;
        let (l, h) = if r.abs() < 1.0 {
            fisher_ci(r, a.len(), opts.level)?
        } else {
            (r, r)
        };
        rho.push(r);
        lo.push(l);
        hi.push(h);
        ov.push(a.len());
    }

    let plan_x = PermutationPlan::new(derive_seed(opts.seed, 0), opts.n_null);
    let plan_y = PermutationPlan::new(derive_seed(opts.seed, 1), opts.n_null);
    let null: Vec<Vec<f64>> = map_indexed(opts.exec, opts.n_null, |r| {
        let px = plan_x.permute(xv, r);
        let py = plan_y.permute(yv, r);
        lags.iter()
            .map(|&lag| {
                let (a, b) = overlap(&px, &py, lag);
                pearson(a, b).map_or(0.0, f64::abs)
            })
            .collect()
    });
    let mut band = Vec::with_capacity(lags.len());
    let mut p_perm = Vec::with_capacity(lags.len());
    for k in 0..lags.len() {
        let mut col: Vec<f64> = null.iter().map(|row| row[k]).collect();
        col.sort_by(f64::total_cmp);
        band.push(quantile(&col, opts.level));
        let exceed = col.iter().filter(|v| **v >= rho[k].abs()).count();
        p_perm.push((exceed + 1) as f64 / (opts.n_null + 1) as f64);
    }
    Ok(CcfResult {
        lags,
        rho,
        ci_low: lo,
        ci_high: hi,
        null_band: band,
        p_perm,
        overlap: ov,
    })
}

/// CSV `lag,rho,ci_low,ci_high,null_band,p_perm,n`.
pub fn ccf_csv(c: &CcfResult) -> String {
    let mut out = String::from("lag,rho,ci_low,ci_high,null_band,p_perm,n\n");
    for k in 0..c.lags.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.lags[k], c.rho[k], c.ci_low[k], c.ci_high[k], c.null_band[k], c.p_perm[k], c.overlap[k]
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::aligned::tests::series;
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = PermutationPlan::new(seed, 1).rng(0);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn opts() -> CcfOptions {
        CcfOptions {
            n_null: 200,
            ..CcfOptions::new(3)
        }
    }

    #[test]
    fn self_correlation_at_zero() {
        let x = series("x", &noise(100, 1));
        let c = cross_correlation(&x, &x, &opts()).unwrap();
        let k = c.at(0).unwrap();
        assert!((c.rho[k] - 1.0).abs() < 1e-12);
        assert!(c.significant(k));
    }

    #[test]
    fn leading_series_peaks_at_negative_lag() {
        let e = noise(301, 2);
        // x(t) = y(t - 1): y leads x by one day
        let x = series("x", &e[..300]);
        let y = series("y", &e[1..]);
        let c = cross_correlation(&x, &y, &opts()).unwrap();
        assert!((c.rho[c.at(-1).unwrap()] - 1.0).abs() < 1e-12);
        assert!(c.rho[c.at(0).unwrap()].abs() < 0.15);
        // and the mirrored construction peaks at +1
        let c = cross_correlation(&y, &x, &opts()).unwrap();
        assert!((c.rho[c.at(1).unwrap()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swapping_arguments_mirrors_lags() {
        let x = series("x", &noise(120, 4));
        let y = series("y", &noise(120, 5));
        let a = cross_correlation(&x, &y, &opts()).unwrap();
        let b = cross_correlation(&y, &x, &opts()).unwrap();
        for (k, lag) in a.lags.iter().enumerate() {
            let j = b.at(-lag).unwrap();
            assert!((a.rho[k] - b.rho[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn band_near_analytic_width() {
        let x = series("x", &noise(858, 6));
        let y = series("y", &noise(858, 7));
        let c = cross_correlation(&x, &y, &CcfOptions::new(1)).unwrap();
        let analytic = 1.96 / (858f64).sqrt();
        assert!(c
            .null_band
            .iter()
            .all(|b| (b / analytic - 1.0).abs() < 0.15 && *b > 0.0));
    }

    #[test]
    fn short_or_constant_inputs_rejected() {
        let x = series("x", &noise(30, 1));
        assert!(cross_correlation(&x, &x, &opts()).is_err());
        let c = series("c", &[1.0; 60]);
        let y = series("y", &noise(60, 2));
        assert!(cross_correlation(&y, &c, &opts()).is_err());
    }
}
