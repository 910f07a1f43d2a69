use super::aligned::{align, first_difference, AlignedSeries};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::stats::{derive_seed, fisher_ci, ols_with_intercept, pearson, quantile, OlsFit, PermutationPlan};

pub const MIN_ATTENTION_LEN: usize = 30;

/// `A(t) = |gamma1(t) - gamma2(t)|`.
pub fn attention_series(gamma1: &AlignedSeries, gamma2: &AlignedSeries) -> Result<AlignedSeries> {
    if gamma1.dates() != gamma2.dates() {
        return Err(Error::invalid("attention inputs are not aligned"));
    }
    let v = gamma1
        .values()
        .iter()
        .zip(gamma2.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    AlignedSeries::new("attention", gamma1.dates().to_vec(), v)
}

#[derive(Debug, Clone)]
pub struct AttentionResult {
    /// `corr(dA, dp)` on first differences.
    pub r: f64,
    /// Fisher-transform interval; `None` when `|r| = 1`.
    pub ci: Option<(f64, f64)>,
    /// `level` quantile of `|r|` under independent permutations.
    pub null_band: f64,
    pub n: usize,
    /// `dp ~ 1 + dA + d(controls)...`
    pub regression: OlsFit,
    pub regressors: Vec<String>,
    pub theta_a: AlignedSeries,
    pub theta_p: AlignedSeries,
}

impl AttentionResult {
    pub fn regression_text(&self) -> String {
        let mut out = format!(
            "response d_performance  n={}  dof={}  r2={:.6}\n{:<16} {:>14} {:>14} {:>10} {:>12}\n",
            self.regression.n,
            self.regression.dof,
            self.regression.r_squared(),
            "term",
            "coef",
            "std_err",
            "t",
            "p"
        );
        let names = std::iter::once("intercept").chain(self.regressors.iter().map(String::as_str));
        for (j, name) in names.enumerate() {
            out.push_str(&format!(
                "{:<16} {:>14.6e} {:>14.6e} {:>10.4} {:>12.4e}\n",
                name,
                self.regression.coefficients[j],
                self.regression.std_errors[j],
                self.regression.t_stats[j],
                self.regression.p_values[j]
            ));
        }
        if let (Some(f), Some(p)) = (self.regression.f_stat, self.regression.f_p) {
            out.push_str(&format!("F {f:.6} p {p:.4e}\n"));
        }
        out
    }
}

/// Correlates daily changes of attention and performance and regresses the
/// latter on the former plus the daily changes of each control level.
pub fn attention_performance(
    attention: &AlignedSeries,
    performance: &AlignedSeries,
    controls: &[&AlignedSeries],
    n_null: usize,
    seed: u64,
    exec: Execution,
) -> Result<AttentionResult> {
    let mut all = vec![attention, performance];
    all.extend_from_slice(controls);
    let al = align(&all)?;
    let n_levels = al.series[0].len();
    if n_levels < MIN_ATTENTION_LEN + 1 {
        return Err(Error::invalid(format!(
            "attention study needs {} aligned days, got {n_levels}",
            MIN_ATTENTION_LEN + 1
        )));
    }
    let diffs: Vec<AlignedSeries> = al.series.iter().map(first_difference).collect::<Result<_>>()?;
    let ta = diffs[0].values();
    let tp = diffs[1].values();
    let r = pearson(ta, tp)?;
    let n = ta.len();
    let ci = if r.abs() < 1.0 {
        Some(fisher_ci(r, n, 0.95)?)
    } else {
        None
    };

    let null_band = if n_null > 0 {
        let pa = PermutationPlan::new(derive_seed(seed, 0), n_null);
        let pp = PermutationPlan::new(derive_seed(seed, 1), n_null);
        let mut null: Vec<f64> = map_indexed(exec, n_null, |k| {
            pearson(&pa.permute(ta, k), &pp.permute(tp, k)).map_or(0.0, f64::abs)
        });
        null.sort_by(f64::total_cmp);
        quantile(&null, 0.95)
    } else {
        f64::NAN
    };

    let mut cols: Vec<&[f64]> = vec![ta];
    let mut regressors = vec!["d_attention".to_string()];
    for d in &diffs[2..] {
        cols.push(d.values());
        regressors.push(d.name.clone());
    }
    let regression = ols_with_intercept(tp, &cols)?;
    Ok(AttentionResult {
        r,
        ci,
        null_band,
        n,
        regression,
        regressors,
        theta_a: diffs[0].clone(),
        theta_p: diffs[1].clone(),
    })
}
