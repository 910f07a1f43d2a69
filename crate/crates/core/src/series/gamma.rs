use std::collections::HashMap;

use super::aligned::AlignedSeries;
use crate::corpus::DailyFrequencyMatrix;
use crate::error::{Error, Result};

/// Share of each bundle in the daily count of all extracted words.
///
/// `matrix` holds the extracted words; `words[i]` belongs to bundle
/// `assignment[i]` (zero-based). Words of the matrix missing from `words`
/// still count in the denominator. Days whose denominator is zero are
/// dropped.
pub fn bundle_relative_frequency(
    matrix: &DailyFrequencyMatrix,
    words: &[String],
    assignment: &[usize],
    n_bundles: usize,
) -> Result<Vec<AlignedSeries>> {
    if words.len() != assignment.len() {
        return Err(Error::invalid("words and assignment differ in length"));
    }
    let index: HashMap<&str, usize> = words.iter().zip(assignment).map(|(w, c)| (w.as_str(), *c)).collect();
    if let Some(c) = assignment.iter().find(|c| **c >= n_bundles) {
        return Err(Error::invalid(format!("bundle id {c} out of range")));
    }
    let t = matrix.n_dates();
    let mut denom = vec![0u64; t];
    let mut num = vec![vec![0u64; t]; n_bundles];
    let mut members = vec![0usize; n_bundles];
    for (w, word) in matrix.words().iter().enumerate() {
        let series = matrix.series(w);
        let bundle = index.get(word.as_str()).copied();
        if let Some(b) = bundle {
            members[b] += 1;
        }
        for d in 0..t {
            denom[d] += series[d];
            if let Some(b) = bundle {
                num[b][d] += series[d];
            }
        }
    }
    for (b, m) in members.iter().enumerate() {
        if *m == 0 {
            eprintln!(
                "warning: bundle {} has no words in the matrix; its share is zero",
                b + 1
            );
        }
    }
    let keep: Vec<usize> = (0..t).filter(|d| denom[*d] > 0).collect();
    if keep.len() < t {
        eprintln!("warning: dropping {} days without extracted words", t - keep.len());
    }
    let dates: Vec<_> = keep.iter().map(|d| matrix.dates()[*d]).collect();
    (0..n_bundles)
        .map(|b| {
            let v = keep.iter().map(|d| num[b][*d] as f64 / denom[*d] as f64).collect();
            AlignedSeries::new(format!("gamma_{}", b + 1), dates.clone(), v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn m(cols: Vec<Vec<u64>>) -> DailyFrequencyMatrix {
        let t = cols[0].len();
        let d0 = NaiveDate::from_ymd_opt(2007, 1, 1).unwrap();
        let dates = (0..t).map(|i| d0 + chrono::Days::new(i as u64)).collect();
        let totals = (0..t).map(|d| cols.iter().map(|c| c[d]).sum::<u64>() + 100).collect();
        let words = (0..cols.len()).map(|i| format!("w{i}")).collect();
        DailyFrequencyMatrix::new(dates, words, cols, totals).unwrap()
    }

    #[test]
    fn shares_sum_to_one_over_full_partition() {
        let mat = m(vec![vec![10, 0, 4], vec![20, 0, 6], vec![70, 0, 0]]);
        let words: Vec<String> = (0..3).map(|i| format!("w{i}")).collect();
        let g = bundle_relative_frequency(&mat, &words, &[0, 0, 1], 2).unwrap();
        assert_eq!(g[0].len(), 2);
        assert!((g[0].values()[0] - 0.3).abs() < 1e-15);
        assert!((g[1].values()[0] - 0.7).abs() < 1e-15);
        for d in 0..2 {
            assert!((g[0].values()[d] + g[1].values()[d] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_bundle_is_zero() {
        let mat = m(vec![vec![1, 2], vec![3, 4]]);
        let words: Vec<String> = vec!["w0".into(), "w1".into()];
        let g = bundle_relative_frequency(&mat, &words, &[0, 0], 2).unwrap();
        assert!(g[1].values().iter().all(|v| *v == 0.0));
    }
}
