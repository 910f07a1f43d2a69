use super::aligned::AlignedSeries;
use crate::error::{Error, Result};

/// Box-kernel average over `window` consecutive days centred on each day
/// (`(window - 1) / 2` before, `window / 2` after), truncated at the edges.
pub fn kernel_smooth(s: &AlignedSeries, window: usize) -> Result<AlignedSeries> {
    if window == 0 {
        return Err(Error::invalid("smoothing window must be at least 1"));
    }
    let v = s.values();
    let n = v.len();
    let before = (window - 1) / 2;
    let after = window / 2;
    let out = (0..n)
        .map(|t| {
            let lo = t.saturating_sub(before);
            let hi = (t + after + 1).min(n);
            if window == 1 {
                v[t]
            } else {
                (lo..hi).map(|i| v[i]).sum::<f64>() / (hi - lo) as f64
            }
        })
        .collect();
    AlignedSeries::new(format!("smooth_{}", s.name), s.dates().to_vec(), out)
}

#[cfg(test)]
mod tests {
    use super::super::aligned::tests::series;
    use super::*;

    #[test]
    fn constant_unchanged_and_unit_window_identity() {
        let c = series("c", &[2.5; 40]);
        assert_eq!(kernel_smooth(&c, 21).unwrap().values(), c.values());
        let v: Vec<f64> = (0..30).map(|i| f64::from(i * i % 7)).collect();
        let s = series("v", &v);
        assert_eq!(kernel_smooth(&s, 1).unwrap().values(), s.values());
    }

    #[test]
    fn impulse_spreads_to_plateau() {
        let mut v = vec![0.0; 61];
        v[30] = 1.0;
        let out = kernel_smooth(&series("i", &v), 21).unwrap();
        for (t, x) in out.values().iter().enumerate() {
            let expected = if (20..=40).contains(&t) { 1.0 / 21.0 } else { 0.0 };
            assert!((x - expected).abs() < 1e-15, "{t}");
        }
    }

    #[test]
    fn edges_average_available_days() {
        let out = kernel_smooth(&series("r", &[1.0, 2.0, 3.0, 4.0, 5.0]), 3).unwrap();
        assert_eq!(out.values(), [1.5, 2.0, 3.0, 4.0, 4.5]);
        assert!(kernel_smooth(&series("r", &[1.0]), 0).is_err());
    }
}
