use crate::error::{Error, Result};

/// Split of one word's daily counts into a volume-proportional part and a
/// residual.
///
/// `routinary(t) = <f> * N(t) / <N>` with both means taken over days where
/// `N(t) > 0`; `external = f - routinary`. Days with `N(t) == 0` carry zero
/// in both parts and are excluded from the standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub routinary: Vec<f64>,
    pub external: Vec<f64>,
    pub sigma_r: f64,
    pub sigma_ext: f64,
}

impl Decomposition {
    pub fn is_degenerate(&self) -> bool {
        self.sigma_r == 0.0 && self.sigma_ext == 0.0
    }
}

pub(crate) fn pop_std_masked(x: &[f64], mask: &[bool]) -> f64 {
    let (mut n, mut s) = (0usize, 0.0);
    for (v, m) in x.iter().zip(mask) {
        if *m {
            n += 1;
            s += v;
        }
    }
    let mean = s / n as f64;
    let ss: f64 = x
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|(v, _)| (v - mean) * (v - mean))
        .sum();
    (ss / n as f64).sqrt()
}

pub fn decompose(word_series: &[f64], totals: &[f64]) -> Result<Decomposition> {
    if word_series.len() != totals.len() {
        return Err(Error::invalid(format!(
            "series length {} differs from totals length {}",
            word_series.len(),
            totals.len()
        )));
    }
    let mask: Vec<bool> = totals.iter().map(|n| *n > 0.0).collect();
    let active = mask.iter().filter(|m| **m).count();
    if active == 0 {
        return Err(Error::degenerate("every day has zero total words"));
    }
    if active < 2 {
        return Err(Error::invalid("need at least two days with words"));
    }
    let mean_f = word_series
        .iter()
        .zip(&mask)
        .filter(|(_, m)| **m)
        .map(|(f, _)| f)
        .sum::<f64>()
        / active as f64;
    let mean_n = totals.iter().filter(|n| **n > 0.0).sum::<f64>() / active as f64;

    let routinary: Vec<f64> = totals
        .iter()
        .map(|n| if *n > 0.0 { mean_f * n / mean_n } else { 0.0 })
        .collect();
    let external: Vec<f64> = word_series
        .iter()
        .zip(&routinary)
        .zip(&mask)
        .map(|((f, r), m)| if *m { f - r } else { 0.0 })
        .collect();
    let sigma_r = pop_std_masked(&routinary, &mask);
    let sigma_ext = pop_std_masked(&external, &mask);
    Ok(Decomposition {
        routinary,
        external,
        sigma_r,
        sigma_ext,
    })
}

/// `sigma_r / sigma_ext`; infinite for a purely proportional word.
pub fn eta_ratio(d: &Decomposition) -> Result<f64> {
    if d.is_degenerate() {
        return Err(Error::degenerate("both factor deviations are zero"));
    }
    if d.sigma_ext == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(d.sigma_r / d.sigma_ext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn proportional_word_has_no_external_part() {
        let d = decompose(&[10.0, 20.0, 10.0, 20.0], &[100.0, 200.0, 100.0, 200.0]).unwrap();
        assert_eq!(d.routinary, [10.0, 20.0, 10.0, 20.0]);
        assert!(d.external.iter().all(|e| *e == 0.0));
        assert_eq!(d.sigma_ext, 0.0);
        assert_eq!(eta_ratio(&d).unwrap(), f64::INFINITY);
    }

    #[test]
    fn counter_cyclical_word_hand_values() {
        // <f> = 15, <N> = 150: f^r = N/10 = [10,20,10,20], f^ext = [10,-10,10,-10]
        let d = decompose(&[20.0, 10.0, 20.0, 10.0], &[100.0, 200.0, 100.0, 200.0]).unwrap();
        assert_eq!(d.routinary, [10.0, 20.0, 10.0, 20.0]);
        assert_eq!(d.external, [10.0, -10.0, 10.0, -10.0]);
        assert_eq!(d.sigma_r, 5.0);
        assert_eq!(d.sigma_ext, 10.0);
        assert_eq!(eta_ratio(&d).unwrap(), 0.5);
    }

    #[test]
    fn constant_inputs_are_degenerate() {
        let d = decompose(&[4.0; 5], &[50.0; 5]).unwrap();
        assert!(d.is_degenerate());
        assert!(matches!(eta_ratio(&d), Err(Error::Degenerate(_))));
    }

    #[test]
    fn flat_volume_gives_zero_eta() {
        let d = decompose(&[1.0, 5.0, 2.0], &[50.0; 3]).unwrap();
        assert_eq!(d.sigma_r, 0.0);
        assert_eq!(eta_ratio(&d).unwrap(), 0.0);
    }

    #[test]
    fn zero_total_days_are_skipped() {
        let d = decompose(&[20.0, 0.0, 10.0, 20.0, 10.0], &[100.0, 0.0, 200.0, 100.0, 200.0]).unwrap();
        assert_eq!(d.sigma_r, 5.0);
        assert_eq!(d.sigma_ext, 10.0);
        assert!(decompose(&[1.0, 2.0], &[0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn parts_add_up(
            pairs in prop::collection::vec((0u32..500, 1u32..5000), 2..80)
        ) {
            let f: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let n: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            let d = decompose(&f, &n).unwrap();
            for t in 0..f.len() {
                let s = d.routinary[t] + d.external[t];
                prop_assert!((s - f[t]).abs() <= 1e-12 * f[t].abs().max(1.0));
            }
        }

        #[test]
        fn eta_is_scale_invariant(
            pairs in prop::collection::vec((0u32..500, 1u32..5000), 3..60),
            k in 0.01f64..100.0,
        ) {
            let f: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
            let n: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
            let d = decompose(&f, &n).unwrap();
            if let Ok(eta) = eta_ratio(&d) {
                if eta.is_finite() && d.sigma_ext > 1e-9 {
                    let fs: Vec<f64> = f.iter().map(|v| v * k).collect();
                    let ns: Vec<f64> = n.iter().map(|v| v * k).collect();
                    let eta2 = eta_ratio(&decompose(&fs, &ns).unwrap()).unwrap();
                    prop_assert!((eta - eta2).abs() <= 1e-9 * eta.max(1.0));
                }
            }
        }
    }
}
