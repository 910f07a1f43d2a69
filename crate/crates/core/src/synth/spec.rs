use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub size: usize,
    /// Index lead in days (0 same-day, 1 next-day); `None` marks the
    /// residual bundle.
    pub lag: Option<usize>,
    /// Sign of the coupling, `1.0` or `-1.0`.
    #[serde(default = "one")]
    pub polarity: f64,
}

fn one() -> f64 {
    1.0
}

impl BundleSpec {
    pub fn coupled(size: usize, lag: usize, polarity: f64) -> Self {
        Self {
            size,
            lag: Some(lag),
            polarity,
        }
    }

    pub fn residual(size: usize) -> Self {
        Self {
            size,
            lag: None,
            polarity: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub days: usize,
    pub start: NaiveDate,
    pub n_routinary: usize,
    pub top_frequency: f64,
    pub zipf_exponent: f64,
    pub n_rare: usize,
    pub rare_frequency: f64,
    pub volume_sd: f64,
    pub bundles: Vec<BundleSpec>,
    pub external_mean: f64,
    pub burstiness: f64,
    /// 1 gives Poisson counts, 0 the rounded means.
    pub noise: f64,
    pub index_mean: f64,
    pub index_persistence: f64,
    pub index_sigma: f64,
    pub beta: f64,
    pub performance_scale: f64,
    pub performance_start: f64,
    pub traders_mean: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            days: 858,
            start: NaiveDate::from_ymd_opt(2007, 1, 3).expect("valid date"),
            n_routinary: 200,
            top_frequency: 500.0,
            zipf_exponent: 0.87,
            n_rare: 300,
            rare_frequency: 0.5,
            volume_sd: 0.5,
            bundles: vec![BundleSpec::coupled(20, 0, 1.0), BundleSpec::coupled(20, 1, -1.0)],
            external_mean: 30.0,
            burstiness: 0.6,
            noise: 1.0,
            index_mean: 20.0,
            index_persistence: 0.98,
            index_sigma: 0.06,
            beta: 0.2,
            performance_scale: 0.3,
            performance_start: 55.0,
            traders_mean: 150.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Same-day and next-day bundles next to a residual bundle, so each
    /// coupled share depends on a single index day.
    pub fn lead_lag(seed: u64) -> Self {
        Self {
            bundles: vec![
                BundleSpec::coupled(20, 0, 1.0),
                BundleSpec::coupled(20, 1, -1.0),
                BundleSpec::residual(30),
            ],
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::config(format!("synth.{field}"), msg));
        if self.days < 120 {
            return bad("days", "must be at least 120");
        }
        if self.n_routinary == 0 {
            return bad("n_routinary", "must be positive");
        }
        if self.bundles.len() < 2 {
            return bad("bundles", "need at least two bundles");
        }
        let mut residual = 0;
        for (i, b) in self.bundles.iter().enumerate() {
            if b.size < 2 {
                return bad(&format!("bundles[{i}].size"), "must be at least 2");
            }
            match b.lag {
                Some(0 | 1) => {}
                Some(_) => return bad(&format!("bundles[{i}].lag"), "must be 0 or 1"),
                None => residual += 1,
            }
            if b.polarity != 1.0 && b.polarity != -1.0 {
                return bad(&format!("bundles[{i}].polarity"), "must be 1 or -1");
            }
        }
        if residual > 1 {
            return bad("bundles", "at most one residual bundle");
        }
        if self.bundles.iter().filter(|b| b.lag.is_some()).count() < 2 {
            return bad("bundles", "need at least two coupled bundles");
        }
        if !(0.0..1.0).contains(&self.burstiness) {
            return bad("burstiness", "must lie in [0, 1)");
        }
        if residual == 1 {
            let total = self.bundles.iter().map(|b| b.size as f64).sum::<f64>();
            let swing: f64 = self
                .bundles
                .iter()
                .filter(|b| b.lag.is_some())
                .map(|b| b.size as f64 / total * self.burstiness)
                .sum();
            let res = self
                .bundles
                .iter()
                .find(|b| b.lag.is_none())
                .map_or(0.0, |b| b.size as f64 / total);
            if swing >= res {
                return bad("bundles", "residual bundle too small to absorb the coupled swings");
            }
        }
        let positive = [
            ("top_frequency", self.top_frequency),
            ("external_mean", self.external_mean),
            ("index_mean", self.index_mean),
            ("index_sigma", self.index_sigma),
            ("traders_mean", self.traders_mean),
            ("performance_scale", self.performance_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name, "must be positive");
            }
        }
        if !(self.zipf_exponent >= 0.0) || !(self.rare_frequency >= 0.0) || !(self.volume_sd >= 0.0) {
            return bad(
                "zipf_exponent",
                "exponent, rare_frequency and volume_sd must be nonnegative",
            );
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return bad("noise", "must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.index_persistence) {
            return bad("index_persistence", "must lie in [0, 1)");
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return bad("beta", "must lie in [-1, 1]");
        }
        if self.top_frequency * (self.n_routinary as f64).powf(-self.zipf_exponent) < 1.0 {
            return bad(
                "top_frequency",
                "least frequent routinary word must average at least 1 per day",
            );
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        SynthSpec::default().validate().unwrap();
        SynthSpec::lead_lag(3).validate().unwrap();
    }

    #[test]
    fn invalid_specs_name_the_field() {
        let s = SynthSpec {
            days: 100,
            ..Default::default()
        };
        assert!(matches!(s.validate(), Err(Error::Config { field, .. }) if field == "synth.days"));
        let mut s = SynthSpec::default();
        s.bundles[1].lag = Some(2);
        assert!(s.validate().is_err());
        s.bundles[1] = BundleSpec::coupled(1, 0, 1.0);
        assert!(s.validate().is_err());
        let s = SynthSpec {
            bundles: vec![
                BundleSpec::coupled(20, 0, 1.0),
                BundleSpec::coupled(20, 1, 1.0),
                BundleSpec::residual(2),
            ],
            ..Default::default()
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let s = SynthSpec::lead_lag(9);
        let text = toml::to_string(&s).unwrap();
        let back: SynthSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, s);
        let partial: SynthSpec = toml::from_str("days = 300\nseed = 4\n").unwrap();
        assert_eq!(partial.days, 300);
        assert_eq!(partial.bundles.len(), 2);
    }
}
