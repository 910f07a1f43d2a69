use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bundling::{Method, SaSchedule};
use crate::error::{Error, Result};
use crate::extraction::{Criterion, MIN_SHUFFLES};
use crate::synth::SynthSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// JSON Lines messages; defaults to the synth stage output.
    pub messages: Option<PathBuf>,
    /// `date` CSV of business days; defaults to the synth calendar, else the
    /// weekdays spanned by the messages.
    pub calendar: Option<PathBuf>,
    /// `date,close`; defaults to the synth index.
    pub index: Option<PathBuf>,
    /// `date,pct_profitable,n_traders`; defaults to the synth series.
    pub performance: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            messages: None,
            calendar: None,
            index: None,
            performance: None,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Words must occur more than this many times; unset scales 1000 per
    /// 858 business days.
    pub min_total: Option<u64>,
    /// Fail on the first malformed message line.
    pub strict: bool,
    pub zipf_bootstrap: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            min_total: None,
            strict: false,
            zipf_bootstrap: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    pub n_shuffles: usize,
    /// External iff `lo < z < hi`.
    pub z_window: [f64; 2],
    /// When set, external iff `eta < eta_cut` instead of the z window.
    pub eta_cut: Option<f64>,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            n_shuffles: 1000,
            z_window: [-2.0, 2.0],
            eta_cut: None,
        }
    }
}

impl ExtractConfig {
    pub fn criterion(&self) -> Criterion {
        match self.eta_cut {
            Some(cut) => Criterion::EtaBelow(cut),
            None => Criterion::ZWindow {
                lo: self.z_window[0],
                hi: self.z_window[1],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BundleConfig {
    /// `eo`, `eo+kl` or `sa`.
    pub method: String,
    pub restarts: usize,
    pub n_shuffles: usize,
    pub sa_cooling: f64,
    pub sa_sweeps: usize,
    /// Also detect bundles on each half of the dates and report their NMI.
    pub stability: bool,
}

impl Default for BundleConfig {
    fn default() -> Self {
        Self {
            method: Method::EoKl.as_str().to_string(),
            restarts: 20,
            n_shuffles: 1000,
            sa_cooling: 0.995,
            sa_sweeps: 1,
            stability: false,
        }
    }
}

impl BundleConfig {
    pub fn method(&self) -> Result<Method> {
        Method::parse(&self.method).ok_or_else(|| {
            Error::config(
                "bundle.method",
                format!("unknown method `{}`; use eo, eo+kl or sa", self.method),
            )
        })
    }

    pub fn schedule(&self) -> SaSchedule {
        SaSchedule {
            cooling: self.sa_cooling,
            sweeps: self.sa_sweeps,
            ..SaSchedule::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub max_lag: usize,
    pub n_null: usize,
    /// Box-kernel width in business days for the report overlays.
    pub smooth_window: usize,
    /// 1-based ids of bundle one and bundle two.
    pub pair: [usize; 2],
    pub adf_lags: usize,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            max_lag: 5,
            n_null: 1000,
            smooth_window: 21,
            pair: [1, 2],
            adf_lags: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mandatory, here or on the command line.
    pub seed: Option<u64>,
    pub paths: PathsConfig,
    pub ingest: IngestConfig,
    pub extract: ExtractConfig,
    pub bundle: BundleConfig,
    pub analyze: AnalyzeConfig,
    /// Generator settings; its `seed` is replaced by the run seed.
    pub synth: SynthSpec,
}

fn toml_error(e: toml::de::Error) -> Error {
    let field = e.message().split('`').nth(1).unwrap_or("config").to_string();
    Error::config(field, e.message().trim().to_string())
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(toml_error)
    }

    /// Reads a TOML file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.paths.messages,
            &mut cfg.paths.calendar,
            &mut cfg.paths.index,
            &mut cfg.paths.performance,
        ]
        .into_iter()
        .flatten()
        {
            rebase(base, p);
        }
        rebase(base, &mut cfg.paths.out);
        Ok(cfg)
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::config("seed", "no seed given; set `seed` in the config or pass --seed"))
    }

    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        if self.extract.n_shuffles < MIN_SHUFFLES {
            return Err(Error::config(
                "extract.n_shuffles",
                format!("must be at least {MIN_SHUFFLES}"),
            ));
        }
        let [lo, hi] = self.extract.z_window;
        if !(lo < hi) {
            return Err(Error::config("extract.z_window", "needs lo < hi"));
        }
        if let Some(c) = self.extract.eta_cut {
            if !(c > 0.0) {
                return Err(Error::config("extract.eta_cut", "must be positive"));
            }
        }
        self.bundle.method()?;
        if self.bundle.restarts == 0 {
            return Err(Error::config("bundle.restarts", "must be at least 1"));
        }
        if self.bundle.n_shuffles < MIN_SHUFFLES {
            return Err(Error::config(
                "bundle.n_shuffles",
                format!("must be at least {MIN_SHUFFLES}"),
            ));
        }
        if !(self.bundle.sa_cooling > 0.0 && self.bundle.sa_cooling < 1.0) {
            return Err(Error::config("bundle.sa_cooling", "must lie in (0, 1)"));
        }
        if self.bundle.sa_sweeps == 0 {
            return Err(Error::config("bundle.sa_sweeps", "must be at least 1"));
        }
        if self.analyze.n_null < MIN_SHUFFLES {
            return Err(Error::config(
                "analyze.n_null",
                format!("must be at least {MIN_SHUFFLES}"),
            ));
        }
        if self.analyze.smooth_window == 0 {
            return Err(Error::config("analyze.smooth_window", "must be at least 1"));
        }
        let [a, b] = self.analyze.pair;
        if a == 0 || b == 0 || a == b {
            return Err(Error::config("analyze.pair", "needs two distinct 1-based bundle ids"));
        }
        self.synth.validate()
    }

    /// Canonical JSON used for the manifest digest; the output directory
    /// is left out.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.paths.out = PathBuf::new();
        serde_json::to_string(&c).expect("config serializes")
    }
}
