//! Stage orchestration: configuration, manifests, atomic artifact writes
//! and the static SVG report.

mod config;
mod manifest;
mod stages;
mod svg;

pub use config::{AnalyzeConfig, BundleConfig, ExtractConfig, IngestConfig, PathsConfig, RunConfig};
pub use manifest::{artifact_key, sha256_hex, write_atomic, Manifest, StageIo, StageRecord, MANIFEST_FILE};
pub use stages::{run_stage, Stage};
pub use svg::{ccf_chart, dual_series_chart, scatter_fit_chart, CcfRow};
