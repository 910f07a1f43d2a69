//! Correlation networks over extracted words and their partition into
//! bundles by modularity maximisation.

mod diagnostics;
mod eo;
mod graph;
mod kl;
mod network;
mod sa;
mod stability;

pub use diagnostics::{bundle_diagnostics, bundle_summary, bundles_csv, summary_csv, BundleDiagnostics, BundleSummary};
pub use eo::{detect_bundles_eo, EoOptions};
pub use graph::{modularity, normalize_labels, BundlePartition, Method, WeightedGraph};
pub use kl::refine_kl;
pub use network::{pairwise_network, CorrelationNetwork, NetworkOptions};
pub use sa::{detect_bundles_sa, SaSchedule};
pub use stability::{nmi, stability_check, StabilityOptions, StabilityReport};

use crate::error::Result;
use crate::par::Execution;

/// Bundle detection settings shared by the pipeline stages.
#[derive(Debug, Clone, Copy)]
pub struct BundleOptions {
    pub method: Method,
    pub restarts: usize,
    pub seed: u64,
    pub schedule: SaSchedule,
    pub exec: Execution,
}

impl BundleOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            method: Method::EoKl,
            restarts: 20,
            seed,
            schedule: SaSchedule::default(),
            exec: Execution::default(),
        }
    }
}

/// Runs the configured detector on `graph`.
pub fn detect_bundles(graph: &WeightedGraph, opts: &BundleOptions) -> Result<BundlePartition> {
    match opts.method {
        Method::Eo | Method::EoKl => {
            let eo = EoOptions {
                restarts: opts.restarts,
                seed: opts.seed,
                exec: opts.exec,
            };
            let p = detect_bundles_eo(graph, &eo)?;
            if opts.method == Method::EoKl {
                refine_kl(graph, &p)
            } else {
                Ok(p)
            }
        }
        Method::Sa => detect_bundles_sa(graph, &opts.schedule, opts.seed),
    }
}
