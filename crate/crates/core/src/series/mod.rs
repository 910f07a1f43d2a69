//! Date-aligned daily series and the analyses run on them.

mod aligned;
mod attention;
mod ccf;
mod dominance;
mod gamma;
mod granger;
mod io;
mod smooth;
mod unit_root;

pub use aligned::{align, first_difference, zscore_series, AlignedSeries, Alignment};
pub use attention::{attention_performance, attention_series, AttentionResult};
pub use ccf::{ccf_csv, cross_correlation, CcfOptions, CcfResult};
pub use dominance::{dominance_table, ContingencyResult, DominanceDay, DominanceResult};
pub use gamma::bundle_relative_frequency;
pub use granger::{granger_test, GrangerResult};
pub use io::{read_index_csv, read_performance_csv, series_csv, PerformanceSeries};
pub use smooth::kernel_smooth;
pub use unit_root::{adf_test, ar1_coefficient, critical_values, mackinnon_p, pp_test, AdfLags, UnitRootResult};
