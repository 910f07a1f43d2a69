//! Word-bundle analytics for time-stamped message corpora.
//!
//! The crate turns a stream of messages into a business-day word-frequency
//! matrix, separates words whose daily usage tracks overall message volume
//! from words that move on their own, groups the latter into bundles by
//! modularity maximisation over a z-scored correlation network, and relates
//! bundle activity to an external daily index and a daily performance series.
//!
//! Every stochastic routine draws randomness through [`stats::PermutationPlan`]
//! derived streams, so results are bit-identical for a given seed regardless
//! of thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundling;
pub mod corpus;
pub mod error;
pub mod extraction;
pub mod par;
pub mod pipeline;
pub mod series;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use par::Execution;
