//! Synthetic corpora with planted routinary words, coupled word bundles, a
//! volatility-like index and a performance series.
//!
//! Daily message volume `V(t)` is i.i.d. lognormal with mean one. Routinary
//! words draw `Poisson(f_j V(t))` with `f_j = top_frequency * j^-zipf_exponent`.
//! Rare words draw `Poisson(rare_frequency V(t))` and fall below the
//! vocabulary threshold.
//!
//! Extracted words share a constant daily mass split across bundles. A
//! coupled bundle `b` with lag `l` and polarity `s` has raw share
//! `g_b (1 + burstiness * s * tanh(z(t + l)))`, where `z` is the standardized
//! log index. A residual bundle, when present, absorbs whatever the coupled
//! bundles leave, so each coupled share is exact; without one the shares are
//! renormalized. Word `j` of bundle `b` then draws
//! `Poisson(mass * share_b(t) * w_j)` with within-bundle weights `w_j`.
//!
//! The log index follows an AR(1) around `ln(index_mean)` with skewed
//! innovations `Exp(1) - 1`. The performance series changes by
//! `scale * (beta * dA / sd(dA) + sqrt(1 - beta^2) * e)`, where `dA` are the
//! daily changes of `|gamma_1 - gamma_2|` computed from the first two
//! bundles' realized counts.

mod emit;
mod generate;
mod spec;

pub use emit::{write_messages, MessageLayout};
pub use generate::{
    bundle_shares, gen_corpus, gen_external_bundle, gen_index, gen_routinary_word, GroundTruth, SynthCorpus, TruthLabel,
};
pub use spec::{BundleSpec, SynthSpec};
