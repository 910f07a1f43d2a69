//! Routine versus external decomposition of word frequencies and the
//! shuffle-null classification built on it.

mod classify;
mod decompose;
mod stopwords;

pub use classify::{
    classifications_csv, classify, ClassifyOptions, Criterion, Label, WordClassification, MIN_SHUFFLES,
};
pub use decompose::{decompose, eta_ratio, Decomposition};
pub use stopwords::{english_stopwords, stopword_diagnostic, StopwordReport};
