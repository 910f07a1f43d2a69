use std::collections::HashSet;

use super::classify::{Label, WordClassification};
use crate::error::{Error, Result};

const STOPWORDS_EN: &str = include_str!("../../data/stopwords_en.txt");

/// Bundled English stop-word list, one entry per line.
pub fn english_stopwords() -> Vec<&'static str> {
    STOPWORDS_EN.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StopwordReport {
    /// Stop words found in the classified vocabulary.
    pub present: usize,
    pub routinary: usize,
    pub fraction: f64,
}

/// Share of in-vocabulary stop words that carry the routinary label.
pub fn stopword_diagnostic<S: AsRef<str>>(
    classifications: &[WordClassification],
    stopwords: &[S],
) -> Result<StopwordReport> {
    if stopwords.is_empty() {
        return Err(Error::invalid("stop-word list is empty"));
    }
    let set: HashSet<&str> = stopwords.iter().map(AsRef::as_ref).collect();
    let mut present = 0;
    let mut routinary = 0;
    for c in classifications.iter().filter(|c| set.contains(c.word.as_str())) {
        present += 1;
        if c.label == Label::Routinary {
            routinary += 1;
        }
    }
    if present == 0 {
        return Err(Error::degenerate("no stop word occurs in the vocabulary"));
    }
    Ok(StopwordReport {
        present,
        routinary,
        fraction: routinary as f64 / present as f64,
    })
}
