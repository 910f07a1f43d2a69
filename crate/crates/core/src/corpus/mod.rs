//! Message ingestion: parsing, tokenisation, the daily frequency matrix and
//! corpus-level diagnostics.

mod calendar;
mod matrix;
mod message;
mod tokenize;
mod zipf;

pub use calendar::BusinessCalendar;
pub use matrix::{build_matrix, filter_vocabulary, scaled_min_total, BuildReport, DailyFrequencyMatrix};
pub use message::{parse_messages, LineError, MessageRecord, ParsedMessages};
pub use tokenize::tokenize;
pub use zipf::{fit_counts, zipf_diagnostic, ZipfFit, ZipfOptions};
