//! Business-date by word count matrix.
//!
//! # Binary cache layout (version 1, little-endian)
//!
//! ```text
//! magic    4 bytes   b"BSMX"
//! version  u8        1
//! n_dates  u32
//! n_words  u32
//! dates    n_dates x i32   days since 1970-01-01
//! totals   n_dates x u64   N(t) over the full pre-filter vocabulary
//! words    n_words x (u32 byte length, UTF-8 bytes)
//! counts   n_words x n_dates x u64, word-major
//! ```

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{tokenize, BusinessCalendar, MessageRecord};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

const MAGIC: &[u8; 4] = b"BSMX";
const VERSION: u8 = 1;
const SHARD: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DailyFrequencyMatrix {
    dates: Vec<NaiveDate>,
    words: Vec<String>,
    counts: Vec<u64>,
    totals: Vec<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub messages_used: usize,
    pub dropped_off_calendar: usize,
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch")
}

impl DailyFrequencyMatrix {
    /// `columns[w]` is the daily count series of `words[w]`.
    pub fn new(dates: Vec<NaiveDate>, words: Vec<String>, columns: Vec<Vec<u64>>, totals: Vec<u64>) -> Result<Self> {
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("dates must be strictly increasing"));
        }
        if totals.len() != dates.len() {
            return Err(Error::invalid("totals length differs from dates"));
        }
        if words.len() != columns.len() {
            return Err(Error::invalid("one count column per word required"));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = words.iter().find(|w| !seen.insert(w.as_str())) {
            return Err(Error::invalid(format!("duplicate word `{dup}`")));
        }
        let mut counts = Vec::with_capacity(words.len() * dates.len());
        for col in &columns {
            if col.len() != dates.len() {
                return Err(Error::invalid("count column length differs from dates"));
            }
            counts.extend_from_slice(col);
        }
        Ok(Self {
            dates,
            words,
            counts,
            totals,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn totals(&self) -> &[u64] {
        &self.totals
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    pub fn series(&self, w: usize) -> &[u64] {
        let n = self.dates.len();
        &self.counts[w * n..(w + 1) * n]
    }

    pub fn series_f64(&self, w: usize) -> Vec<f64> {
        self.series(w).iter().map(|&c| c as f64).collect()
    }

    pub fn totals_f64(&self) -> Vec<f64> {
        self.totals.iter().map(|&c| c as f64).collect()
    }

    pub fn count(&self, t: usize, w: usize) -> u64 {
        self.counts[w * self.dates.len() + t]
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    pub fn word_total(&self, w: usize) -> u64 {
        self.series(w).iter().sum()
    }

    /// Keeps the given word columns (in the given order); totals untouched.
    pub fn select_words(&self, indices: &[usize]) -> Self {
        let n = self.dates.len();
        let mut counts = Vec::with_capacity(indices.len() * n);
        for &w in indices {
            counts.extend_from_slice(self.series(w));
        }
        Self {
            dates: self.dates.clone(),
            words: indices.iter().map(|&w| self.words[w].clone()).collect(),
            counts,
            totals: self.totals.clone(),
        }
    }

    /// Keeps words by name, skipping names not in the vocabulary.
    pub fn select_named(&self, names: &[String]) -> Self {
        let index: HashMap<&str, usize> = self.words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let idx: Vec<usize> = names.iter().filter_map(|n| index.get(n.as_str()).copied()).collect();
        self.select_words(&idx)
    }

    /// Keeps dates in `range`.
    pub fn slice_dates(&self, range: std::ops::Range<usize>) -> Self {
        let n = self.dates.len();
        let mut counts = Vec::with_capacity(self.words.len() * range.len());
        for w in 0..self.words.len() {
            counts.extend_from_slice(&self.counts[w * n + range.start..w * n + range.end]);
        }
        Self {
            dates: self.dates[range.clone()].to_vec(),
            words: self.words.clone(),
            counts,
            totals: self.totals[range].to_vec(),
        }
    }

    /// Long-format CSV `date,word,count`, nonzero cells only, date-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,word,count\n");
        for (t, d) in self.dates.iter().enumerate() {
            for (w, word) in self.words.iter().enumerate() {
                let c = self.count(t, w);
                if c > 0 {
                    out.push_str(&format!("{d},{word},{c}\n"));
                }
            }
        }
        out
    }

    pub fn totals_csv(&self) -> String {
        let mut out = String::from("date,total\n");
        for (d, n) in self.dates.iter().zip(&self.totals) {
            out.push_str(&format!("{d},{n}\n"));
        }
        out
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION])?;
        w.write_all(&(self.dates.len() as u32).to_le_bytes())?;
        w.write_all(&(self.words.len() as u32).to_le_bytes())?;
        for d in &self.dates {
            let days = d.signed_duration_since(epoch()).num_days() as i32;
            w.write_all(&days.to_le_bytes())?;
        }
        for n in &self.totals {
            w.write_all(&n.to_le_bytes())?;
        }
        for word in &self.words {
            w.write_all(&(word.len() as u32).to_le_bytes())?;
            w.write_all(word.as_bytes())?;
        }
        for c in &self.counts {
            w.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_binary(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let bad = |m: &str| Error::invalid(format!("matrix cache: {m}"));
        let io = |e| Error::io("<matrix cache>", e);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let mut b1 = [0u8; 1];
        r.read_exact(&mut b1).map_err(io)?;
        if b1[0] != VERSION {
            return Err(bad(&format!("unsupported version {}", b1[0])));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4).map_err(io)?;
        let n_dates = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4).map_err(io)?;
        let n_words = u32::from_le_bytes(b4) as usize;
        let mut dates = Vec::with_capacity(n_dates);
        for _ in 0..n_dates {
            r.read_exact(&mut b4).map_err(io)?;
            let days = i32::from_le_bytes(b4);
            dates.push(epoch() + chrono::Duration::days(i64::from(days)));
        }
        let mut totals = Vec::with_capacity(n_dates);
        for _ in 0..n_dates {
            r.read_exact(&mut b8).map_err(io)?;
            totals.push(u64::from_le_bytes(b8));
        }
        let mut words = Vec::with_capacity(n_words);
        for _ in 0..n_words {
            r.read_exact(&mut b4).map_err(io)?;
            let mut bytes = vec![0u8; u32::from_le_bytes(b4) as usize];
            r.read_exact(&mut bytes).map_err(io)?;
            words.push(String::from_utf8(bytes).map_err(|_| bad("word is not UTF-8"))?);
        }
        let mut columns = Vec::with_capacity(n_words);
        for _ in 0..n_words {
            let mut col = Vec::with_capacity(n_dates);
            for _ in 0..n_dates {
                r.read_exact(&mut b8).map_err(io)?;
                col.push(u64::from_le_bytes(b8));
            }
            columns.push(col);
        }
        Self::new(dates, words, columns, totals)
    }
}

struct ShardCounts {
    words: HashMap<String, BTreeMap<usize, u64>>,
    totals: BTreeMap<usize, u64>,
    used: usize,
    dropped: usize,
}

fn count_shard(records: &[MessageRecord], calendar: &BusinessCalendar) -> ShardCounts {
    let mut out = ShardCounts {
        words: HashMap::new(),
        totals: BTreeMap::new(),
        used: 0,
        dropped: 0,
    };
    for rec in records {
        let Some(t) = calendar.index_of(rec.timestamp.date_naive()) else {
            out.dropped += 1;
            continue;
        };
        out.used += 1;
        let tokens = tokenize(&rec.text);
        *out.totals.entry(t).or_default() += tokens.len() as u64;
        for tok in tokens {
            *out.words.entry(tok).or_default().entry(t).or_default() += 1;
        }
    }
    out
}

/// Aggregates token counts per (calendar date, word).
///
/// Messages dated (in UTC) outside the calendar are dropped and counted.
/// Counting is sharded across threads; integer merging makes the result
/// identical to a sequential pass.
pub fn build_matrix(
    records: &[MessageRecord],
    calendar: &BusinessCalendar,
    exec: Execution,
) -> Result<(DailyFrequencyMatrix, BuildReport)> {
    if calendar.is_empty() {
        return Err(Error::invalid("calendar is empty"));
    }
    let shards: Vec<&[MessageRecord]> = records.chunks(SHARD).collect();
    let partials = par::map_slice(exec, &shards, |s| count_shard(s, calendar));

    let n = calendar.len();
    let mut columns: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut totals = vec![0u64; n];
    let mut report = BuildReport::default();
    for part in partials {
        report.messages_used += part.used;
        report.dropped_off_calendar += part.dropped;
        for (t, c) in part.totals {
            totals[t] += c;
        }
        for (word, cells) in part.words {
            let col = columns.entry(word).or_insert_with(|| vec![0; n]);
            for (t, c) in cells {
                col[t] += c;
            }
        }
    }
    if report.messages_used == 0 {
        return Err(Error::invalid("no messages fall on calendar dates"));
    }
    let (words, cols): (Vec<String>, Vec<Vec<u64>>) = columns.into_iter().unzip();
    let matrix = DailyFrequencyMatrix::new(calendar.dates().to_vec(), words, cols, totals)?;
    Ok((matrix, report))
}

/// Keeps words whose corpus total is strictly greater than `min_total`.
/// Daily totals are carried over unchanged.
pub fn filter_vocabulary(matrix: &DailyFrequencyMatrix, min_total: u64) -> Result<DailyFrequencyMatrix> {
    let keep: Vec<usize> = (0..matrix.n_words())
        .filter(|&w| matrix.word_total(w) > min_total)
        .collect();
    if keep.is_empty() {
        return Err(Error::degenerate(format!("no word occurs more than {min_total} times")));
    }
    Ok(matrix.select_words(&keep))
}

/// Default vocabulary threshold: 1000 occurrences over 858 business days,
/// scaled down proportionally for shorter corpora.
pub fn scaled_min_total(days: usize) -> u64 {
    if days >= 858 {
        1000
    } else {
        (1000 * days as u64).div_ceil(858)
    }
}
