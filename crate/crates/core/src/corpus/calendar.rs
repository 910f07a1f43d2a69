use std::io::BufRead;

use chrono::{Datelike, NaiveDate, Weekday};

use crate::error::{Error, Result};

/// Strictly increasing set of business dates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BusinessCalendar {
    dates: Vec<NaiveDate>,
}

impl BusinessCalendar {
    pub fn new(mut dates: Vec<NaiveDate>) -> Result<Self> {
        dates.sort();
        dates.dedup();
        if dates.is_empty() {
            return Err(Error::invalid("calendar is empty"));
        }
        Ok(Self { dates })
    }

    /// Monday to Friday between `start` and `end` inclusive.
    pub fn weekdays(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        let dates = start
            .iter_days()
            .take_while(|d| *d <= end)
            .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
            .collect();
        Self::new(dates)
    }

    /// `n` consecutive weekdays starting at (or after) `start`.
    pub fn weekdays_from(start: NaiveDate, n: usize) -> Result<Self> {
        let dates = start
            .iter_days()
            .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
            .take(n)
            .collect();
        Self::new(dates)
    }

    /// One ISO date per line; blank lines and a leading `date` header are
    /// ignored.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut dates = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<calendar>", e))?;
            let field = line.split(',').next().unwrap_or("").trim();
            if field.is_empty() || (i == 0 && field.eq_ignore_ascii_case("date")) {
                continue;
            }
            let d = NaiveDate::parse_from_str(field, "%Y-%m-%d").map_err(|e| Error::Malformed {
                line: i + 1,
                message: format!("bad calendar date `{field}`: {e}"),
            })?;
            dates.push(d);
        }
        Self::new(dates)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("date\n");
        for d in &self.dates {
            out.push_str(&d.to_string());
            out.push('\n');
        }
        out
    }
}
