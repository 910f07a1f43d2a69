use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Real values on strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSeries {
    pub name: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl AlignedSeries {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if dates.len() != values.len() {
            return Err(Error::invalid(format!(
                "series `{name}`: {} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "series `{name}`: dates not increasing at {}",
                w[1]
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "series `{name}`: non-finite value on {}",
                dates[i]
            )));
        }
        Ok(Self { name, dates, values })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Keeps only the given dates, which must all be present.
    pub fn restrict(&self, dates: &[NaiveDate]) -> Result<Self> {
        let mut values = Vec::with_capacity(dates.len());
        let mut k = 0;
        for d in dates {
            while k < self.dates.len() && self.dates[k] < *d {
                k += 1;
            }
            if k == self.dates.len() || self.dates[k] != *d {
                return Err(Error::invalid(format!("series `{}` has no value on {d}", self.name)));
            }
            values.push(self.values[k]);
        }
        Self::new(self.name.clone(), dates.to_vec(), values)
    }
}

#[derive(Debug, Clone)]
pub struct Alignment {
    pub series: Vec<AlignedSeries>,
    /// Per input series, dates dropped because another series lacked them.
    pub dropped: Vec<usize>,
}

/// Restricts every series to the dates they all share.
pub fn align(series: &[&AlignedSeries]) -> Result<Alignment> {
    let Some(first) = series.first() else {
        return Err(Error::invalid("nothing to align"));
    };
    let mut common: Vec<NaiveDate> = first.dates.clone();
    for s in &series[1..] {
        let mut keep = Vec::with_capacity(common.len());
        let (mut i, mut j) = (0, 0);
        while i < common.len() && j < s.dates.len() {
            match common[i].cmp(&s.dates[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    keep.push(common[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        common = keep;
    }
    let out: Vec<AlignedSeries> = series.iter().map(|s| s.restrict(&common)).collect::<Result<_>>()?;
    let dropped = series.iter().map(|s| s.len() - common.len()).collect();
    Ok(Alignment { series: out, dropped })
}

/// `s(t) - s(t-1)`, dated by the later day of each pair.
pub fn first_difference(s: &AlignedSeries) -> Result<AlignedSeries> {
    if s.len() < 2 {
        return Err(Error::invalid(format!(
            "series `{}` needs at least 2 values to difference",
            s.name
        )));
    }
    let values = s.values.windows(2).map(|w| w[1] - w[0]).collect();
    AlignedSeries::new(format!("d_{}", s.name), s.dates[1..].to_vec(), values)
}

/// Full-sample z-scores (population standard deviation).
pub fn zscore_series(s: &AlignedSeries) -> Result<AlignedSeries> {
    let z = crate::stats::zscore(&s.values)?;
    AlignedSeries::new(format!("z_{}", s.name), s.dates.clone(), z)
}
