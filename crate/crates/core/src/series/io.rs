use std::io::Read;

use chrono::NaiveDate;
use serde::Deserialize;

use super::aligned::AlignedSeries;
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct IndexRow {
    date: NaiveDate,
    close: f64,
}

#[derive(Deserialize)]
struct PerformanceRow {
    date: NaiveDate,
    pct_profitable: f64,
    n_traders: f64,
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Malformed {
        line,
        message: e.to_string(),
    }
}

/// Reads `date,close`; rows must be in increasing date order.
pub fn read_index_csv<R: Read>(reader: R) -> Result<AlignedSeries> {
    let mut dates = Vec::new();
    let mut values = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize::<IndexRow>() {
        let row = row.map_err(csv_error)?;
        dates.push(row.date);
        values.push(row.close);
    }
    AlignedSeries::new("index", dates, values)
}

#[derive(Debug, Clone)]
pub struct PerformanceSeries {
    pub pct_profitable: AlignedSeries,
    pub n_traders: AlignedSeries,
}

/// Reads `date,pct_profitable,n_traders`.
pub fn read_performance_csv<R: Read>(reader: R) -> Result<PerformanceSeries> {
    let mut dates = Vec::new();
    let mut p = Vec::new();
    let mut n = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize::<PerformanceRow>() {
        let row = row.map_err(csv_error)?;
        dates.push(row.date);
        p.push(row.pct_profitable);
        n.push(row.n_traders);
    }
    Ok(PerformanceSeries {
        pct_profitable: AlignedSeries::new("performance", dates.clone(), p)?,
        n_traders: AlignedSeries::new("traders", dates, n)?,
    })
}

/// CSV with a `date` column followed by one column per series; all series
/// must share dates.
pub fn series_csv(series: &[&AlignedSeries]) -> Result<String> {
    let Some(first) = series.first() else {
        return Ok(String::from("date\n"));
    };
    if series.iter().any(|s| s.dates() != first.dates()) {
        return Err(Error::invalid("series_csv needs aligned series"));
    }
    let mut out = String::from("date");
    for s in series {
        out.push(',');
        out.push_str(&s.name);
    }
    out.push('\n');
    for (t, d) in first.dates().iter().enumerate() {
        out.push_str(&d.to_string());
        for s in series {
            out.push_str(&format!(",{}", s.values()[t]));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_index_and_performance() {
        let ix = read_index_csv("date,close\n2007-01-03,12.5\n2007-01-04,11.9\n".as_bytes()).unwrap();
        assert_eq!(ix.values(), [12.5, 11.9]);
        let p = read_performance_csv("date,pct_profitable,n_traders\n2007-01-03,55.1,140\n".as_bytes()).unwrap();
        assert_eq!(p.pct_profitable.values(), [55.1]);
        assert_eq!(p.n_traders.values(), [140.0]);
    }

    #[test]
    fn malformed_rows_report_line() {
        let e = read_index_csv("date,close\n2007-01-03,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Malformed { line: 2, .. }), "{e:?}");
        assert!(read_index_csv("date,close\n2007-01-04,1\n2007-01-03,2\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip_of_values() {
        let ix = read_index_csv("date,close\n2007-01-03,12.5\n2007-01-04,11.9\n".as_bytes()).unwrap();
        let text = series_csv(&[&ix]).unwrap();
        assert_eq!(text, "date,index\n2007-01-03,12.5\n2007-01-04,11.9\n");
    }
}
