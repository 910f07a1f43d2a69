use chrono::NaiveDate;

use super::aligned::AlignedSeries;
use crate::error::{Error, Result};
use crate::stats::{fisher_exact_2x2, format_probability, zscore, FisherExact};

/// 2x2 co-occurrence of bundle-one dominance and high index days:
/// `a` both, `b` high index only, `c` dominance only, `d` neither.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyResult {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub p_two_sided: f64,
    pub ln_p: f64,
}

impl ContingencyResult {
    pub fn from_fisher(f: &FisherExact) -> Self {
        Self {
            a: f.a,
            b: f.b,
            c: f.c,
            d: f.d,
            p_two_sided: f.p(),
            ln_p: f.ln_p,
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "                 high_index  low_index\n\
             bundle_one_dom   {:>10}  {:>9}\n\
             bundle_two_dom   {:>10}  {:>9}\n\
             fisher_exact_two_sided_p {}\n",
            self.a,
            self.c,
            self.b,
            self.d,
            format_probability(self.ln_p)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceDay {
    pub date: NaiveDate,
    pub z_c: f64,
    pub z_index: f64,
    pub delta_c: bool,
    pub delta_index: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceResult {
    pub days: Vec<DominanceDay>,
    pub table: ContingencyResult,
}

impl DominanceResult {
    /// CSV `date,z_c,z_vix,delta_c,delta_vix`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,z_c,z_vix,delta_c,delta_vix\n");
        for d in &self.days {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                d.date,
                d.z_c,
                d.z_index,
                u8::from(d.delta_c),
                u8::from(d.delta_index)
            ));
        }
        out
    }
}

/// `C(t) = gamma1(t) - gamma2(t)` and the index level are z-scored over the
/// full sample; a day counts as dominant or high when its z-score is
/// strictly positive.
pub fn dominance_table(
    gamma1: &AlignedSeries,
    gamma2: &AlignedSeries,
    index: &AlignedSeries,
) -> Result<DominanceResult> {
    if gamma1.dates() != gamma2.dates() || gamma1.dates() != index.dates() {
        return Err(Error::invalid("dominance inputs are not aligned"));
    }
    let c: Vec<f64> = gamma1
        .values()
        .iter()
        .zip(gamma2.values())
        .map(|(a, b)| a - b)
        .collect();
    let zc = zscore(&c)?;
    let zv = zscore(index.values())?;
    let mut cells = [0u64; 4];
    let mut days = Vec::with_capacity(c.len());
    for (t, date) in gamma1.dates().iter().enumerate() {
        let dc = zc[t] > 0.0;
        let dv = zv[t] > 0.0;
        let cell = match (dc, dv) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (false, false) => 3,
        };
        cells[cell] += 1;
        days.push(DominanceDay {
            date: *date,
            z_c: zc[t],
            z_index: zv[t],
            delta_c: dc,
            delta_index: dv,
        });
    }
    let f = fisher_exact_2x2(cells[0], cells[1], cells[2], cells[3])?;
    Ok(DominanceResult {
        days,
        table: ContingencyResult::from_fisher(&f),
    })
}
