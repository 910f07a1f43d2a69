use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

use super::spec::SynthSpec;
use crate::corpus::{BusinessCalendar, DailyFrequencyMatrix};
use crate::error::{Error, Result};
use crate::extraction::english_stopwords;
use crate::par::{map_indexed, Execution};
use crate::series::{AlignedSeries, PerformanceSeries};
use crate::stats::{derive_seed, pop_std, PermutationPlan};

const STREAM_INDEX: u64 = 1;
const STREAM_VOLUME: u64 = 2;
const STREAM_ROUTINARY: u64 = 3;
const STREAM_RARE: u64 = 4;
const STREAM_BUNDLE: u64 = 5;
const STREAM_PERFORMANCE: u64 = 6;

fn stream(seed: u64, id: u64) -> rand_chacha::ChaCha8Rng {
    PermutationPlan::new(seed, 1).rng(id as usize)
}

fn draw_count<R: Rng + ?Sized>(lambda: f64, noise: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let x = if noise == 0.0 {
        lambda
    } else {
        let p: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
        lambda + noise * (p - lambda)
    };
    x.round().max(0.0) as u64
}

/// Log-space AR(1) index, `days` positive values.
pub fn gen_index(days: usize, mean: f64, persistence: f64, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if days < 2 {
        return Err(Error::invalid("index needs at least 2 days"));
    }
    if !(mean > 0.0) || !(0.0..1.0).contains(&persistence) || !(sigma > 0.0) {
        return Err(Error::invalid(
            "index needs mean > 0, persistence in [0, 1) and sigma > 0",
        ));
    }
    let mut rng = stream(seed, STREAM_INDEX);
    let mu = mean.ln();
    let mut x = mu;
    let mut out = Vec::with_capacity(days);
    for _ in 0..days {
        out.push(x.exp());
        let e: f64 = Exp1.sample(&mut rng);
        x = mu + persistence * (x - mu) + sigma * (e - 1.0);
    }
    Ok(out)
}

/// `Poisson(mean * driver(t) / <driver>)` with the noise blend applied.
pub fn gen_routinary_word(driver: &[f64], mean: f64, noise: f64, seed: u64) -> Vec<u64> {
    let avg = driver.iter().sum::<f64>() / driver.len() as f64;
    let mut rng = stream(seed, 0);
    driver
        .iter()
        .map(|v| draw_count(mean * v / avg, noise, &mut rng))
        .collect()
}

/// Daily shares of each bundle in the extracted mass; `z` has one more day
/// than the corpus so next-day bundles have a driver on the last day.
pub fn bundle_shares(spec: &SynthSpec, z: &[f64]) -> Vec<Vec<f64>> {
    let days = spec.days;
    let total: f64 = spec.bundles.iter().map(|b| b.size as f64).sum();
    let base: Vec<f64> = spec.bundles.iter().map(|b| b.size as f64 / total).collect();
    let residual = spec.bundles.iter().position(|b| b.lag.is_none());
    let mut shares = vec![vec![0.0; days]; spec.bundles.len()];
    for t in 0..days {
        let mut coupled = 0.0;
        for (b, bs) in spec.bundles.iter().enumerate() {
            if let Some(l) = bs.lag {
                let s = base[b] * (1.0 + spec.burstiness * bs.polarity * z[t + l].tanh());
                shares[b][t] = s;
                coupled += s;
            }
        }
        match residual {
            Some(r) => shares[r][t] = 1.0 - coupled,
            None => {
                for s in shares.iter_mut() {
                    s[t] /= coupled;
                }
            }
        }
    }
    shares
}

/// Counts for the words of one bundle: word `j` draws
/// `mass * share(t) * weights[j]`.
pub fn gen_external_bundle(
    share: &[f64],
    mass: f64,
    weights: &[f64],
    noise: f64,
    seed: u64,
    exec: Execution,
) -> Vec<Vec<u64>> {
    map_indexed(exec, weights.len(), |j| {
        let mut rng = stream(derive_seed(seed, j as u64), 0);
        share
            .iter()
            .map(|s| draw_count(mass * s * weights[j], noise, &mut rng))
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthLabel {
    Routinary,
    /// Volume-proportional word too rare to pass the vocabulary threshold.
    Rare,
    /// Zero-based planted bundle.
    Bundle(usize),
}

impl TruthLabel {
    pub fn as_string(self) -> String {
        match self {
            TruthLabel::Routinary => "routinary".into(),
            TruthLabel::Rare => "rare".into(),
            TruthLabel::Bundle(b) => format!("bundle_{}", b + 1),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "routinary" => Some(TruthLabel::Routinary),
            "rare" => Some(TruthLabel::Rare),
            _ => s
                .strip_prefix("bundle_")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|n| *n >= 1)
                .map(|n| TruthLabel::Bundle(n - 1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Sorted by word, one entry per word of the generated matrix.
    pub words: Vec<(String, TruthLabel)>,
    pub beta: f64,
    /// Planted lag per bundle (`None` for the residual bundle).
    pub bundle_lags: Vec<Option<usize>>,
    /// Daily bundle shares over the corpus dates.
    pub shares: Vec<Vec<f64>>,
}

impl GroundTruth {
    pub fn label(&self, word: &str) -> Option<TruthLabel> {
        self.words
            .binary_search_by(|(w, _)| w.as_str().cmp(word))
            .ok()
            .map(|i| self.words[i].1)
    }

    pub fn bundle_words(&self, b: usize) -> Vec<String> {
        self.words
            .iter()
            .filter(|(_, l)| *l == TruthLabel::Bundle(b))
            .map(|(w, _)| w.clone())
            .collect()
    }

    /// CSV `word,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("word,label\n");
        for (w, l) in &self.words {
            out.push_str(&format!("{w},{}\n", l.as_string()));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub calendar: BusinessCalendar,
    pub matrix: DailyFrequencyMatrix,
    pub index: AlignedSeries,
    pub performance: PerformanceSeries,
    pub truth: GroundTruth,
}

fn routinary_name(j: usize, stop: &[&str]) -> String {
    stop.get(j)
        .map_or_else(|| format!("r{:04}", j + 1), |s| (*s).to_string())
}

/// Generates the full planted corpus. Words draw from per-word streams, so
/// the output is independent of `exec`.
pub fn gen_corpus(spec: &SynthSpec, exec: Execution) -> Result<SynthCorpus> {
    spec.validate()?;
    let days = spec.days;
    let calendar = BusinessCalendar::weekdays_from(spec.start, days)?;
    let dates = calendar.dates().to_vec();

    let path = gen_index(
        days + 1,
        spec.index_mean,
        spec.index_persistence,
        spec.index_sigma,
        spec.seed,
    )?;
    let mu = spec.index_mean.ln();
    let sd = spec.index_sigma / (1.0 - spec.index_persistence * spec.index_persistence).sqrt();
    let z: Vec<f64> = path.iter().map(|v| (v.ln() - mu) / sd).collect();
    let index = AlignedSeries::new("index", dates.clone(), path[..days].to_vec())?;

    let mut vrng = stream(spec.seed, STREAM_VOLUME);
    let volume: Vec<f64> = (0..days)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut vrng);
            (spec.volume_sd * g - 0.5 * spec.volume_sd * spec.volume_sd).exp()
        })
        .collect();

    let stop = english_stopwords();
    let mut words: Vec<(String, TruthLabel, Vec<u64>)> = Vec::new();

    let rseed = derive_seed(spec.seed, STREAM_ROUTINARY);
    let routinary = map_indexed(exec, spec.n_routinary, |j| {
        let mean = spec.top_frequency * ((j + 1) as f64).powf(-spec.zipf_exponent);
        gen_routinary_word(&volume, mean, spec.noise, derive_seed(rseed, j as u64))
    });
    for (j, col) in routinary.into_iter().enumerate() {
        words.push((routinary_name(j, &stop), TruthLabel::Routinary, col));
    }

    let xseed = derive_seed(spec.seed, STREAM_RARE);
    let rare = map_indexed(exec, spec.n_rare, |j| {
        gen_routinary_word(&volume, spec.rare_frequency, spec.noise, derive_seed(xseed, j as u64))
    });
    for (j, col) in rare.into_iter().enumerate() {
        words.push((format!("x{:04}", j + 1), TruthLabel::Rare, col));
    }

    let shares = bundle_shares(spec, &z);
    let mass: f64 = spec.bundles.iter().map(|b| b.size as f64 * spec.external_mean).sum();
    let bseed = derive_seed(spec.seed, STREAM_BUNDLE);
    let mut bundle_cols: Vec<Vec<Vec<u64>>> = Vec::new();
    for (b, bs) in spec.bundles.iter().enumerate() {
        let raw: Vec<f64> = (0..bs.size)
            .map(|j| 2.0 / 3.0 + (2.0 / 3.0) * j as f64 / (bs.size - 1) as f64)
            .collect();
        let sum: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
        let cols = gen_external_bundle(
            &shares[b],
            mass,
            &weights,
            spec.noise,
            derive_seed(bseed, b as u64),
            exec,
        );
        for (j, col) in cols.iter().enumerate() {
            words.push((format!("b{}w{:02}", b + 1, j + 1), TruthLabel::Bundle(b), col.clone()));
        }
        bundle_cols.push(cols);
    }

    words.retain(|(_, _, c)| c.iter().any(|v| *v > 0));
    words.sort_by(|a, b| a.0.cmp(&b.0));
    let mut totals = vec![0u64; days];
    for (_, _, c) in &words {
        for (t, v) in c.iter().enumerate() {
            totals[t] += v;
        }
    }
    if totals.contains(&0) {
        return Err(Error::degenerate("a synthetic day has no tokens"));
    }
    let truth_words: Vec<(String, TruthLabel)> = words.iter().map(|(w, l, _)| (w.clone(), *l)).collect();
    let (names, cols): (Vec<String>, Vec<Vec<u64>>) = words.into_iter().map(|(w, _, c)| (w, c)).unzip();
    let matrix = DailyFrequencyMatrix::new(dates.clone(), names, cols, totals)?;

    // realized shares of the first two bundles among all planted external words
    let ext_total: Vec<f64> = (0..days)
        .map(|t| bundle_cols.iter().flatten().map(|c| c[t] as f64).sum())
        .collect();
    let gamma = |b: usize| -> Vec<f64> {
        (0..days)
            .map(|t| bundle_cols[b].iter().map(|c| c[t] as f64).sum::<f64>() / ext_total[t].max(1.0))
            .collect()
    };
    let (g1, g2) = (gamma(0), gamma(1));
    let attention: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| (a - b).abs()).collect();
    let da: Vec<f64> = attention.windows(2).map(|w| w[1] - w[0]).collect();
    let sd_a = pop_std(&da);
    let mut prng = stream(spec.seed, STREAM_PERFORMANCE);
    let mut perf = Vec::with_capacity(days);
    let mut level = spec.performance_start;
    perf.push(level);
    let coupling = (1.0 - spec.beta * spec.beta).sqrt();
    for d in &da {
        let e: f64 = StandardNormal.sample(&mut prng);
        let signal = if sd_a > 0.0 { d / sd_a } else { 0.0 };
        level += spec.performance_scale * (spec.beta * signal + coupling * e);
        perf.push(level);
    }
    let traders: Vec<f64> = (0..days)
        .map(|_| {
            Poisson::new(spec.traders_mean)
                .expect("positive rate")
                .sample(&mut prng)
        })
        .collect();
    let performance = PerformanceSeries {
        pct_profitable: AlignedSeries::new("performance", dates.clone(), perf)?,
        n_traders: AlignedSeries::new("traders", dates, traders)?,
    };

    Ok(SynthCorpus {
        calendar,
        matrix,
        index,
        performance,
        truth: GroundTruth {
            words: truth_words,
            beta: spec.beta,
            bundle_lags: spec.bundles.iter().map(|b| b.lag).collect(),
            shares,
        },
    })
}
