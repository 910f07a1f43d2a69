use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Deserialize;

use super::config::RunConfig;
use super::manifest::{sha256_hex, StageIo};
use super::svg::{ccf_chart, dual_series_chart, scatter_fit_chart, CcfRow};
use crate::bundling::{
    bundle_diagnostics, bundle_summary, bundles_csv, detect_bundles, pairwise_network, stability_check, summary_csv,
    BundleOptions, NetworkOptions, StabilityOptions,
};
use crate::corpus::{
    build_matrix, filter_vocabulary, parse_messages, scaled_min_total, zipf_diagnostic, BusinessCalendar,
    DailyFrequencyMatrix, ZipfOptions,
};
use crate::error::{Error, Result};
use crate::extraction::{
    classifications_csv, classify, english_stopwords, stopword_diagnostic, ClassifyOptions, Label,
};
use crate::par::Execution;
use crate::series::{
    adf_test, align, ar1_coefficient, attention_performance, attention_series, bundle_relative_frequency, ccf_csv,
    cross_correlation, dominance_table, first_difference, granger_test, kernel_smooth, pp_test, read_index_csv,
    read_performance_csv, series_csv, AdfLags, AlignedSeries, CcfOptions,
};
use crate::stats::{derive_seed, ols_with_intercept};
use crate::synth::{gen_corpus, write_messages, MessageLayout};

const SEED_ZIPF: u64 = 1;
const SEED_EXTRACT: u64 = 2;
const SEED_NETWORK: u64 = 3;
const SEED_BUNDLES: u64 = 4;
const SEED_CCF: u64 = 5;
const SEED_ATTENTION: u64 = 6;
const SEED_STABILITY: u64 = 7;

const MATRIX: &str = "ingest/matrix.bin";
const CLASSES: &str = "extract/classifications.csv";
const BUNDLES: &str = "bundle/bundles.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Synth,
    Ingest,
    Extract,
    Bundle,
    Analyze,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Synth,
        Stage::Ingest,
        Stage::Extract,
        Stage::Bundle,
        Stage::Analyze,
        Stage::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Extract => "extract",
            Stage::Bundle => "bundle",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
        }
    }
}

/// Runs one stage; outputs land under `cfg.paths.out` and the stage's
/// manifest entry is replaced. Returns the relative paths written.
pub fn run_stage(stage: Stage, cfg: &RunConfig, exec: Execution) -> Result<Vec<String>> {
    cfg.validate()?;
    let seed = cfg.seed()?;
    let mut io = StageIo::open(&cfg.paths.out, sha256_hex(cfg.canonical_json().as_bytes()), seed)?;
    match stage {
        Stage::Synth => run_synth(cfg, seed, exec, &mut io)?,
        Stage::Ingest => run_ingest(cfg, seed, exec, &mut io)?,
        Stage::Extract => run_extract(cfg, seed, exec, &mut io)?,
        Stage::Bundle => run_bundle(cfg, seed, exec, &mut io)?,
        Stage::Analyze => run_analyze(cfg, seed, exec, &mut io)?,
        Stage::Report => run_report(cfg, &mut io)?,
    }
    let outputs = io.outputs();
    io.finish(stage.as_str())?;
    Ok(outputs)
}

fn warn(msg: impl AsRef<str>) {
    eprintln!("warning: {}", msg.as_ref());
}

fn synth_path(cfg: &RunConfig, given: &Option<PathBuf>, file: &str) -> PathBuf {
    given.clone().unwrap_or_else(|| cfg.paths.out.join("synth").join(file))
}

fn run_synth(cfg: &RunConfig, seed: u64, exec: Execution, io: &mut StageIo) -> Result<()> {
    let mut spec = cfg.synth.clone();
    spec.seed = seed;
    let corpus = gen_corpus(&spec, exec)?;
    let layout = MessageLayout {
        traders: spec.traders_mean.round().max(2.0) as usize,
        ..MessageLayout::new(seed)
    };
    let mut messages = Vec::new();
    write_messages(&corpus, &layout, &mut messages)?;
    io.write("synth/messages.jsonl", &messages)?;
    io.write("synth/calendar.csv", corpus.calendar.to_csv().as_bytes())?;

    let mut index = String::from("date,close\n");
    for (d, v) in corpus.index.dates().iter().zip(corpus.index.values()) {
        let _ = writeln!(index, "{d},{v}");
    }
    io.write("synth/index.csv", index.as_bytes())?;

    let p = &corpus.performance;
    let mut perf = String::from("date,pct_profitable,n_traders\n");
    for (t, d) in p.pct_profitable.dates().iter().enumerate() {
        let _ = writeln!(perf, "{d},{},{}", p.pct_profitable.values()[t], p.n_traders.values()[t]);
    }
    io.write("synth/performance.csv", perf.as_bytes())?;
    io.write("synth/ground_truth.csv", corpus.truth.to_csv().as_bytes())?;
    let spec_toml = toml::to_string(&spec).map_err(|e| Error::Invariant(format!("spec serialization: {e}")))?;
    io.write("synth/spec.toml", spec_toml.as_bytes())
}

fn run_ingest(cfg: &RunConfig, seed: u64, exec: Execution, io: &mut StageIo) -> Result<()> {
    let msg_path = synth_path(cfg, &cfg.paths.messages, "messages.jsonl");
    let raw = io.read(&msg_path, "synth")?;
    let parsed = parse_messages(raw.as_slice(), cfg.ingest.strict)?;
    for e in parsed.errors.iter().take(5) {
        warn(format!("{} line {}: {}", msg_path.display(), e.line, e.message));
    }
    if parsed.errors.len() > 5 {
        warn(format!("{} more malformed lines skipped", parsed.errors.len() - 5));
    }

    let synth_cal = cfg.paths.out.join("synth/calendar.csv");
    let calendar = match &cfg.paths.calendar {
        Some(p) => BusinessCalendar::from_reader(io.read(p, "synth")?.as_slice())?,
        None if cfg.paths.messages.is_none() => {
            BusinessCalendar::from_reader(io.read(&synth_cal, "synth")?.as_slice())?
        }
        None => {
            let first = parsed.records.iter().map(|r| r.timestamp.date_naive()).min();
            let last = parsed.records.iter().map(|r| r.timestamp.date_naive()).max();
            match (first, last) {
                (Some(a), Some(b)) => BusinessCalendar::weekdays(a, b)?,
                _ => return Err(Error::invalid(format!("{} holds no messages", msg_path.display()))),
            }
        }
    };
    let (full, report) = build_matrix(&parsed.records, &calendar, exec)?;
    let min_total = cfg.ingest.min_total.unwrap_or_else(|| scaled_min_total(full.n_dates()));
    let kept = filter_vocabulary(&full, min_total)?;

    let mut vocab = String::from("word,total,kept\n");
    for w in 0..full.n_words() {
        let word = &full.words()[w];
        let _ = writeln!(
            vocab,
            "{word},{},{}",
            full.word_total(w),
            u8::from(kept.word_index(word).is_some())
        );
    }
    io.write("ingest/vocabulary.csv", vocab.as_bytes())?;
    io.write("ingest/volume.csv", full.totals_csv().as_bytes())?;
    io.write(MATRIX, &kept.to_binary())?;

    let zipf_opts = ZipfOptions {
        bootstrap: cfg.ingest.zipf_bootstrap,
        seed: derive_seed(seed, SEED_ZIPF),
        exec,
    };
    match zipf_diagnostic(&full, &zipf_opts) {
        Ok(z) => {
            let csv = format!(
                "exponent,ks_statistic,ks_p,xmin,n_tail\n{},{},{},{},{}\n",
                z.exponent, z.ks_statistic, z.ks_p, z.xmin, z.n_tail
            );
            io.write("ingest/zipf.csv", csv.as_bytes())?;
        }
        Err(e) => warn(format!("zipf diagnostic skipped: {e}")),
    }

    let summary = format!(
        "messages_parsed {}\nmalformed_lines {}\nmessages_used {}\ndropped_off_calendar {}\nbusiness_days {}\nvocabulary {}\nmin_total {}\nkept_words {}\n",
        parsed.records.len(),
        parsed.errors.len(),
        report.messages_used,
        report.dropped_off_calendar,
        full.n_dates(),
        full.n_words(),
        min_total,
        kept.n_words()
    );
    io.write("ingest/summary.txt", summary.as_bytes())
}

fn load_matrix(io: &mut StageIo) -> Result<DailyFrequencyMatrix> {
    let bytes = io.read_artifact(MATRIX, "ingest")?;
    DailyFrequencyMatrix::read_binary(bytes.as_slice())
}

fn run_extract(cfg: &RunConfig, seed: u64, exec: Execution, io: &mut StageIo) -> Result<()> {
    let matrix = load_matrix(io)?;
    let opts = ClassifyOptions {
        n_shuffles: cfg.extract.n_shuffles,
        seed: derive_seed(seed, SEED_EXTRACT),
        criterion: cfg.extract.criterion(),
        exec,
    };
    let rows = classify(&matrix, &opts)?;
    io.write(CLASSES, classifications_csv(&rows).as_bytes())?;
    let count = |l: Label| rows.iter().filter(|r| r.label == l).count();
    let mut summary = format!(
        "words {}\nroutinary {}\nexternal {}\nambiguous {}\n",
        rows.len(),
        count(Label::Routinary),
        count(Label::External),
        count(Label::Ambiguous)
    );
    match stopword_diagnostic(&rows, &english_stopwords()) {
        Ok(s) => {
            let _ = write!(
                summary,
                "stopwords_present {}\nstopwords_routinary {}\nstopwords_routinary_fraction {}\n",
                s.present, s.routinary, s.fraction
            );
        }
        Err(e) => warn(format!("stop-word diagnostic skipped: {e}")),
    }
    io.write("extract/summary.txt", summary.as_bytes())
}

#[derive(Deserialize)]
struct ClassRow {
    word: String,
    label: String,
}

fn csv_error(path: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Malformed {
        line: e.position().map_or(0, |p| p.line() as usize),
        message: format!("{path}: {e}"),
    }
}

fn external_words(io: &mut StageIo) -> Result<Vec<String>> {
    let bytes = io.read_artifact(CLASSES, "extract")?;
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(bytes.as_slice()).deserialize::<ClassRow>() {
        let row = row.map_err(csv_error(CLASSES))?;
        match Label::parse(&row.label) {
            Some(Label::External) => out.push(row.word),
            Some(_) => {}
            None => {
                return Err(Error::Malformed {
                    line: 0,
                    message: format!("{CLASSES}: unknown label `{}`", row.label),
                })
            }
        }
    }
    Ok(out)
}

fn run_bundle(cfg: &RunConfig, seed: u64, exec: Execution, io: &mut StageIo) -> Result<()> {
    let matrix = load_matrix(io)?;
    let external = external_words(io)?;
    if external.len() < 2 {
        return Err(Error::degenerate(format!(
            "{} external words; bundles need at least 2",
            external.len()
        )));
    }
    let sub = matrix.select_named(&external);
    let net_opts = NetworkOptions {
        n_shuffles: cfg.bundle.n_shuffles,
        seed: derive_seed(seed, SEED_NETWORK),
        exec,
    };
    let bundle_opts = BundleOptions {
        method: cfg.bundle.method()?,
        restarts: cfg.bundle.restarts,
        seed: derive_seed(seed, SEED_BUNDLES),
        schedule: cfg.bundle.schedule(),
        exec,
    };
    let net = pairwise_network(&sub, &net_opts)?;
    let part = detect_bundles(net.graph(), &bundle_opts)?;
    io.write("bundle/network.csv", net.to_csv().as_bytes())?;
    io.write(BUNDLES, bundles_csv(net.words(), &part).as_bytes())?;
    io.write(
        "bundle/bundle_summary.csv",
        summary_csv(&bundle_summary(net.graph(), &part)).as_bytes(),
    )?;

    let mut diag = format!(
        "method {}\nmodularity {}\nbundles {}\nwords {}\nzero_variance_dropped {}\n",
        part.method.as_str(),
        part.q,
        part.n_bundles(),
        net.len(),
        net.dropped().len()
    );
    match bundle_diagnostics(&net, &part) {
        Ok(d) => {
            let _ = write!(
                diag,
                "significant_within {}\nsignificant_between {}\nwithin_pairs {}\nbetween_pairs {}\n",
                d.within, d.between, d.within_pairs, d.between_pairs
            );
        }
        Err(e) => warn(format!("bundle diagnostics skipped: {e}")),
    }
    io.write("bundle/diagnostics.txt", diag.as_bytes())?;

    if cfg.bundle.stability {
        let s_seed = derive_seed(seed, SEED_STABILITY);
        let opts = StabilityOptions {
            network: NetworkOptions {
                seed: s_seed,
                ..net_opts
            },
            bundles: BundleOptions {
                seed: derive_seed(s_seed, 1),
                ..bundle_opts
            },
        };
        let r = stability_check(&sub, &opts)?;
        let txt = format!(
            "nmi {}\nshared_words {}\nfirst_half_bundles {}\nsecond_half_bundles {}\n",
            r.nmi,
            r.shared_words.len(),
            r.first.n_bundles(),
            r.second.n_bundles()
        );
        io.write("bundle/stability.txt", txt.as_bytes())?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct BundleRow {
    word: String,
    bundle_id: usize,
}

fn load_bundles(io: &mut StageIo) -> Result<(Vec<String>, Vec<usize>)> {
    let bytes = io.read_artifact(BUNDLES, "bundle")?;
    let mut words = Vec::new();
    let mut ids = Vec::new();
    for row in csv::Reader::from_reader(bytes.as_slice()).deserialize::<BundleRow>() {
        let row = row.map_err(csv_error(BUNDLES))?;
        if row.bundle_id == 0 {
            return Err(Error::Malformed {
                line: 0,
                message: format!("{BUNDLES}: bundle ids are 1-based"),
            });
        }
        words.push(row.word);
        ids.push(row.bundle_id - 1);
    }
    Ok((words, ids))
}

fn unit_root_row(s: &AlignedSeries, lags: usize) -> Result<String> {
    let adf = adf_test(s, AdfLags::Fixed(lags))?;
    let pp = pp_test(s, None)?;
    let phi = ar1_coefficient(s)?;
    Ok(format!(
        "{},{},{},{},{},{}\n",
        s.name, adf.statistic, adf.p, pp.statistic, pp.p, phi
    ))
}

fn run_analyze(cfg: &RunConfig, seed: u64, exec: Execution, io: &mut StageIo) -> Result<()> {
    let a = &cfg.analyze;
    let matrix = load_matrix(io)?;
    let external = external_words(io)?;
    let (words, ids) = load_bundles(io)?;
    let n_bundles = ids.iter().max().map_or(0, |m| m + 1);
    let idx_path = synth_path(cfg, &cfg.paths.index, "index.csv");
    let index = read_index_csv(io.read(&idx_path, "synth")?.as_slice())?;
    let perf_path = synth_path(cfg, &cfg.paths.performance, "performance.csv");
    let perf = read_performance_csv(io.read(&perf_path, "synth")?.as_slice())?;

    let sub = matrix.select_named(&external);
    let gammas = bundle_relative_frequency(&sub, &words, &ids, n_bundles)?;
    let mut all: Vec<&AlignedSeries> = gammas.iter().collect();
    all.extend([&index, &perf.pct_profitable, &perf.n_traders]);
    let al = align(&all)?;
    let (g, rest) = al.series.split_at(n_bundles);
    let (index, performance, traders) = (&rest[0], &rest[1], &rest[2]);
    if index.len() < 2 {
        return Err(Error::invalid("corpus, index and performance share fewer than 2 dates"));
    }
    let names = ["gamma", "index", "performance", "traders"];
    let mut align_txt = format!("shared_dates {}\n", index.len());
    for (k, d) in al.dropped[n_bundles..].iter().enumerate() {
        let _ = writeln!(align_txt, "dropped_{} {d}", names[k + 1]);
    }
    let _ = writeln!(align_txt, "dropped_gamma {}", al.dropped.first().copied().unwrap_or(0));
    io.write("analyze/alignment.txt", align_txt.as_bytes())?;
    let g_refs: Vec<&AlignedSeries> = g.iter().collect();
    io.write("analyze/gamma.csv", series_csv(&g_refs)?.as_bytes())?;

    let d_index = first_difference(index)?;
    let mut sizes = vec![0usize; n_bundles];
    for b in &ids {
        sizes[*b] += 1;
    }
    let mut granger = String::from("bundle_id,f,p,coefficient,n\n");
    let mut stationarity = String::from("series,adf_stat,adf_p,pp_stat,pp_p,ar1\n");
    let push_unit_root = |s: &AlignedSeries, out: &mut String| match unit_root_row(s, a.adf_lags) {
        Ok(row) => out.push_str(&row),
        Err(e) => warn(format!("unit-root tests on {} skipped: {e}", s.name)),
    };
    push_unit_root(&d_index, &mut stationarity);
    push_unit_root(&first_difference(performance)?, &mut stationarity);
    let ccf_seed = derive_seed(seed, SEED_CCF);
    for b in (0..n_bundles).filter(|b| sizes[*b] >= 2) {
        let d_g = first_difference(&g[b])?;
        push_unit_root(&d_g, &mut stationarity);
        let opts = CcfOptions {
            max_lag: a.max_lag,
            n_null: a.n_null,
            seed: derive_seed(ccf_seed, b as u64),
            level: 0.95,
            exec,
        };
        match cross_correlation(&d_index, &d_g, &opts) {
            Ok(c) => io.write(&format!("analyze/ccf_bundle_{}.csv", b + 1), ccf_csv(&c).as_bytes())?,
            Err(e) => warn(format!("cross-correlation for bundle {} skipped: {e}", b + 1)),
        }
        match granger_test(&d_index, &d_g) {
            Ok(r) => {
                let _ = writeln!(granger, "{},{},{:e},{},{}", b + 1, r.f, r.p, r.coefficient, r.nobs);
            }
            Err(e) => warn(format!("granger test for bundle {} skipped: {e}", b + 1)),
        }
    }
    io.write("analyze/granger.csv", granger.as_bytes())?;
    io.write("analyze/stationarity.csv", stationarity.as_bytes())?;

    let [p1, p2] = a.pair.map(|k| k - 1);
    if p1 >= n_bundles || p2 >= n_bundles {
        warn(format!(
            "analyze.pair {:?} needs {} bundles, found {n_bundles}; dominance and attention skipped",
            a.pair,
            p1.max(p2) + 1
        ));
        return Ok(());
    }
    let dom = dominance_table(&g[p1], &g[p2], index)?;
    io.write("analyze/dominance.csv", dom.to_csv().as_bytes())?;
    io.write("analyze/contingency.txt", dom.table.to_text().as_bytes())?;

    let attention = attention_series(&g[p1], &g[p2])?;
    let res = attention_performance(
        &attention,
        performance,
        &[index, traders],
        a.n_null,
        derive_seed(seed, SEED_ATTENTION),
        exec,
    )?;
    io.write(
        "analyze/attention.csv",
        series_csv(&[&res.theta_a, &res.theta_p])?.as_bytes(),
    )?;
    let ci = res
        .ci
        .map_or_else(|| "undefined".to_string(), |(lo, hi)| format!("{lo} {hi}"));
    let txt = format!(
        "r {}\nfisher_ci_95 {ci}\nnull_band_95 {}\nn {}\n\n{}",
        res.r,
        res.null_band,
        res.n,
        res.regression_text()
    );
    io.write("analyze/regression.txt", txt.as_bytes())
}

#[derive(Deserialize)]
struct CcfCsvRow {
    lag: i64,
    rho: f64,
    ci_low: f64,
    ci_high: f64,
    null_band: f64,
}

#[derive(Deserialize)]
struct DominanceRow {
    date: String,
    z_c: f64,
    z_vix: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(io: &mut StageIo, rel: &str) -> Result<Vec<T>> {
    let bytes = io.read_artifact(rel, "analyze")?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize::<T>()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_error(rel))
}

fn run_report(cfg: &RunConfig, io: &mut StageIo) -> Result<()> {
    let analyze = io
        .manifest()
        .stages
        .get("analyze")
        .ok_or_else(|| Error::MissingArtifact {
            path: io.out().join("manifest.json"),
            stage: "analyze",
        })?;
    let mut ccf_files: Vec<String> = analyze
        .outputs
        .keys()
        .filter(|k| k.starts_with("analyze/ccf_bundle_"))
        .cloned()
        .collect();
    let has_dominance = analyze.outputs.contains_key("analyze/dominance.csv");
    ccf_files.sort_by_key(|k| {
        k.trim_start_matches("analyze/ccf_bundle_")
            .trim_end_matches(".csv")
            .parse::<usize>()
            .unwrap_or(usize::MAX)
    });

    for rel in &ccf_files {
        let id = rel
            .trim_start_matches("analyze/ccf_bundle_")
            .trim_end_matches(".csv")
            .to_string();
        let rows: Vec<CcfCsvRow> = read_rows(io, rel)?;
        let rows: Vec<CcfRow> = rows
            .into_iter()
            .map(|r| CcfRow {
                lag: r.lag,
                rho: r.rho,
                ci_low: r.ci_low,
                ci_high: r.ci_high,
                null_band: r.null_band,
            })
            .collect();
        let svg = ccf_chart(&format!("index changes vs bundle {id} changes"), &rows);
        io.write(&format!("report/ccf_bundle_{id}.svg"), svg.as_bytes())?;
    }
    if !has_dominance {
        warn("no dominance or attention results; those charts skipped");
        return Ok(());
    }

    let rows: Vec<DominanceRow> = read_rows(io, "analyze/dominance.csv")?;
    let dates: Vec<String> = rows.iter().map(|r| r.date.clone()).collect();
    let parsed: Vec<chrono::NaiveDate> = dates
        .iter()
        .map(|d| {
            d.parse().map_err(|e| Error::Malformed {
                line: 0,
                message: format!("dominance.csv date `{d}`: {e}"),
            })
        })
        .collect::<Result<_>>()?;
    let zc = AlignedSeries::new("z_c", parsed.clone(), rows.iter().map(|r| r.z_c).collect())?;
    let zi = AlignedSeries::new("z_index", parsed, rows.iter().map(|r| r.z_vix).collect())?;
    let w = cfg.analyze.smooth_window;
    let (sc, si) = (kernel_smooth(&zc, w)?, kernel_smooth(&zi, w)?);
    let svg = dual_series_chart(
        &format!("bundle dominance and index level (z-scores, {w}-day smoothing)"),
        &dates,
        [("z_c", zc.values(), sc.values()), ("z_index", zi.values(), si.values())],
    );
    io.write("report/dominance.svg", svg.as_bytes())?;

    let bytes = io.read_artifact("analyze/attention.csv", "analyze")?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for rec in csv::Reader::from_reader(bytes.as_slice()).records() {
        let rec = rec.map_err(csv_error("analyze/attention.csv"))?;
        let num = |k: usize| -> Result<f64> {
            rec.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| Error::Malformed {
                line: rec.position().map_or(0, |p| p.line() as usize),
                message: "analyze/attention.csv: expected three columns of numbers after the date".into(),
            })
        };
        x.push(num(1)?);
        y.push(num(2)?);
    }
    let fit = ols_with_intercept(&y, &[&x])?;
    let svg = scatter_fit_chart(
        "daily change in performance vs attention",
        ("d_attention", "d_performance"),
        &x,
        &y,
        fit.coefficients[0],
        fit.coefficients[1],
    );
    io.write("report/attention.svg", svg.as_bytes())
}
