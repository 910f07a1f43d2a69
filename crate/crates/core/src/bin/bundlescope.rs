use std::path::PathBuf;
use std::process::ExitCode;

use bundlescope::pipeline::{run_stage, RunConfig, Stage};
use bundlescope::{par, Error, Execution};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Generate a planted corpus, index and performance series.
    Synth,
    /// Parse messages into the filtered daily word-frequency matrix.
    Ingest,
    /// Label words routinary, external or ambiguous.
    Extract,
    /// Build the correlation network and detect bundles.
    Bundle,
    /// Bundle frequencies against the index and performance series.
    Analyze,
    /// Render SVG charts from the analysis tables.
    Report,
}

impl From<Command> for Stage {
    fn from(c: Command) -> Self {
        match c {
            Command::Synth => Stage::Synth,
            Command::Ingest => Stage::Ingest,
            Command::Extract => Stage::Extract,
            Command::Bundle => Stage::Bundle,
            Command::Analyze => Stage::Analyze,
            Command::Report => Stage::Report,
        }
    }
}

/// Word-bundle analytics for message corpora.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `seed` in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `paths.out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: &Cli) -> Result<Vec<String>, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &cli.out {
        cfg.paths.out = o.clone();
    }
    if cli.threads == Some(0) {
        return Err(Error::config("threads", "must be at least 1"));
    }
    let stage = Stage::from(cli.command);
    par::with_threads(cli.threads, || run_stage(stage, &cfg, Execution::Parallel))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(written)) => {
            for w in written {
                println!("{w}");
            }
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(4),
    }
}
