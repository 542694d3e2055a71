use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use grid_concentrator::experiment::{self, ExperimentConfig, ExperimentKind, Format};
use grid_concentrator::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Experiment {
    NormSweep,
    ContingencyTail,
    ContingencyExpectation,
    LcpfBounds,
    Manifold,
    Bruteforce,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::NormSweep => ExperimentKind::NormSweep,
            Experiment::ContingencyTail => ExperimentKind::ContingencyTail,
            Experiment::ContingencyExpectation => ExperimentKind::ContingencyExpectation,
            Experiment::LcpfBounds => ExperimentKind::LcpfBounds,
            Experiment::Manifold => ExperimentKind::Manifold,
            Experiment::Bruteforce => ExperimentKind::Bruteforce,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// Run a bound-validation experiment and write its table.
#[derive(Debug, Parser)]
#[command(name = "grid-concentrator", version)]
struct Cli {
    experiment: Experiment,
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Output file; stdout when absent and the config names none.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Exit with status 2 if any row reports a bound violation.
    #[arg(long)]
    assert_bounds: bool,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_path(&cli.config)?;
    let kind = ExperimentKind::from(cli.experiment);
    match cfg.experiment {
        Some(k) if k != kind => {
            return Err(Error::Config(format!(
                "config is for {k:?} but {kind:?} was requested"
            )))
        }
        _ => cfg.experiment = Some(kind),
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let table = match experiment::run(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cfg.output {
        Some(path) => experiment::emit(&table, format, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, format).and_then(|_| {
                lock.flush().map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
            })
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let violations = table.violations();
    if cli.assert_bounds && violations > 0 {
        eprintln!("{violations} row(s) violate their bound");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
