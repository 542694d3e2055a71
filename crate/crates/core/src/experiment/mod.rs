//! Experiment harness: Monte Carlo and exhaustive-enumeration checks of the
//! analytical bounds, driven by a JSON [`ExperimentConfig`] and producing
//! plot-ready [`Table`]s.
//!
//! Every experiment is deterministic for a fixed config and seed. Samples
//! draw from independent generator streams and are merged in index order,
//! so the worker pool size never changes the output.

mod contingency;
mod enumerate;
mod lcpf;
mod manifold;
mod stats;
mod sweep;
mod table;

use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admittance::LineDistribution;
use crate::bounds::ExpectationForm;
use crate::error::{Error, Result};
use crate::graph::Topology;

pub use contingency::{
    contingency_norms_monte_carlo, contingency_variance_estimate, run_bruteforce,
    run_contingency_expectation, run_contingency_tail, BruteForceRecord, ExpectationRecord,
    TailRecord,
};
pub use enumerate::{brute_force_distribution, MAX_BRUTE_FORCE_LINES};
pub use lcpf::{
    bounded_delta, lcpf_deviation_norms, lcpf_second_moment_estimate, run_lcpf_experiment,
    LcpfRecord, LCPF_TAIL_SLACK,
};
pub use manifold::{run_manifold_experiment, ManifoldRecord};
pub use stats::{
    binomial_upper_99, spearman, stream_rng, ComplexMatrixEstimate, MatrixEstimate, MatrixMoments,
    SampleStats,
};
pub use sweep::{run_norm_sweep, summarize_sweep, SweepPoint, SweepRecord};
pub use table::{emit, read_table, Cell, Format, Record, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Operator norm of random Erdős–Rényi admittance matrices against the
    /// degree-based expectation bound, swept over the line probability.
    NormSweep,
    ContingencyTail,
    ContingencyExpectation,
    LcpfBounds,
    Manifold,
    Bruteforce,
}

/// Statistic backend for the contingency experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    MonteCarlo,
    Exact,
}

/// One law for every line, or one law per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LineSpec {
    Uniform(LineDistribution),
    PerLine(Vec<LineDistribution>),
}

impl LineSpec {
    pub fn resolve(&self, m: usize) -> Result<Vec<LineDistribution>> {
        match self {
            LineSpec::Uniform(d) => Ok(vec![*d; m]),
            LineSpec::PerLine(v) if v.len() == m => Ok(v.clone()),
            LineSpec::PerLine(v) => Err(Error::Config(format!(
                "{} line laws given for {m} lines",
                v.len()
            ))),
        }
    }
}

fn default_n() -> usize {
    20
}

fn default_samples() -> usize {
    200
}

fn default_p_sweep() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

fn default_step_scale() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    /// Bus count for generated topologies.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Fixed topology; experiments other than the sweep default to `K_n`.
    #[serde(default)]
    pub topology: Option<Topology>,
    #[serde(default)]
    pub lines: Option<LineSpec>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_p_sweep")]
    pub p_sweep: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub form: ExpectationForm,
    /// Entry scale of the random voltage step in the manifold experiment.
    #[serde(default = "default_step_scale")]
    pub step_scale: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment: Some(experiment),
            n: default_n(),
            topology: None,
            lines: None,
            samples: default_samples(),
            t_grid: Vec::new(),
            p_sweep: default_p_sweep(),
            seed: 0,
            backend: Backend::default(),
            form: ExpectationForm::default(),
            step_scale: default_step_scale(),
            output: None,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.experiment
            .ok_or_else(|| Error::Config("no experiment selected".into()))
    }

    pub fn topology_or_complete(&self) -> Result<Topology> {
        match &self.topology {
            Some(t) => Ok(t.clone()),
            None => Topology::complete(self.n),
        }
    }

    pub fn line_laws(&self, m: usize, default: LineDistribution) -> Result<Vec<LineDistribution>> {
        match &self.lines {
            Some(spec) => spec.resolve(m),
            None => Ok(vec![default; m]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        let bad = |msg: String| Err(Error::Config(msg));
        if self.samples < 1 {
            return bad("samples must be at least 1".into());
        }
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if self.t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("t_grid entries must be finite and nonnegative".into());
        }
        if self.t_grid.windows(2).any(|w| w[0] > w[1]) {
            return bad("t_grid must be sorted ascending".into());
        }
        if self.p_sweep.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("p_sweep entries must lie in [0, 1]".into());
        }
        if !(self.step_scale.is_finite() && self.step_scale >= 0.0) {
            return bad("step_scale must be finite and nonnegative".into());
        }
        let exhaustive = kind == ExperimentKind::Bruteforce
            || (self.backend == Backend::Exact
                && matches!(
                    kind,
                    ExperimentKind::ContingencyTail | ExperimentKind::ContingencyExpectation
                ));
        if exhaustive {
            let m = self.topology_or_complete()?.n_edges();
            if m > MAX_BRUTE_FORCE_LINES {
                return bad(format!(
                    "exhaustive enumeration needs m ≤ {MAX_BRUTE_FORCE_LINES}, topology has {m}"
                ));
            }
        }
        if matches!(kind, ExperimentKind::NormSweep)
            && matches!(self.lines, Some(LineSpec::PerLine(_)))
        {
            return bad("the norm sweep samples its topology; give a single line law".into());
        }
        Ok(())
    }
}

/// Runs the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    Ok(match cfg.kind()? {
        ExperimentKind::NormSweep => Table::from_records(&run_norm_sweep(cfg)?),
        ExperimentKind::ContingencyTail => Table::from_records(&run_contingency_tail(cfg)?),
        ExperimentKind::ContingencyExpectation => {
            Table::from_records(&run_contingency_expectation(cfg)?)
        }
        ExperimentKind::LcpfBounds => Table::from_records(&run_lcpf_experiment(cfg)?),
        ExperimentKind::Manifold => Table::from_records(&run_manifold_experiment(cfg)?),
        ExperimentKind::Bruteforce => Table::from_records(&run_bruteforce(cfg)?),
    })
}

const CHUNK: usize = 1024;

/// Splits `samples` draws into fixed chunks, each with its own generator
/// stream `(major, chunk index)`, and returns per-chunk results in order.
fn chunked<T, F>(samples: usize, seed: u64, major: u32, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(samples - c * CHUNK);
            let mut rng = stream_rng(seed, major, c as u32);
            f(&mut rng, count)
        })
        .collect()
}
