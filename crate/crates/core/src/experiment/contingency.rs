use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::enumerate::brute_force_distribution;
use super::stats::{binomial_upper_99, ComplexMatrixEstimate, MatrixMoments, SampleStats};
use super::table::{Cell, Record};
use super::{chunked, Backend, ExperimentConfig};
use crate::admittance::{LineAdmittance, LineDistribution};
use crate::bounds::{
    contingency_expectation_bound, contingency_factors, contingency_tail_bound, ContingencyModel,
    ExpectationForm,
};
use crate::error::Result;
use crate::spectra::operator_norm;

fn centered_sample<R: Rng + ?Sized>(model: &ContingencyModel, rng: &mut R) -> DMatrix<Complex64> {
    let t = model.topology();
    let n = t.n_nodes();
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for ((&(i, j), &p), &w) in t.edges().iter().zip(model.probs()).zip(model.admittances()) {
        let closed: f64 = rng.random();
        let xi = if closed < p { 1.0 } else { 0.0 };
        let d = w * (xi - p);
        y[(i, i)] += d;
        y[(j, j)] += d;
        y[(i, j)] -= d;
        y[(j, i)] -= d;
    }
    y
}

/// Monte Carlo sample of `‖Y - EY‖` under the contingency model.
pub fn contingency_norms_monte_carlo(
    model: &ContingencyModel,
    samples: usize,
    seed: u64,
) -> Result<SampleStats> {
    let chunks = chunked(samples, seed, 0, |rng, count| {
        (0..count)
            .map(|_| operator_norm(&centered_sample(model, rng)))
            .collect::<Result<Vec<f64>>>()
    });
    let mut norms = Vec::with_capacity(samples);
    for c in chunks {
        norms.extend(c?);
    }
    Ok(SampleStats::from_samples(norms))
}

/// Monte Carlo estimate of the matrix variance `E[ỸỸ*]`.
pub fn contingency_variance_estimate(
    model: &ContingencyModel,
    samples: usize,
    seed: u64,
) -> ComplexMatrixEstimate {
    let n = model.topology().n_nodes();
    let chunks = chunked(samples, seed, 1, |rng, count| {
        let mut re = MatrixMoments::new(n, n);
        let mut im = MatrixMoments::new(n, n);
        for _ in 0..count {
            let y = centered_sample(model, rng);
            let prod = &y * y.adjoint();
            re.push(&prod.map(|z| z.re));
            im.push(&prod.map(|z| z.im));
        }
        (re, im)
    });
    let mut re = MatrixMoments::new(n, n);
    let mut im = MatrixMoments::new(n, n);
    for (r, i) in &chunks {
        re.merge(r);
        im.merge(i);
    }
    let re = re.finish();
    let im = im.finish();
    ComplexMatrixEstimate {
        mean: re.mean.zip_map(&im.mean, Complex64::new),
        stderr_re: re.stderr,
        stderr_im: im.stderr,
        samples,
    }
}

fn model_from_config(cfg: &ExperimentConfig) -> Result<ContingencyModel> {
    let t = cfg.topology_or_complete()?;
    let laws = cfg.line_laws(
        t.n_edges(),
        LineDistribution::bernoulli(LineAdmittance::new(1.0, 0.0), 0.5),
    )?;
    ContingencyModel::from_distributions(t, &laws)
}

fn statistics(cfg: &ExperimentConfig, model: &ContingencyModel) -> Result<SampleStats> {
    match cfg.backend {
        Backend::Exact => brute_force_distribution(model),
        Backend::MonteCarlo => contingency_norms_monte_carlo(model, cfg.samples, cfg.seed),
    }
}

/// Tail probability against the contingency tail bound at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRecord {
    pub t: f64,
    pub statistic: f64,
    pub bound: f64,
    pub valid: bool,
    pub dominated: bool,
    pub exact: bool,
}

impl Record for TailRecord {
    const COLUMNS: &'static [&'static str] =
        &["t", "statistic", "bound", "valid", "dominated", "exact"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.t.into(),
            self.statistic.into(),
            self.bound.into(),
            self.valid.into(),
            self.dominated.into(),
            self.exact.into(),
        ]
    }
}

/// Exact statistics are compared directly; Monte Carlo frequencies get the
/// 99% one-sided binomial allowance. Outside the validity window no claim
/// is made.
fn tail_dominated(stats: &SampleStats, statistic: f64, bound: f64, valid: bool) -> bool {
    if !valid {
        return true;
    }
    if stats.exact {
        statistic <= bound
    } else {
        statistic <= binomial_upper_99(bound, stats.len())
    }
}

pub fn run_contingency_tail(cfg: &ExperimentConfig) -> Result<Vec<TailRecord>> {
    if cfg.t_grid.is_empty() {
        return Ok(Vec::new());
    }
    let model = model_from_config(cfg)?;
    let profile = contingency_factors(&model);
    let stats = statistics(cfg, &model)?;
    cfg.t_grid
        .iter()
        .map(|&t| {
            let bound = contingency_tail_bound(t, &profile)?;
            let statistic = stats.tail(t);
            Ok(TailRecord {
                t,
                statistic,
                bound: bound.value,
                valid: bound.valid,
                dominated: tail_dominated(&stats, statistic, bound.value, bound.valid),
                exact: stats.exact,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationRecord {
    pub delta_c: f64,
    pub d_bar: f64,
    pub statistic: f64,
    pub stderr: f64,
    pub explicit_bound: f64,
    pub constant_bound: f64,
    /// The bound selected by the config's form.
    pub bound: f64,
    pub dominated: bool,
    pub exact: bool,
}

impl Record for ExpectationRecord {
    const COLUMNS: &'static [&'static str] = &[
        "delta_c",
        "d_bar",
        "statistic",
        "stderr",
        "explicit_bound",
        "constant_bound",
        "bound",
        "dominated",
        "exact",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.delta_c.into(),
            self.d_bar.into(),
            self.statistic.into(),
            self.stderr.into(),
            self.explicit_bound.into(),
            self.constant_bound.into(),
            self.bound.into(),
            self.dominated.into(),
            self.exact.into(),
        ]
    }
}

pub fn run_contingency_expectation(cfg: &ExperimentConfig) -> Result<Vec<ExpectationRecord>> {
    let model = model_from_config(cfg)?;
    let profile = contingency_factors(&model);
    let stats = statistics(cfg, &model)?;
    let explicit = contingency_expectation_bound(&profile, ExpectationForm::Explicit)?.value;
    let c = match cfg.form {
        ExpectationForm::WithConstant { c } => c,
        ExpectationForm::Explicit => 1.0,
    };
    let constant =
        contingency_expectation_bound(&profile, ExpectationForm::WithConstant { c })?.value;
    let bound = match cfg.form {
        ExpectationForm::Explicit => explicit,
        ExpectationForm::WithConstant { .. } => constant,
    };
    Ok(vec![ExpectationRecord {
        delta_c: profile.delta_c,
        d_bar: profile.d_bar,
        statistic: stats.mean,
        stderr: stats.stderr,
        explicit_bound: explicit,
        constant_bound: constant,
        bound,
        dominated: stats.mean <= bound,
        exact: stats.exact,
    }])
}

/// Exhaustive-enumeration row: exact tail and mean next to the bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceRecord {
    pub t: f64,
    pub exact_tail: f64,
    pub exact_mean: f64,
    pub patterns: usize,
    pub bound: f64,
    pub valid: bool,
    pub dominated: bool,
}

impl Record for BruteForceRecord {
    const COLUMNS: &'static [&'static str] = &[
        "t",
        "exact_tail",
        "exact_mean",
        "patterns",
        "bound",
        "valid",
        "dominated",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.t.into(),
            self.exact_tail.into(),
            self.exact_mean.into(),
            self.patterns.into(),
            self.bound.into(),
            self.valid.into(),
            self.dominated.into(),
        ]
    }
}

pub fn run_bruteforce(cfg: &ExperimentConfig) -> Result<Vec<BruteForceRecord>> {
    if cfg.t_grid.is_empty() {
        return Ok(Vec::new());
    }
    let model = model_from_config(cfg)?;
    let profile = contingency_factors(&model);
    let stats = brute_force_distribution(&model)?;
    cfg.t_grid
        .iter()
        .map(|&t| {
            let bound = contingency_tail_bound(t, &profile)?;
            let exact_tail = stats.tail(t);
            Ok(BruteForceRecord {
                t,
                exact_tail,
                exact_mean: stats.mean,
                patterns: stats.len(),
                bound: bound.value,
                valid: bound.valid,
                dominated: !bound.valid || exact_tail <= bound.value,
            })
        })
        .collect()
}
