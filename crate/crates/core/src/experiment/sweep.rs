use rayon::prelude::*;
use serde::Serialize;

use super::stats::stream_rng;
use super::table::{Cell, Record};
use super::{ExperimentConfig, LineSpec};
use crate::admittance::{assemble_admittance, sample_weights, LineDistribution};
use crate::bounds::{check_unit_support, degree_expectation_bound};
use crate::error::Result;
use crate::graph::sample_er_topology;
use crate::spectra::operator_norm;

/// One sampled network of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub p: f64,
    pub sample_index: usize,
    pub m: usize,
    pub delta: usize,
    pub norm: f64,
    /// Expectation bound evaluated at this sample's realized max degree.
    pub bound: f64,
    pub dominated: bool,
}

impl Record for SweepRecord {
    const COLUMNS: &'static [&'static str] = &[
        "p",
        "sample_index",
        "m",
        "delta",
        "norm",
        "bound",
        "dominated",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.p.into(),
            self.sample_index.into(),
            self.m.into(),
            self.delta.into(),
            self.norm.into(),
            self.bound.into(),
            self.dominated.into(),
        ]
    }
}

/// Homogeneous Erdős–Rényi sweep: for every `p` and sample, draw a topology
/// and line weights, then record `‖Y‖` next to the bound at the realized
/// maximum degree.
pub fn run_norm_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    let law = match &cfg.lines {
        Some(LineSpec::Uniform(d)) => *d,
        Some(LineSpec::PerLine(_)) => {
            return Err(crate::Error::Config(
                "the norm sweep needs a single line law".into(),
            ))
        }
        None => LineDistribution::Disk,
    };
    check_unit_support(&[law])?;
    let jobs: Vec<(usize, usize)> = (0..cfg.p_sweep.len())
        .flat_map(|k| (0..cfg.samples).map(move |s| (k, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(k, s)| {
            let p = cfg.p_sweep[k];
            let mut rng = stream_rng(cfg.seed, k as u32, s as u32);
            let topo = sample_er_topology(cfg.n, p, &mut rng)?;
            let weights = sample_weights(&vec![law; topo.n_edges()], &mut rng)?;
            let y = assemble_admittance(&topo, &weights)?;
            let norm = operator_norm(y.matrix())?;
            let delta = topo.max_degree();
            let bound = degree_expectation_bound(cfg.n, delta as f64)?.value;
            Ok(SweepRecord {
                p,
                sample_index: s,
                m: topo.n_edges(),
                delta,
                norm,
                bound,
                dominated: bound >= norm,
            })
        })
        .collect()
}

/// Per-`p` averages of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub p: f64,
    pub samples: usize,
    pub mean_m: f64,
    pub mean_norm: f64,
    pub mean_bound: f64,
    pub violations: usize,
}

impl Record for SweepPoint {
    const COLUMNS: &'static [&'static str] = &[
        "p",
        "samples",
        "mean_m",
        "mean_norm",
        "mean_bound",
        "violations",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.p.into(),
            self.samples.into(),
            self.mean_m.into(),
            self.mean_norm.into(),
            self.mean_bound.into(),
            self.violations.into(),
        ]
    }
}

/// Groups consecutive records with equal `p`.
pub fn summarize_sweep(records: &[SweepRecord]) -> Vec<SweepPoint> {
    records
        .chunk_by(|a, b| a.p == b.p)
        .map(|group| {
            let n = group.len() as f64;
            SweepPoint {
                p: group[0].p,
                samples: group.len(),
                mean_m: group.iter().map(|r| r.m as f64).sum::<f64>() / n,
                mean_norm: group.iter().map(|r| r.norm).sum::<f64>() / n,
                mean_bound: group.iter().map(|r| r.bound).sum::<f64>() / n,
                violations: group.iter().filter(|r| !r.dominated).count(),
            }
        })
        .collect()
}
