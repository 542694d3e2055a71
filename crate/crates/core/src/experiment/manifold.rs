use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::stats::stream_rng;
use super::table::{Cell, Record};
use super::ExperimentConfig;
use crate::admittance::{assemble_admittance, sample_weights, LineDistribution};
use crate::bounds::{check_unit_support, degree_expectation_bound};
use crate::error::Result;
use crate::manifold::{
    distance_bound, expected_distance_bound, norm2, norm_inf, same_voltage_proxy_distance,
    tangent_residual, taylor_residual, ComplexVector, DistanceMode, ManifoldPoint, TangentStep,
};
use crate::spectra::operator_norm;

/// Relative tolerance for the closed-form vs Taylor residual comparison.
const RESIDUAL_TOL: f64 = 1e-12;

/// One random admittance matrix with a fixed base voltage and step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldRecord {
    pub sample: usize,
    pub h_inf: f64,
    pub h_2: f64,
    pub y_norm: f64,
    pub residual_norm: f64,
    pub taylor_gap: f64,
    pub proxy_distance: f64,
    /// `3‖F(z̄)‖`.
    pub certificate: f64,
    pub holder_bound: f64,
    pub crude_bound: f64,
    /// `3‖h‖_∞‖h‖₂` times the expectation bound on `‖Y‖`.
    pub expected_bound: f64,
    pub dominated: bool,
}

impl Record for ManifoldRecord {
    const COLUMNS: &'static [&'static str] = &[
        "sample",
        "h_inf",
        "h_2",
        "y_norm",
        "residual_norm",
        "taylor_gap",
        "proxy_distance",
        "certificate",
        "holder_bound",
        "crude_bound",
        "expected_bound",
        "dominated",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.sample.into(),
            self.h_inf.into(),
            self.h_2.into(),
            self.y_norm.into(),
            self.residual_norm.into(),
            self.taylor_gap.into(),
            self.proxy_distance.into(),
            self.certificate.into(),
            self.holder_bound.into(),
            self.crude_bound.into(),
            self.expected_bound.into(),
            self.dominated.into(),
        ]
    }
}

fn random_complex<R: Rng + ?Sized>(
    n: usize,
    center: f64,
    scale: f64,
    rng: &mut R,
) -> ComplexVector {
    DVector::from_fn(n, |_, _| {
        let re = 2.0 * rng.random::<f64>() - 1.0;
        let im = 2.0 * rng.random::<f64>() - 1.0;
        Complex64::new(center + scale * re, scale * im)
    })
}

/// Draws a base voltage near flat start and a step `h` once, then for each
/// sample a random admittance matrix, and records the residual of the
/// tangent step against its norm bounds.
pub fn run_manifold_experiment(cfg: &ExperimentConfig) -> Result<Vec<ManifoldRecord>> {
    let t = cfg.topology_or_complete()?;
    let laws = cfg.line_laws(t.n_edges(), LineDistribution::Disk)?;
    check_unit_support(&laws)?;
    let n = t.n_nodes();
    let mut setup = stream_rng(cfg.seed, u32::MAX, 0);
    let u_star = random_complex(n, 1.0, 0.1, &mut setup);
    let h = random_complex(n, 0.0, cfg.step_scale, &mut setup);
    let h_inf = norm_inf(&h);
    let h_2 = norm2(&h);
    let source = degree_expectation_bound(n, t.max_degree() as f64)?;
    let expected_bound = expected_distance_bound(&h, &source)?.value;

    (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(cfg.seed, 0, s as u32);
            let w = sample_weights(&laws, &mut rng)?;
            let y = assemble_admittance(&t, &w)?;
            let y_norm = operator_norm(y.matrix())?;
            let base = ManifoldPoint::new(&y, u_star.clone())?;
            let step = TangentStep::new(base, h.clone())?;
            let closed = tangent_residual(&y, &step)?;
            let direct = taylor_residual(&y, &step)?;
            let residual_norm = norm2(&closed);
            let taylor_gap = norm2(&(&direct - &closed));
            let proxy_distance = same_voltage_proxy_distance(&y, &step)?;
            let certificate = 3.0 * residual_norm;
            let holder_bound = distance_bound(&h, y_norm, DistanceMode::Holder)?;
            let crude_bound = distance_bound(&h, y_norm, DistanceMode::Crude)?;
            let slack = RESIDUAL_TOL * (1.0 + residual_norm);
            let dominated = taylor_gap <= slack
                && proxy_distance <= certificate + slack
                && certificate <= holder_bound + slack
                && holder_bound <= crude_bound + slack;
            Ok(ManifoldRecord {
                sample: s,
                h_inf,
                h_2,
                y_norm,
                residual_norm,
                taylor_gap,
                proxy_distance,
                certificate,
                holder_bound,
                crude_bound,
                expected_bound,
                dominated,
            })
        })
        .collect()
}
