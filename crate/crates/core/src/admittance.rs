//! Admittance matrices `Y = Aᵀ diag(w) A`, their real lifted form, the
//! elementary Laplacian / Jacobian building blocks, and random line-weight
//! models.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::spectra::{block_2x2, kron};

/// Complex line admittance `w = g + j·b` in per-unit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LineAdmittance {
    pub g: f64,
    pub b: f64,
}

impl LineAdmittance {
    pub const ZERO: LineAdmittance = LineAdmittance { g: 0.0, b: 0.0 };

    pub fn new(g: f64, b: f64) -> Self {
        LineAdmittance { g, b }
    }

    pub fn w(&self) -> Complex64 {
        Complex64::new(self.g, self.b)
    }

    pub fn modulus(&self) -> f64 {
        self.g.hypot(self.b)
    }

    pub fn is_finite(&self) -> bool {
        self.g.is_finite() && self.b.is_finite()
    }
}

impl From<Complex64> for LineAdmittance {
    fn from(w: Complex64) -> Self {
        LineAdmittance { g: w.re, b: w.im }
    }
}

/// Randomness model for a single line.
///
/// `Sphere` is a joint law: every line of a draw must use the same sphere
/// parameters, and the conductance and susceptance vectors are each uniform
/// on a sphere of squared radius `radius_sq` in `ambient_dim` dimensions
/// (defaulting to the number of lines), restricted to the first `m`
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineDistribution {
    /// `w = y·ξ` with `ξ ~ Bernoulli(p)`.
    Bernoulli {
        g: f64,
        b: f64,
        p: f64,
    },
    /// `g + U(-δ, δ)`, `b + U(-δ, δ)`.
    Bounded {
        g: f64,
        b: f64,
        delta: f64,
    },
    Sphere {
        #[serde(default = "default_radius_sq")]
        radius_sq: f64,
        #[serde(default)]
        ambient_dim: Option<usize>,
    },
    Fixed {
        g: f64,
        b: f64,
    },
    /// Uniform on the quarter of the complex unit disk with `g ≥ 0, b ≤ 0`.
    Disk,
}

fn default_radius_sq() -> f64 {
    0.5
}

impl LineDistribution {
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match *self {
            LineDistribution::Bernoulli { g, b, p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidProbability(p));
                }
                finite(&[g, b])
            }
            LineDistribution::Bounded { g, b, delta } => finite(&[g, b, delta]) && delta >= 0.0,
            LineDistribution::Sphere { radius_sq, .. } => radius_sq.is_finite() && radius_sq >= 0.0,
            LineDistribution::Fixed { g, b } => finite(&[g, b]),
            LineDistribution::Disk => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDistribution(format!("{self:?}")))
        }
    }

    /// Per-line mean of `w`.
    pub fn mean(&self) -> Complex64 {
        match *self {
            LineDistribution::Bernoulli { g, b, p } => Complex64::new(g, b) * p,
            LineDistribution::Bounded { g, b, .. } | LineDistribution::Fixed { g, b } => {
                Complex64::new(g, b)
            }
            LineDistribution::Sphere { .. } => Complex64::new(0.0, 0.0),
            LineDistribution::Disk => {
                let m = 4.0 / (3.0 * std::f64::consts::PI);
                Complex64::new(m, -m)
            }
        }
    }

    /// Largest `|w|` the law can produce.
    pub fn max_modulus(&self) -> f64 {
        match *self {
            LineDistribution::Bernoulli { g, b, .. } | LineDistribution::Fixed { g, b } => {
                g.hypot(b)
            }
            LineDistribution::Bounded { g, b, delta } => (g.abs() + delta).hypot(b.abs() + delta),
            LineDistribution::Sphere { radius_sq, .. } => (2.0 * radius_sq).sqrt(),
            LineDistribution::Disk => 1.0,
        }
    }

    pub fn bernoulli(w: LineAdmittance, p: f64) -> Self {
        LineDistribution::Bernoulli { g: w.g, b: w.b, p }
    }

    pub fn fixed(w: LineAdmittance) -> Self {
        LineDistribution::Fixed { g: w.g, b: w.b }
    }

    pub fn bounded(center: LineAdmittance, delta: f64) -> Self {
        LineDistribution::Bounded {
            g: center.g,
            b: center.b,
            delta,
        }
    }

    fn sample_single<R: Rng + ?Sized>(&self, rng: &mut R) -> LineAdmittance {
        match *self {
            LineDistribution::Bernoulli { g, b, p } => {
                let closed: f64 = rng.random();
                if closed < p {
                    LineAdmittance::new(g, b)
                } else {
                    LineAdmittance::ZERO
                }
            }
            LineDistribution::Bounded { g, b, delta } => {
                let dg = delta * (2.0 * rng.random::<f64>() - 1.0);
                let db = delta * (2.0 * rng.random::<f64>() - 1.0);
                LineAdmittance::new(g + dg, b + db)
            }
            LineDistribution::Fixed { g, b } => LineAdmittance::new(g, b),
            LineDistribution::Disk => {
                let r = rng.random::<f64>().sqrt();
                let angle = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
                LineAdmittance::new(r * angle.cos(), -r * angle.sin())
            }
            LineDistribution::Sphere { .. } => unreachable!("sphere draws are joint"),
        }
    }
}

/// Every line of the network under one law.
pub fn homogeneous(t: &Topology, dist: LineDistribution) -> Vec<LineDistribution> {
    vec![dist; t.n_edges()]
}

fn sphere_vector<R: Rng + ?Sized>(radius_sq: f64, dim: usize, m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let scale = radius_sq.sqrt() / norm;
            return z.into_iter().take(m).map(|x| x * scale).collect();
        }
    }
}

/// One joint draw of line admittances, one entry per distribution.
pub fn sample_weights<R: Rng + ?Sized>(
    dists: &[LineDistribution],
    rng: &mut R,
) -> Result<Vec<LineAdmittance>> {
    for d in dists {
        d.validate()?;
    }
    let sphere: Vec<_> = dists
        .iter()
        .filter(|d| matches!(d, LineDistribution::Sphere { .. }))
        .collect();
    if sphere.is_empty() {
        return Ok(dists.iter().map(|d| d.sample_single(rng)).collect());
    }
    if sphere.len() != dists.len() || sphere.iter().any(|d| **d != dists[0]) {
        return Err(Error::InvalidDistribution(
            "sphere law must be shared by every line".into(),
        ));
    }
    let LineDistribution::Sphere {
        radius_sq,
        ambient_dim,
    } = dists[0]
    else {
        unreachable!()
    };
    let m = dists.len();
    let dim = ambient_dim.unwrap_or(m);
    if dim < m {
        return Err(Error::InvalidDistribution(format!(
            "sphere ambient dimension {dim} is smaller than the {m} lines"
        )));
    }
    let g = sphere_vector(radius_sq, dim, m, rng);
    let b = sphere_vector(radius_sq, dim, m, rng);
    Ok(g.into_iter()
        .zip(b)
        .map(|(g, b)| LineAdmittance::new(g, b))
        .collect())
}

/// `E_ij = (e_i - e_j)(e_i - e_j)ᵀ` in `n` dimensions.
pub fn elementary_laplacian(i: usize, j: usize, n: usize) -> Result<DMatrix<f64>> {
    check_pair(i, j, n)?;
    let mut e = DMatrix::zeros(n, n);
    e[(i, i)] = 1.0;
    e[(j, j)] = 1.0;
    e[(i, j)] = -1.0;
    e[(j, i)] = -1.0;
    Ok(e)
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    for node in [i, j] {
        if node >= n {
            return Err(Error::EndpointOutOfRange {
                edge: 0,
                node,
                n_nodes: n,
            });
        }
    }
    if i == j {
        return Err(Error::SelfLoop { edge: 0, node: i });
    }
    Ok(())
}

/// Sign pattern of the 2×2 per-line admittance block `Υ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpsilonConvention {
    /// `[[g, b], [b, -g]]`, the block of the lifted admittance matrix.
    Lifted,
    /// `[[g, -b], [-b, -g]]`, the block of the flat-start Jacobian.
    Jacobian,
}

pub fn upsilon(g: f64, b: f64, convention: UpsilonConvention) -> DMatrix<f64> {
    let off = match convention {
        UpsilonConvention::Lifted => b,
        UpsilonConvention::Jacobian => -b,
    };
    DMatrix::from_row_slice(2, 2, &[g, off, off, -g])
}

/// `M_ij = Υ(g, b) ⊗ E_ij`, a `2n × 2n` matrix with `‖M_ij‖ = 2|y|`.
pub fn elementary_jacobian(
    g: f64,
    b: f64,
    i: usize,
    j: usize,
    n: usize,
    convention: UpsilonConvention,
) -> Result<DMatrix<f64>> {
    let e = elementary_laplacian(i, j, n)?;
    Ok(kron(&upsilon(g, b, convention), &e))
}

/// `Σ_l Υ_l ⊗ E_l` over the lines of `t`.
pub fn kronecker_sum(
    t: &Topology,
    weights: &[LineAdmittance],
    convention: UpsilonConvention,
) -> Result<DMatrix<f64>> {
    check_len(t, weights.len())?;
    let n = t.n_nodes();
    let mut acc = DMatrix::zeros(2 * n, 2 * n);
    for (&(i, j), w) in t.edges().iter().zip(weights) {
        acc += elementary_jacobian(w.g, w.b, i, j, n, convention)?;
    }
    Ok(acc)
}

fn check_len(t: &Topology, len: usize) -> Result<()> {
    if len != t.n_edges() {
        return Err(Error::LengthMismatch {
            expected: t.n_edges(),
            actual: len,
        });
    }
    Ok(())
}

/// Complex symmetric bus admittance matrix together with its topology.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceMatrix {
    y: DMatrix<Complex64>,
    topology: Topology,
}

impl AdmittanceMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.y
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    /// `G = Re(Y)`.
    pub fn conductance(&self) -> DMatrix<f64> {
        self.y.map(|w| w.re)
    }

    /// `B = Im(Y)`.
    pub fn susceptance(&self) -> DMatrix<f64> {
        self.y.map(|w| w.im)
    }
}

/// `Y = Σ_l w_l a_l a_lᵀ`.
pub fn assemble_admittance(t: &Topology, weights: &[LineAdmittance]) -> Result<AdmittanceMatrix> {
    check_len(t, weights.len())?;
    assemble_from_complex(t, weights.iter().map(LineAdmittance::w))
}

fn assemble_from_complex(
    t: &Topology,
    weights: impl Iterator<Item = Complex64>,
) -> Result<AdmittanceMatrix> {
    let n = t.n_nodes();
    let mut y = DMatrix::zeros(n, n);
    for (&(i, j), w) in t.edges().iter().zip(weights) {
        y[(i, i)] += w;
        y[(j, j)] += w;
        y[(i, j)] -= w;
        y[(j, i)] -= w;
    }
    Ok(AdmittanceMatrix {
        y,
        topology: t.clone(),
    })
}

/// `Ȳ = [[G, B], [B, -G]]`, real symmetric with `‖Ȳ‖ = ‖Y‖`.
pub fn lift_real(y: &AdmittanceMatrix) -> DMatrix<f64> {
    let g = y.conductance();
    let b = y.susceptance();
    block_2x2(&g, &b, &b, &(-&g))
}

/// `E[Y] = Σ_l E[w_l] E_l`.
pub fn expected_admittance(t: &Topology, dists: &[LineDistribution]) -> Result<AdmittanceMatrix> {
    check_len(t, dists.len())?;
    for d in dists {
        d.validate()?;
    }
    assemble_from_complex(t, dists.iter().map(LineDistribution::mean))
}

/// `Ỹ = Y - E[Y]`.
pub fn center(
    sample: &AdmittanceMatrix,
    expected: &AdmittanceMatrix,
) -> Result<DMatrix<Complex64>> {
    if sample.y.shape() != expected.y.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            sample.y.shape(),
            expected.y.shape()
        )));
    }
    Ok(&sample.y - &expected.y)
}
