//! Closed-form concentration bounds for random admittance and flat-start
//! Jacobian matrices.
//!
//! All logarithms are natural. Tail bounds are reported raw and may exceed
//! one; use [`BoundReport::clamped`] for a probability-valued view.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::admittance::LineDistribution;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::spectra::{kron, operator_norm};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `E‖Y‖` for bounded admittances, from the maximum degree.
    DegreeExpectation,
    /// Deterministic `‖Y‖ ≤ 2Δ·max|w|`.
    DegreeDeterministic,
    /// Tail of `‖Y - EY‖` under Bernoulli line contingencies.
    ContingencyTail,
    /// `E‖Y - EY‖` under Bernoulli line contingencies.
    ContingencyExpectation,
    BernsteinTail,
    LcpfTail,
    LcpfExpectation,
    ManifoldDistance,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

/// An evaluated bound together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub inputs: BTreeMap<String, f64>,
    pub value: f64,
    /// Whether the bound's hypothesis window holds for these inputs.
    pub valid: bool,
    #[serde(default)]
    pub degenerate: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(kind: BoundKind, inputs: &[(&str, f64)], value: f64) -> Self {
        BoundReport {
            kind,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
            valid: true,
            degenerate: false,
            notes: Vec::new(),
        }
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// `min(1, value)`.
    pub fn clamped(&self) -> f64 {
        self.value.min(1.0)
    }

    pub fn input(&self, name: &str) -> Option<f64> {
        self.inputs.get(name).copied()
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidBoundArgument(msg()))
    }
}

/// `E‖Y‖ ≤ √(4Δ log 4n) + (2/3) log 4n` for `|w_l| ≤ 1`.
pub fn degree_expectation_bound(n: usize, max_degree: f64) -> Result<BoundReport> {
    ensure(n >= 1, || "n must be at least 1".into())?;
    ensure(max_degree >= 0.0 && max_degree.is_finite(), || {
        format!("max degree {max_degree} must be nonnegative")
    })?;
    let log4n = (4.0 * n as f64).ln();
    let value = (4.0 * max_degree * log4n).sqrt() + 2.0 / 3.0 * log4n;
    Ok(BoundReport::new(
        BoundKind::DegreeExpectation,
        &[("n", n as f64), ("max_degree", max_degree)],
        value,
    ))
}

/// `‖Y‖ ≤ ‖D‖ + ‖A_w‖ ≤ 2Δ·max|w|`, holding for every realization.
pub fn degree_deterministic_bound(max_degree: f64, max_modulus: f64) -> Result<BoundReport> {
    ensure(max_degree >= 0.0 && max_modulus >= 0.0, || {
        "degree and modulus must be nonnegative".into()
    })?;
    Ok(BoundReport::new(
        BoundKind::DegreeDeterministic,
        &[("max_degree", max_degree), ("max_modulus", max_modulus)],
        2.0 * max_degree * max_modulus,
    ))
}

/// Rejects line laws that can produce `|w| > 1`.
pub fn check_unit_support(dists: &[LineDistribution]) -> Result<()> {
    for (line, d) in dists.iter().enumerate() {
        d.validate()?;
        let modulus = d.max_modulus();
        if modulus > 1.0 + UNIT_TOL {
            return Err(Error::AdmittanceTooLarge { line, modulus });
        }
    }
    Ok(())
}

/// Independent Bernoulli switching of each line of a topology, line `l`
/// closed with probability `probs[l]` and then carrying admittance
/// `admittances[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyModel {
    topology: Topology,
    probs: Vec<f64>,
    admittances: Vec<Complex64>,
}

impl ContingencyModel {
    pub fn new(topology: Topology, probs: Vec<f64>, admittances: Vec<Complex64>) -> Result<Self> {
        let m = topology.n_edges();
        for len in [probs.len(), admittances.len()] {
            if len != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    actual: len,
                });
            }
        }
        for &p in &probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        for (line, y) in admittances.iter().enumerate() {
            if !y.is_finite() || y.norm() > 1.0 + UNIT_TOL {
                return Err(Error::AdmittanceTooLarge {
                    line,
                    modulus: y.norm(),
                });
            }
        }
        Ok(ContingencyModel {
            topology,
            probs,
            admittances,
        })
    }

    /// Every line closed with probability `p` and admittance `y`.
    pub fn homogeneous(topology: Topology, p: f64, y: Complex64) -> Result<Self> {
        let m = topology.n_edges();
        ContingencyModel::new(topology, vec![p; m], vec![y; m])
    }

    /// Builds the model from per-line laws, all of which must be Bernoulli.
    pub fn from_distributions(topology: Topology, dists: &[LineDistribution]) -> Result<Self> {
        let mut probs = Vec::with_capacity(dists.len());
        let mut ys = Vec::with_capacity(dists.len());
        for d in dists {
            match *d {
                LineDistribution::Bernoulli { g, b, p } => {
                    probs.push(p);
                    ys.push(Complex64::new(g, b));
                }
                other => {
                    return Err(Error::InvalidDistribution(format!(
                        "contingency model needs Bernoulli lines, got {other:?}"
                    )))
                }
            }
        }
        ContingencyModel::new(topology, probs, ys)
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn admittances(&self) -> &[Complex64] {
        &self.admittances
    }

    pub fn distributions(&self) -> Vec<LineDistribution> {
        self.probs
            .iter()
            .zip(&self.admittances)
            .map(|(&p, y)| LineDistribution::Bernoulli {
                g: y.re,
                b: y.im,
                p,
            })
            .collect()
    }

    /// `c_l = 2 p_l (1 - p_l) |y_l|²`.
    pub fn contingency_factors(&self) -> Vec<f64> {
        self.probs
            .iter()
            .zip(&self.admittances)
            .map(|(&p, y)| 2.0 * p * (1.0 - p) * y.norm_sqr())
            .collect()
    }

    /// Matrix variance `E[ỸỸ*] = Aᵀ diag(c) A`.
    pub fn variance_laplacian(&self) -> DMatrix<f64> {
        self.topology
            .weighted_laplacian(&self.contingency_factors())
    }
}

/// Per-line contingency factors and per-node criticality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityProfile {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub delta_c: f64,
    /// `Σ d_i / Δ_c`; zero when degenerate.
    pub d_bar: f64,
    /// True when every factor vanishes and `Ỹ ≡ 0`.
    pub degenerate: bool,
}

pub fn contingency_factors(model: &ContingencyModel) -> CriticalityProfile {
    let c = model.contingency_factors();
    let mut d = vec![0.0; model.topology.n_nodes()];
    for (&(i, j), &cl) in model.topology.edges().iter().zip(&c) {
        d[i] += cl;
        d[j] += cl;
    }
    let delta_c = d.iter().copied().fold(0.0, f64::max);
    let degenerate = delta_c == 0.0;
    let d_bar = if degenerate {
        0.0
    } else {
        d.iter().sum::<f64>() / delta_c
    };
    CriticalityProfile {
        c,
        d,
        delta_c,
        d_bar,
        degenerate,
    }
}

impl CriticalityProfile {
    /// Smallest `t` for which the contingency tail bound applies.
    pub fn tail_threshold(&self) -> f64 {
        (2.0 * self.delta_c).sqrt() + 2.0 / 3.0
    }

    fn dilation_note(&self) -> String {
        format!(
            "dilation dimension d = 2·intdim(V) ≤ 2·D̄ = {}",
            2.0 * self.d_bar
        )
    }
}

/// `Pr(‖Ỹ‖ ≥ t) ≤ 8 D̄ exp(-t² / (4(Δ_c + t/3)))`, valid for
/// `t ≥ √(2Δ_c) + 2/3`.
pub fn contingency_tail_bound(t: f64, profile: &CriticalityProfile) -> Result<BoundReport> {
    ensure(t >= 0.0, || format!("t = {t} must be nonnegative"))?;
    let inputs = [
        ("t", t),
        ("delta_c", profile.delta_c),
        ("d_bar", profile.d_bar),
    ];
    if profile.degenerate {
        let value = if t > 0.0 { 0.0 } else { 1.0 };
        let mut r = BoundReport::new(BoundKind::ContingencyTail, &inputs, value)
            .note("all contingency factors vanish; Ỹ = 0 almost surely");
        r.degenerate = true;
        return Ok(r);
    }
    let dc = profile.delta_c;
    let value = 8.0 * profile.d_bar * (-t * t / (4.0 * (dc + t / 3.0))).exp();
    let mut r =
        BoundReport::new(BoundKind::ContingencyTail, &inputs, value).note(profile.dilation_note());
    r.valid = t >= profile.tail_threshold();
    Ok(r)
}

/// Form of the contingency expectation bound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ExpectationForm {
    /// `√(2ν log(1+d)) + (2/3)L log(1+d) + 4√ν + (8/3)L` with `ν = 2Δ_c`,
    /// `L = 2`, `d = 2D̄`.
    #[default]
    Explicit,
    /// `C·(√(2Δ_c log(1+2D̄)) + 2 log(1+2D̄))`.
    WithConstant { c: f64 },
}

pub fn contingency_expectation_bound(
    profile: &CriticalityProfile,
    form: ExpectationForm,
) -> Result<BoundReport> {
    if let ExpectationForm::WithConstant { c } = form {
        ensure(c > 0.0 && c.is_finite(), || {
            format!("constant C = {c} must be positive")
        })?;
    }
    let mut inputs = vec![("delta_c", profile.delta_c), ("d_bar", profile.d_bar)];
    let form_note = match form {
        ExpectationForm::Explicit => "explicit form".to_string(),
        ExpectationForm::WithConstant { c } => {
            inputs.push(("c", c));
            format!("constant form, C = {c}")
        }
    };
    if profile.degenerate {
        let mut r = BoundReport::new(BoundKind::ContingencyExpectation, &inputs, 0.0)
            .note(form_note)
            .note("all contingency factors vanish; Ỹ = 0 almost surely");
        r.degenerate = true;
        return Ok(r);
    }
    let log1d = (1.0 + 2.0 * profile.d_bar).ln();
    let value = match form {
        ExpectationForm::Explicit => {
            let nu = 2.0 * profile.delta_c;
            let big_l = 2.0;
            (2.0 * nu * log1d).sqrt()
                + 2.0 / 3.0 * big_l * log1d
                + 4.0 * nu.sqrt()
                + 8.0 / 3.0 * big_l
        }
        ExpectationForm::WithConstant { c } => {
            c * ((2.0 * profile.delta_c * log1d).sqrt() + 2.0 * log1d)
        }
    };
    Ok(
        BoundReport::new(BoundKind::ContingencyExpectation, &inputs, value)
            .note(form_note)
            .note(profile.dilation_note()),
    )
}

/// Matrix Bernstein tail `2·dim·exp(-t² / (2Rt + 4ν))`.
pub fn bernstein_tail(t: f64, dim: usize, big_r: f64, nu: f64) -> Result<BoundReport> {
    ensure(t >= 0.0, || format!("t = {t} must be nonnegative"))?;
    ensure(big_r > 0.0, || format!("R = {big_r} must be positive"))?;
    ensure(nu >= 0.0, || format!("ν = {nu} must be nonnegative"))?;
    let denom = 2.0 * big_r * t + 4.0 * nu;
    let exponent = if t == 0.0 { 0.0 } else { -t * t / denom };
    Ok(BoundReport::new(
        BoundKind::BernsteinTail,
        &[("t", t), ("dim", dim as f64), ("r", big_r), ("nu", nu)],
        2.0 * dim as f64 * exponent.exp(),
    ))
}

/// Line-weight model behind a flat-start Jacobian variance envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EnvelopeMode {
    /// Conductances and susceptances uniform on a sphere with `yᵀy = 1/2`.
    Sphere,
    /// Perturbations bounded by `delta` in each of `g` and `b`.
    Bounded { delta: f64 },
}

/// PSD upper envelope of `E[FFᵀ]` and its variance statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceEnvelope {
    /// `scale · I₂ ⊗ AᵀA`.
    pub matrix: DMatrix<f64>,
    pub scale: f64,
    /// `ν = ‖matrix‖`.
    pub nu: f64,
    /// Closed-form cap on `ν` for simple graphs: `2` (sphere) or `4Δ²n`.
    pub nu_cap: f64,
}

pub fn lcpf_variance_envelope(t: &Topology, mode: EnvelopeMode) -> Result<VarianceEnvelope> {
    let n = t.n_nodes() as f64;
    let (scale, nu_cap) = match mode {
        EnvelopeMode::Sphere => (2.0 / n, 2.0),
        EnvelopeMode::Bounded { delta } => {
            ensure(delta >= 0.0, || {
                format!("delta = {delta} must be nonnegative")
            })?;
            (4.0 * delta * delta, 4.0 * delta * delta * n)
        }
    };
    let lap = t.laplacian();
    let matrix = kron(&DMatrix::identity(2, 2), &lap) * scale;
    let nu = scale * operator_norm(&lap)?;
    Ok(VarianceEnvelope {
        matrix,
        scale,
        nu,
        nu_cap,
    })
}

/// `n·exp(-t² / (4(Δ²n + Δt/3)))` for `‖F - EF‖` under bounded
/// perturbations.
pub fn lcpf_tail_bound(t: f64, n: usize, delta: f64) -> Result<BoundReport> {
    ensure(t >= 0.0, || format!("t = {t} must be nonnegative"))?;
    ensure(n >= 1, || "n must be at least 1".into())?;
    ensure(delta >= 0.0, || {
        format!("delta = {delta} must be nonnegative")
    })?;
    let nf = n as f64;
    let value = if t == 0.0 {
        nf
    } else if delta == 0.0 {
        0.0
    } else {
        nf * (-t * t / (4.0 * (delta * delta * nf + delta * t / 3.0))).exp()
    };
    let mut r = BoundReport::new(
        BoundKind::LcpfTail,
        &[("t", t), ("n", nf), ("delta", delta)],
        value,
    )
    .note(
        "holds up to an unspecified dimensional prefactor; rigorous alternatives are \
         8·D̄ (intrinsic dimension) or 2·(2n) (matrix Bernstein)",
    );
    r.degenerate = delta == 0.0;
    Ok(r)
}

/// `2Δ√2 (√(n log 4n) + (1/3) log 4n)`.
pub fn lcpf_expectation_bound(n: usize, delta: f64) -> Result<BoundReport> {
    ensure(n >= 1, || "n must be at least 1".into())?;
    ensure(delta >= 0.0, || {
        format!("delta = {delta} must be nonnegative")
    })?;
    let nf = n as f64;
    let log4n = (4.0 * nf).ln();
    let value = 2.0 * delta * 2f64.sqrt() * ((nf * log4n).sqrt() + log4n / 3.0);
    let mut r = BoundReport::new(
        BoundKind::LcpfExpectation,
        &[("n", nf), ("delta", delta)],
        value,
    );
    r.degenerate = delta == 0.0;
    Ok(r)
}
