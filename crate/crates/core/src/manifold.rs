//! Power flow manifold `{(u, s) : s = Ψ_Y(u) = diag(u)·conj(Y u)}` and the
//! residual certificate for linearized (tangent) steps.
//!
//! `Ψ_Y` is quadratic in `u`, so a tangent step `u + h` misses the manifold
//! by exactly `diag(h)·conj(Y h)`. Distances use the 2-norm of the stacked
//! real and imaginary parts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::admittance::AdmittanceMatrix;
use crate::bounds::{
    contingency_expectation_bound, BoundKind, BoundReport, CriticalityProfile, ExpectationForm,
};
use crate::error::{Error, Result};

pub type ComplexVector = DVector<Complex64>;

fn check_dim(y: &DMatrix<Complex64>, v: &ComplexVector, what: &str) -> Result<()> {
    if v.len() != y.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{what} has length {}, admittance matrix is {}×{}",
            v.len(),
            y.nrows(),
            y.ncols()
        )));
    }
    Ok(())
}

/// `Ψ_Y(u)_i = u_i · conj((Y u)_i)`.
pub fn power_flow_map(y: &AdmittanceMatrix, u: &ComplexVector) -> Result<ComplexVector> {
    check_dim(y.matrix(), u, "voltage")?;
    let yu = y.matrix() * u;
    Ok(u.zip_map(&yu, |ui, c| ui * c.conj()))
}

/// Fréchet derivative `DΨ_Y(u)[h] = diag(h)·conj(Y u) + diag(u)·conj(Y h)`.
pub fn power_flow_differential(
    y: &AdmittanceMatrix,
    u: &ComplexVector,
    h: &ComplexVector,
) -> Result<ComplexVector> {
    check_dim(y.matrix(), u, "voltage")?;
    check_dim(y.matrix(), h, "step")?;
    let yu = y.matrix() * u;
    let yh = y.matrix() * h;
    Ok(DVector::from_fn(u.len(), |i, _| {
        h[i] * yu[i].conj() + u[i] * yh[i].conj()
    }))
}

/// A point on the manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    u: ComplexVector,
    s: ComplexVector,
}

impl ManifoldPoint {
    pub fn new(y: &AdmittanceMatrix, u: ComplexVector) -> Result<Self> {
        let s = power_flow_map(y, &u)?;
        Ok(ManifoldPoint { u, s })
    }

    pub fn flat_start(y: &AdmittanceMatrix) -> Self {
        let u = DVector::from_element(y.n(), Complex64::new(1.0, 0.0));
        ManifoldPoint::new(y, u).expect("dimensions agree by construction")
    }

    pub fn voltage(&self) -> &ComplexVector {
        &self.u
    }

    pub fn power(&self) -> &ComplexVector {
        &self.s
    }
}

/// Step `h` along the tangent space at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentStep {
    pub base: ManifoldPoint,
    pub h: ComplexVector,
}

impl TangentStep {
    pub fn new(base: ManifoldPoint, h: ComplexVector) -> Result<Self> {
        if h.len() != base.u.len() {
            return Err(Error::DimensionMismatch(format!(
                "step of length {} at a point of length {}",
                h.len(),
                base.u.len()
            )));
        }
        if h.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TangentStep { base, h })
    }

    /// `(u + h, s + DΨ_Y(u)[h])`.
    pub fn endpoint(&self, y: &AdmittanceMatrix) -> Result<(ComplexVector, ComplexVector)> {
        let ds = power_flow_differential(y, &self.base.u, &self.h)?;
        Ok((&self.base.u + &self.h, &self.base.s + ds))
    }
}

/// `Ψ_Y(u + h) - Ψ_Y(u) - DΨ_Y(u)[h] = diag(h)·conj(Y h)`.
pub fn tangent_residual(y: &AdmittanceMatrix, step: &TangentStep) -> Result<ComplexVector> {
    check_dim(y.matrix(), &step.h, "step")?;
    let yh = y.matrix() * &step.h;
    Ok(step.h.zip_map(&yh, |hi, c| hi * c.conj()))
}

/// The same residual by direct subtraction, for cross-checking.
pub fn taylor_residual(y: &AdmittanceMatrix, step: &TangentStep) -> Result<ComplexVector> {
    let (u_bar, s_bar) = step.endpoint(y)?;
    Ok(power_flow_map(y, &u_bar)? - s_bar)
}

/// `‖v‖₂` over the stacked real and imaginary parts.
pub fn norm2(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max_i |v_i|`.
pub fn norm_inf(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance from the tangent endpoint to the manifold point with the same
/// voltage, an upper proxy for the true distance.
pub fn same_voltage_proxy_distance(y: &AdmittanceMatrix, step: &TangentStep) -> Result<f64> {
    let (u_bar, s_bar) = step.endpoint(y)?;
    Ok(norm2(&(power_flow_map(y, &u_bar)? - s_bar)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// `3‖h‖_∞‖h‖₂‖Y‖`.
    Holder,
    /// `3‖h‖₂²‖Y‖`.
    Crude,
}

pub fn distance_bound(h: &ComplexVector, y_norm: f64, mode: DistanceMode) -> Result<f64> {
    if y_norm.is_nan() || y_norm < 0.0 {
        return Err(Error::InvalidBoundArgument(format!(
            "‖Y‖ = {y_norm} must be nonnegative"
        )));
    }
    let h2 = norm2(h);
    let lead = match mode {
        DistanceMode::Holder => norm_inf(h),
        DistanceMode::Crude => h2,
    };
    Ok(3.0 * lead * h2 * y_norm)
}

/// `E[dist] ≤ 3‖h‖_∞‖h‖₂·E‖Y‖`, with `E‖Y‖` taken from an expectation bound.
pub fn expected_distance_bound(h: &ComplexVector, source: &BoundReport) -> Result<BoundReport> {
    match source.kind {
        BoundKind::DegreeExpectation | BoundKind::ContingencyExpectation => {}
        other => return Err(Error::IncompatibleBound(other.to_string())),
    }
    let h_inf = norm_inf(h);
    let h2 = norm2(h);
    let mut inputs = source.inputs.clone();
    inputs.insert("h_inf".into(), h_inf);
    inputs.insert("h_2".into(), h2);
    inputs.insert("source_value".into(), source.value);
    let mut notes = vec![format!("expectation from {}", source.kind)];
    notes.extend(source.notes.iter().cloned());
    notes.push(format!(
        "crude form 3‖h‖₂²·E‖Y‖ = {}",
        3.0 * h2 * h2 * source.value
    ));
    Ok(BoundReport {
        kind: BoundKind::ManifoldDistance,
        inputs,
        value: 3.0 * h_inf * h2 * source.value,
        valid: source.valid,
        degenerate: source.degenerate,
        notes,
    })
}

/// Distance bound for a lossless network under line contingencies, where
/// `‖Y‖ = ‖-jB‖ = ‖B‖` and the contingency expectation bound applies.
pub fn lossless_expected_distance_bound(
    h: &ComplexVector,
    profile: &CriticalityProfile,
    form: ExpectationForm,
) -> Result<BoundReport> {
    let source = contingency_expectation_bound(profile, form)?;
    let mut r = expected_distance_bound(h, &source)?;
    r.notes.push("lossless network: ‖Y‖ = ‖B‖".into());
    Ok(r)
}
