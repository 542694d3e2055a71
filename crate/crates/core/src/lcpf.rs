//! Linear coupled power flow: the flat-start Jacobian
//! `F = [[G, -B], [-B, -G]]` and its closed-form inverse on trees.
//!
//! With `ε = v - 1` and `θ` the voltage angles, the linearization reads
//! `[p; q] = F [ε; θ]`. On a tree with the reference bus removed the reduced
//! incidence `A` is square and invertible, and
//! `F⁻¹ = [[R, X], [X, -R]]` with `R = A⁻¹ diag(r) A⁻ᵀ`,
//! `X = A⁻¹ diag(x) A⁻ᵀ`, `r = g / (g² + b²)`, `x = -b / (g² + b²)`.

use nalgebra::{DMatrix, DVector};

use crate::admittance::LineAdmittance;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::spectra::{block_2x2, max_abs_diff};

/// Agreement required between the Schur-complement and line-space inverses.
pub const PATH_AGREEMENT_TOL: f64 = 1e-9;
/// Condition number above which the dense fallback declares `F` singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct FlatStartJacobian {
    g_matrix: DMatrix<f64>,
    b_matrix: DMatrix<f64>,
    f: DMatrix<f64>,
    reduced: bool,
}

impl FlatStartJacobian {
    pub fn g_matrix(&self) -> &DMatrix<f64> {
        &self.g_matrix
    }

    pub fn b_matrix(&self) -> &DMatrix<f64> {
        &self.b_matrix
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Number of voltage magnitude (equivalently angle) unknowns.
    pub fn dim(&self) -> usize {
        self.g_matrix.nrows()
    }
}

/// Builds `G = Aᵀ diag(g) A`, `B = Aᵀ diag(b) A` and `F`.
pub fn flat_start_jacobian(
    t: &Topology,
    lines: &[LineAdmittance],
    reduced: bool,
) -> Result<FlatStartJacobian> {
    if lines.len() != t.n_edges() {
        return Err(Error::LengthMismatch {
            expected: t.n_edges(),
            actual: lines.len(),
        });
    }
    let a = t.incidence_matrix(reduced)?;
    let g: Vec<f64> = lines.iter().map(|w| w.g).collect();
    let b: Vec<f64> = lines.iter().map(|w| w.b).collect();
    let g_matrix = a.gram(&g)?;
    let b_matrix = a.gram(&b)?;
    let f = block_2x2(&g_matrix, &(-&b_matrix), &(-&b_matrix), &(-&g_matrix));
    Ok(FlatStartJacobian {
        g_matrix,
        b_matrix,
        f,
        reduced,
    })
}

/// Resistance and reactance blocks of `F⁻¹ = [[R, X], [X, -R]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceBlocks {
    pub r_matrix: DMatrix<f64>,
    pub x_matrix: DMatrix<f64>,
}

impl ImpedanceBlocks {
    pub fn inverse_matrix(&self) -> DMatrix<f64> {
        block_2x2(
            &self.r_matrix,
            &self.x_matrix,
            &self.x_matrix,
            &(-&self.r_matrix),
        )
    }

    /// `ε = Rp + Xq`, `θ = Xp - Rq`.
    pub fn apply(&self, p: &DVector<f64>, q: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let eps = &self.r_matrix * p + &self.x_matrix * q;
        let theta = &self.x_matrix * p - &self.r_matrix * q;
        (eps, theta)
    }
}

fn invert(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .ok_or(Error::SingularSystem(f64::INFINITY))
}

/// Inverse via the Schur complement `S = G + B G⁻¹ B` of `F` in `-G`:
/// `R = S⁻¹`, `X = -S⁻¹ B G⁻¹`.
pub fn schur_inverse(j: &FlatStartJacobian) -> Result<ImpedanceBlocks> {
    let g_inv = invert(&j.g_matrix)?;
    let s = &j.g_matrix + &j.b_matrix * &g_inv * &j.b_matrix;
    let r = invert(&s)?;
    let x = -(&r * &j.b_matrix * &g_inv);
    Ok(ImpedanceBlocks {
        r_matrix: r,
        x_matrix: x,
    })
}

/// Inverse through per-line resistances and reactances on a tree.
pub fn line_space_inverse(t: &Topology, lines: &[LineAdmittance]) -> Result<ImpedanceBlocks> {
    let a = t.incidence_matrix(true)?;
    let a_inv = invert(a.matrix())?;
    let (r, x): (Vec<f64>, Vec<f64>) = lines
        .iter()
        .map(|w| {
            let mag2 = w.g * w.g + w.b * w.b;
            (w.g / mag2, -w.b / mag2)
        })
        .unzip();
    let sandwich = |d: &[f64]| {
        let mut scaled = a_inv.clone();
        for (mut col, &v) in scaled.column_iter_mut().zip(d) {
            col *= v;
        }
        scaled * a_inv.transpose()
    };
    Ok(ImpedanceBlocks {
        r_matrix: sandwich(&r),
        x_matrix: sandwich(&x),
    })
}

/// Closed-form tree inverse. Both the Schur-complement route and the
/// line-space route are evaluated; they must agree to
/// [`PATH_AGREEMENT_TOL`].
pub fn invert_tree_lcpf(
    j: &FlatStartJacobian,
    t: &Topology,
    lines: &[LineAdmittance],
) -> Result<ImpedanceBlocks> {
    if !t.is_tree() {
        return Err(Error::NotATree);
    }
    if !j.reduced {
        return Err(Error::UnreducedIncidence);
    }
    if lines.len() != t.n_edges() {
        return Err(Error::LengthMismatch {
            expected: t.n_edges(),
            actual: lines.len(),
        });
    }
    if let Some((line, w)) = lines.iter().enumerate().find(|(_, w)| w.g.is_nan() || w.g <= 0.0) {
        return Err(Error::SingularConductance { line, g: w.g });
    }
    let schur = schur_inverse(j)?;
    let line_space = line_space_inverse(t, lines)?;
    let scale = 1.0 + line_space.r_matrix.amax().max(line_space.x_matrix.amax());
    let gap = max_abs_diff(&schur.r_matrix, &line_space.r_matrix)
        .max(max_abs_diff(&schur.x_matrix, &line_space.x_matrix));
    if gap > PATH_AGREEMENT_TOL * scale {
        return Err(Error::InversePathsDisagree(gap));
    }
    Ok(line_space)
}

/// Solves `F [ε; θ] = [p; q]`. Trees with a reduced Jacobian and positive
/// conductances use the closed form; everything else falls back to a dense
/// LU solve guarded by a condition-number check.
pub fn lcpf_solve(
    j: &FlatStartJacobian,
    t: &Topology,
    lines: &[LineAdmittance],
    p: &DVector<f64>,
    q: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = j.dim();
    if p.len() != n || q.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "injections of length ({}, {}) for {n} unknowns",
            p.len(),
            q.len()
        )));
    }
    let tree_path = j.reduced && t.is_tree() && lines.iter().all(|w| w.g > 0.0);
    if tree_path {
        let blocks = invert_tree_lcpf(j, t, lines)?;
        return Ok(blocks.apply(p, q));
    }
    dense_solve(j, p, q)
}

/// Dense LU solve of `F [ε; θ] = [p; q]`.
pub fn dense_solve(
    j: &FlatStartJacobian,
    p: &DVector<f64>,
    q: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let n = j.dim();
    let sv = j.f.clone().svd(false, false).singular_values;
    let cond = if sv.min() > 0.0 {
        sv.max() / sv.min()
    } else {
        f64::INFINITY
    };
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(Error::SingularSystem(cond));
    }
    let rhs = DVector::from_iterator(2 * n, p.iter().chain(q.iter()).copied());
    let sol =
        j.f.clone()
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularSystem(cond))?;
    Ok((sol.rows(0, n).into_owned(), sol.rows(n, n).into_owned()))
}

/// `‖F [ε; θ] - [p; q]‖₂`.
pub fn residual_norm(
    j: &FlatStartJacobian,
    eps: &DVector<f64>,
    theta: &DVector<f64>,
    p: &DVector<f64>,
    q: &DVector<f64>,
) -> f64 {
    let n = j.dim();
    let x = DVector::from_iterator(2 * n, eps.iter().chain(theta.iter()).copied());
    let rhs = DVector::from_iterator(2 * n, p.iter().chain(q.iter()).copied());
    (&j.f * x - rhs).norm()
}
