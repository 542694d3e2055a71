//! Dense spectral services: operator norms, Hermitian eigenvalues, Loewner
//! order checks, intrinsic dimension and Kronecker assembly.
//!
//! Everything here works on `nalgebra::DMatrix<T>` for real (`f64`) and
//! complex (`Complex64`) scalars alike.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};

/// Max-abs asymmetry tolerated before a matrix is rejected as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Scalar types the spectral routines accept.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

pub fn check_finite<T: Scalar>(m: &DMatrix<T>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `max |M - M*|` entrywise.
pub fn hermitian_defect<T: Scalar>(m: &DMatrix<T>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conjugate()).modulus());
        }
    }
    worst
}

/// Largest singular value.
pub fn operator_norm<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(0.0);
    }
    let sv = m.clone().svd(false, false).singular_values;
    Ok(sv.max())
}

/// Eigenvalues of a Hermitian matrix in ascending order. The input is
/// symmetrized after the tolerance check.
pub fn hermitian_eigenvalues<T: Scalar>(m: &DMatrix<T>) -> Result<Vec<f64>> {
    check_finite(m)?;
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (m + m.adjoint()) * T::from_real(0.5);
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// `max |λ|` through the Hermitian eigensolver.
pub fn hermitian_norm<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    let eig = hermitian_eigenvalues(m)?;
    Ok(eig.iter().fold(0.0f64, |acc, x| acc.max(x.abs())))
}

pub fn lambda_min<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0))
}

pub fn lambda_max<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.last().copied().unwrap_or(0.0))
}

/// `tr(M) / ‖M‖`. With `psd` set, `M ⪰ -1e-10·I` is verified first. For
/// indefinite input the literal ratio is returned.
pub fn intrinsic_dimension<T: Scalar>(m: &DMatrix<T>, psd: bool) -> Result<f64> {
    let norm = operator_norm(m)?;
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    if psd {
        let lmin = lambda_min(m)?;
        if lmin < -HERMITIAN_TOL {
            return Err(Error::NotPsd(lmin));
        }
    }
    Ok(m.trace().real() / norm)
}

/// `a ⪯ b` up to `tol`: true iff `λ_min(b - a) ≥ -tol`.
pub fn psd_dominates<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>, tol: f64) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    for m in [a, b] {
        let defect = hermitian_defect(m);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
    }
    Ok(lambda_min(&(b - a))? >= -tol)
}

pub fn kron<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a.kronecker(b)
}

pub fn block_diag<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Assembles `[[tl, tr], [bl, br]]` from four equally sized blocks.
pub fn block_2x2<T: Scalar>(
    tl: &DMatrix<T>,
    tr: &DMatrix<T>,
    bl: &DMatrix<T>,
    br: &DMatrix<T>,
) -> DMatrix<T> {
    let (r, c) = tl.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    out.view_mut((0, 0), (r, c)).copy_from(tl);
    out.view_mut((0, c), (r, c)).copy_from(tr);
    out.view_mut((r, 0), (r, c)).copy_from(bl);
    out.view_mut((r, c), (r, c)).copy_from(br);
    out
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((*x - *y).modulus()))
}
