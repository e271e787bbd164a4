//! Dense complex linear-algebra helpers. Matrices are stored as nalgebra
//! `DMatrix`; decompositions run in faer.

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn to_faer(m: &DMatrix<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular value decomposition `M = U diag(s) V*`.
pub struct Svd {
    /// Singular values, descending.
    pub s: Vec<f64>,
    pub u: DMatrix<C64>,
    pub v: DMatrix<C64>,
}

fn svd_parts(svd: &faer::linalg::solvers::Svd<C64>) -> Svd {
    Svd {
        s: svd.S().column_vector().iter().map(|z| z.re).collect(),
        u: from_faer(svd.U()),
        v: from_faer(svd.V()),
    }
}

/// Thin SVD: `min(rows, cols)` singular triplets.
pub fn thin_svd(m: &DMatrix<C64>) -> Svd {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Svd {
            s: Vec::new(),
            u: DMatrix::zeros(m.nrows(), 0),
            v: DMatrix::zeros(m.ncols(), 0),
        };
    }
    svd_parts(&to_faer(m).thin_svd().expect("SVD did not converge"))
}

/// Full SVD: square `U` and `V`.
pub fn full_svd(m: &DMatrix<C64>) -> Svd {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Svd {
            s: Vec::new(),
            u: DMatrix::identity(m.nrows(), m.nrows()),
            v: DMatrix::identity(m.ncols(), m.ncols()),
        };
    }
    svd_parts(&to_faer(m).svd().expect("SVD did not converge"))
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s = to_faer(m).singular_values().expect("SVD did not converge");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut e = to_faer(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("eigenvalue iteration did not converge");
    e.sort_by(f64::total_cmp);
    e
}

/// Operator (spectral) norm.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Operator norm of a tall matrix through the eigenvalues of its Gram matrix.
/// Much cheaper than an SVD when `rows ≫ cols`.
pub fn tall_norm(m: &DMatrix<C64>) -> f64 {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0.0;
    }
    if m.nrows() < 2 * m.ncols() {
        return spectral_norm(m);
    }
    let top = hermitian_eigenvalues(&(m.adjoint() * m))
        .last()
        .copied()
        .unwrap_or(0.0);
    top.max(0.0).sqrt()
}

/// Smallest of the `min(rows, cols)` singular values.
pub fn min_singular_value(m: &DMatrix<C64>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// `(I − QQ*)X` for `Q` with orthonormal columns.
pub fn residual_off(q: &DMatrix<C64>, x: &DMatrix<C64>) -> DMatrix<C64> {
    if q.ncols() == 0 {
        return x.clone();
    }
    x - q * (q.adjoint() * x)
}

/// Orthonormal basis of the column space, keeping singular values above
/// `rel_tol · σ_max`. Also returns the full singular spectrum.
pub fn orthonormal_range(m: &DMatrix<C64>, rel_tol: f64) -> (DMatrix<C64>, Vec<f64>) {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return (DMatrix::zeros(rows, 0), Vec::new());
    }
    let svd = thin_svd(m);
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let cutoff = rel_tol * smax;
    let rank = svd.s.iter().filter(|&&x| smax > 0.0 && x > cutoff).count();
    (svd.u.columns(0, rank).into_owned(), svd.s)
}

/// Orthonormal basis of `{x : Mx = 0}`, where singular values at or below
/// `abs_tol` count as zero.
pub fn null_space(m: &DMatrix<C64>, abs_tol: f64) -> DMatrix<C64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let svd = full_svd(m);
    // Right singular vectors past min(rows, cols) have no singular value.
    let first_null = svd.s.iter().take_while(|&&x| x > abs_tol).count();
    svd.v.columns(first_null, n - first_null).into_owned()
}

/// Orthonormal basis of the orthogonal complement of span(Q) in ℂⁿ.
pub fn orthogonal_complement(q: &DMatrix<C64>) -> DMatrix<C64> {
    let n = q.nrows();
    if q.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    null_space(&q.adjoint(), 1e-8)
}

/// `‖P_A − P_B‖_op` for subspaces given by orthonormal column bases.
///
/// Subspaces of different dimension are at distance 1. The two one-sided
/// residuals agree mathematically for equal dimensions; their maximum is
/// reported so that the result is symmetric in its arguments.
pub fn projector_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 || a == b {
        return 0.0;
    }
    let ab = spectral_norm(&residual_off(a, b));
    let ba = spectral_norm(&residual_off(b, a));
    ab.max(ba).min(1.0)
}

/// `‖Q*Q − I‖_op`.
pub fn orthonormality_defect(q: &DMatrix<C64>) -> f64 {
    let r = q.ncols();
    spectral_norm(&(q.adjoint() * q - DMatrix::<C64>::identity(r, r)))
}

pub fn inverse(m: &DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{what} must be square")));
    }
    let smin = min_singular_value(m);
    let smax = spectral_norm(m);
    if !(smin > 1e-14 * smax) || smax == 0.0 {
        return Err(Error::NotInvertible(format!(
            "{what}: σ_min = {smin:e}, σ_max = {smax:e}"
        )));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible(what.to_string()))
}

pub fn matrix_power(m: &DMatrix<C64>, e: usize) -> DMatrix<C64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..e {
        out = m * out;
    }
    out
}

/// `‖X − Y‖_F / (‖X‖_F + ‖Y‖_F)`, zero when both vanish.
pub fn relative_residual(x: &DMatrix<C64>, y: &DMatrix<C64>) -> f64 {
    let scale = x.norm() + y.norm();
    if scale == 0.0 {
        0.0
    } else {
        (x - y).norm() / scale
    }
}

pub fn column_matrix(columns: &[DVector<C64>], rows: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(rows, columns.len());
    for (k, col) in columns.iter().enumerate() {
        m.set_column(k, col);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        // x + y + z = 0 in ℂ³.
        let m = DMatrix::from_row_slice(1, 3, &[c(1.0), c(1.0), c(1.0)]);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).norm() < 1e-12);
        assert!(orthonormality_defect(&n) < 1e-12);
    }

    #[test]
    fn projector_distance_of_lines() {
        let a = DMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = DMatrix::from_column_slice(2, 1, &[c(s), c(s)]);
        // sin(π/4)
        assert!((projector_distance(&a, &b) - s).abs() < 1e-12);
        assert_eq!(projector_distance(&a, &a), 0.0);
        let two = DMatrix::<C64>::identity(2, 2);
        assert_eq!(projector_distance(&a, &two), 1.0);
    }

    #[test]
    fn complement_completes_basis() {
        let q = DMatrix::from_column_slice(3, 1, &[c(0.0), c(1.0), c(0.0)]);
        let r = orthogonal_complement(&q);
        assert_eq!(r.ncols(), 2);
        assert!((q.adjoint() * &r).norm() < 1e-12);
    }

    #[test]
    fn tall_norm_matches_svd() {
        let m = DMatrix::from_fn(9, 3, |i, j| C64::new((i * 3 + j) as f64, (i as f64) - (j as f64)));
        assert!((tall_norm(&m) - spectral_norm(&m)).abs() < 1e-10 * spectral_norm(&m));
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(matches!(inverse(&m, "T"), Err(Error::NotInvertible(_))));
    }
}
