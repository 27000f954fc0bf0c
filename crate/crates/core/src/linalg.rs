//! Dense complex matrix helpers on top of `nalgebra`.
//!
//! Matrices are `DMatrix<Complex64>`; nalgebra stores them column-major, so
//! `m.as_slice()` is the column-stacking vectorisation `vec(m)` with index
//! `col * rows + row`. The Choi conventions in [`crate::channel`] rely on this.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| real(entries[i * cols + j]))
}

/// Frobenius norm.
pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    frobenius(&(a - b))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `‖M − M†‖_F`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// `‖V†V − I‖_F` for a tall matrix `V`.
pub fn isometry_residual(v: &ComplexMatrix) -> f64 {
    frobenius(&(v.adjoint() * v - identity(v.ncols())))
}

pub(crate) fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// The input is symmetrised as `(M + M†)/2` first so that roundoff asymmetry
/// does not leak into the result.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// `M^{-1/2}` of a Hermitian positive matrix. Returns `None` when the
/// smallest eigenvalue is below `floor`.
pub fn inverse_sqrt_psd(m: &ComplexMatrix, floor: f64) -> Option<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(m);
    if values.last().is_none_or(|&v| v < floor) {
        return None;
    }
    let n = values.len();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * (1.0 / values[j].sqrt()));
    Some(&scaled * vectors.adjoint())
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Unitary factor of the polar decomposition `M = U P`.
pub fn polar_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Multiplies by a global phase so that the largest-magnitude entry is real
/// and positive. Ties are broken by column-major order.
pub fn fix_global_phase(m: &ComplexMatrix) -> ComplexMatrix {
    let mut best = ZERO;
    let mut best_norm = -1.0;
    for z in m.iter() {
        // strict margin keeps the choice stable under roundoff-level ties
        if z.norm() > best_norm * (1.0 + 1e-9) {
            best_norm = z.norm();
            best = *z;
        }
    }
    if best_norm <= 0.0 {
        return m.clone();
    }
    let phase = best.conj() / best.norm();
    m.map(|z| z * phase)
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `|v⟩⟨v|`.
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Column-stacking vectorisation.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`] for a `rows × cols` matrix.
pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, cols, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_descending() {
        let m = from_real_rows(3, 3, &[1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 2.0]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert_eq!(vals.len(), 3);
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[2] - 1.0).abs() < 1e-14);
        let recon = &vecs
            * ComplexMatrix::from_diagonal(&DVector::from_iterator(3, vals.iter().map(|&x| real(x))))
            * vecs.adjoint();
        assert!(frobenius_distance(&recon, &m) < 1e-13);
    }

    #[test]
    fn polar_of_scaled_unitary_is_unitary() {
        let h = from_real_rows(2, 2, &[1.0, 1.0, 1.0, -1.0]).scale(3.0);
        let u = polar_unitary(&h);
        assert!(isometry_residual(&u) < 1e-14);
        let expected = h.scale(1.0 / (3.0 * 2f64.sqrt()));
        assert!(frobenius_distance(&u, &expected) < 1e-14);
    }

    #[test]
    fn vec_round_trip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let v = vectorize(&m);
        assert_eq!(v[1], m[(1, 0)]);
        assert_eq!(unvectorize(v.as_slice(), 2, 3), m);
    }

    #[test]
    fn phase_fix_makes_max_entry_positive() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { c(0.0, 2.0) } else { ZERO });
        let f = fix_global_phase(&m);
        assert!((f[(0, 0)] - real(2.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_sqrt_rejects_singular() {
        let m = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(inverse_sqrt_psd(&m, 1e-12).is_none());
        let m = from_real_rows(2, 2, &[4.0, 0.0, 0.0, 1.0]);
        let r = inverse_sqrt_psd(&m, 1e-12).unwrap();
        assert!(frobenius_distance(&r, &from_real_rows(2, 2, &[0.5, 0.0, 0.0, 1.0])) < 1e-14);
    }
}
