//! Tolerances, density matrices and pure states.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

/// Absolute Frobenius tolerance used by every numerical check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: f64 = 1e-9;

    pub fn new(abs_eps: f64) -> Result<Self> {
        if abs_eps.is_finite() && abs_eps > 0.0 {
            Ok(Self(abs_eps))
        } else {
            Err(Error::InvalidTolerance(abs_eps))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }

    /// Tolerance scaled by a positive factor.
    pub fn scaled(self, factor: f64) -> Self {
        Self(self.0 * factor)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
///
/// [`DensityMatrix::new`] validates all three properties. Channel outputs are
/// wrapped without re-validation: a non-trace-preserving Kraus set can hand
/// back a matrix whose trace differs from one, and callers that care check
/// [`DensityMatrix::trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        linalg::check_finite(&matrix)?;
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > tol.eps() {
            return Err(Error::NotHermitian(herm));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > tol.eps() || tr.im.abs() > tol.eps() {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min_eig = linalg::hermitian_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min_eig < -tol.eps() {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: linalg::outer(psi.amplitudes()),
        }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim).scale(1.0 / dim as f64),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        purity(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.matrix)
            .last()
            .copied()
            .unwrap_or(0.0)
    }
}

/// `tr M²` for a Hermitian matrix, computed as `Σ |M_ij|²`.
pub fn purity(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// A unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector, tol: Tolerance) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidNorm(0.0));
        }
        for (i, z) in amplitudes.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: 0 });
            }
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol.eps() {
            return Err(Error::InvalidNorm(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalises a nonzero vector.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidNorm(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Standard basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, bound: dim });
        }
        let mut v = ComplexVector::zeros(dim);
        v[index] = linalg::ONE;
        Ok(Self { amplitudes: v })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_rows};

    #[test]
    fn tolerance_must_be_positive() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(-1.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert_eq!(Tolerance::default().eps(), 1e-9);
    }

    #[test]
    fn density_validation() {
        let tol = Tolerance::default();
        assert!(DensityMatrix::new(from_real_rows(2, 2, &[0.5, 0.0, 0.0, 0.5]), tol).is_ok());
        assert!(matches!(
            DensityMatrix::new(from_real_rows(2, 2, &[0.5, 0.1, 0.0, 0.5]), tol),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            DensityMatrix::new(from_real_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]), tol),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::new(from_real_rows(2, 2, &[1.5, 0.0, 0.0, -0.5]), tol),
            Err(Error::NotPositive(_))
        ));
        let mut bad = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        bad[(1, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(
            DensityMatrix::new(bad, tol),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn pure_state_norm() {
        let v = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(PureState::new(v.clone(), Tolerance::default()).is_err());
        let psi = PureState::normalized(v).unwrap();
        assert!((psi.density().purity() - 1.0).abs() < 1e-15);
        assert!(PureState::basis(2, 2).is_err());
    }
}
