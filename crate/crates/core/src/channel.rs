//! Kraus-form channels and their Choi matrices.
//!
//! A channel acts as `ρ ↦ Σ_μ K_μ ρ K_μ†`. Any Kraus set defines a completely
//! positive map, so complete positivity is never checked at runtime for a
//! [`KrausChannel`]; only trace preservation (`Σ_μ K_μ†K_μ = I`) is.
//!
//! The Choi matrix uses the input-first convention
//! `C = Σ_ij E_ij ⊗ S(E_ij)`, which with column-stacking vectorisation equals
//! `Σ_μ vec(K_μ) vec(K_μ)†`.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::state::{DensityMatrix, Tolerance};

/// A square-matrix Kraus representation of a completely positive map on a
/// `dim`-dimensional space.
///
/// Construction checks shapes and finiteness but not trace preservation, so
/// that non-TP inputs can still be inspected with [`KrausChannel::verify_tpcp`].
/// Use [`KrausChannel::new_tpcp`] to insist on it.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Outcome of a trace-preservation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    /// `‖Σ_μ K_μ†K_μ − I‖_F`.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let dim = first.nrows();
        for k in &kraus {
            if !k.is_square() {
                return Err(Error::NotSquare {
                    rows: k.nrows(),
                    cols: k.ncols(),
                });
            }
            if k.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.nrows(),
                    context: "Kraus operator size",
                });
            }
            linalg::check_finite(k)?;
        }
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
                context: "channel dimension",
            });
        }
        Ok(Self { dim, kraus })
    }

    /// Like [`KrausChannel::new`] but rejects sets that are not trace
    /// preserving within `tol`.
    pub fn new_tpcp(kraus: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        let ch = Self::new(kraus)?;
        let report = ch.verify_tpcp(tol);
        if !report.passed {
            return Err(Error::InvalidTrace(report.residual));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![linalg::identity(dim)],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    #[inline]
    pub fn n_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix> {
        self.kraus
    }

    /// `Σ_μ K_μ ρ K_μ†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_unchecked(self.apply_matrix(rho.matrix())?))
    }

    /// [`KrausChannel::apply`] on an arbitrary square matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows(),
                context: "input matrix",
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        Ok(out)
    }

    /// `Σ_μ K_μ†K_μ`.
    pub fn gram(&self) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            g += k.adjoint() * k;
        }
        g
    }

    pub fn verify_tpcp(&self, tol: Tolerance) -> VerificationReport {
        let residual = linalg::frobenius(&(self.gram() - linalg::identity(self.dim)));
        VerificationReport {
            residual,
            tolerance: tol.eps(),
            passed: residual <= tol.eps(),
        }
    }

    pub fn choi(&self) -> ChoiMatrix {
        let n = self.dim * self.dim;
        let mut m = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let v = linalg::vectorize(k);
            m += &v * v.adjoint();
        }
        ChoiMatrix {
            dim: self.dim,
            matrix: m,
        }
    }

    /// Frobenius distance between Choi matrices. Zero exactly when the two
    /// Kraus sets define the same superoperator.
    pub fn distance(&self, other: &KrausChannel) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
                context: "channel distance",
            });
        }
        Ok(linalg::frobenius_distance(&self.choi().matrix, &other.choi().matrix))
    }

    /// The composite `self ∘ first` (apply `first`, then `self`), with Kraus
    /// set `{K_μ F_ν}` ordered μ-major.
    pub fn after(&self, first: &KrausChannel) -> Result<KrausChannel> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: first.dim,
                context: "channel composition",
            });
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|k| first.kraus.iter().map(move |f| k * f))
            .collect();
        Ok(KrausChannel { dim: self.dim, kraus })
    }

    /// Kraus-index remixing `K'_μ = Σ_ν u_μν K_ν`. Leaves the channel
    /// unchanged whenever `u` is unitary.
    pub fn remix(&self, u: &ComplexMatrix) -> Result<KrausChannel> {
        let n = self.kraus.len();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.nrows(),
                context: "remixing matrix",
            });
        }
        let kraus = (0..n)
            .map(|mu| {
                let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
                for (nu, k) in self.kraus.iter().enumerate() {
                    acc += k * u[(mu, nu)];
                }
                acc
            })
            .collect();
        Ok(KrausChannel { dim: self.dim, kraus })
    }
}

/// Choi matrix `Σ_ij E_ij ⊗ S(E_ij)` of a map on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Wraps a `dim² × dim²` Hermitian matrix. Positivity is checked by
    /// [`ChoiMatrix::to_kraus`].
    pub fn new(dim: usize, matrix: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
                context: "Choi matrix size",
            });
        }
        linalg::check_finite(&matrix)?;
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > tol.eps() {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Self { dim, matrix })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Trace over the output factor; equals `(Σ_μ K_μ†K_μ)ᵀ`, hence the
    /// identity iff the map is trace preserving.
    pub fn partial_trace_output(&self) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d, d, |i, j| (0..d).map(|k| self.matrix[(i * d + k, j * d + k)]).sum())
    }

    /// Canonical Kraus set from the eigendecomposition.
    ///
    /// Eigenvalues below `−tol` fail with [`Error::NotCompletelyPositive`];
    /// eigenvalues below `tol` are dropped. Operators come out in descending
    /// eigenvalue order with their largest entry made real-positive.
    pub fn to_kraus(&self, tol: Tolerance) -> Result<KrausChannel> {
        let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
        if let Some(&min) = values.last() {
            if min < -tol.eps() {
                return Err(Error::NotCompletelyPositive(min));
            }
        }
        let d = self.dim;
        let mut kraus: Vec<ComplexMatrix> = values
            .iter()
            .enumerate()
            .take_while(|(_, &v)| v >= tol.eps())
            .map(|(j, &v)| {
                let col: Vec<_> = vectors.column(j).iter().map(|z| z * v.sqrt()).collect();
                linalg::fix_global_phase(&linalg::unvectorize(&col, d, d))
            })
            .collect();
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(d, d));
        }
        KrausChannel::new(kraus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_rows, real, ComplexVector};

    fn reset_qubit() -> KrausChannel {
        KrausChannel::new(vec![
            from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        ])
        .unwrap()
    }

    // Independent route: Choi built entry-by-entry from S(E_ij).
    fn choi_by_matrix_units(ch: &KrausChannel) -> ComplexMatrix {
        let d = ch.dim();
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(i, j)] = real(1.0);
                let s = ch.apply_matrix(&e).unwrap();
                out += linalg::kron(&e, &s);
            }
        }
        out
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(KrausChannel::new(vec![]), Err(Error::EmptyKraus));
        assert!(matches!(
            KrausChannel::new(vec![ComplexMatrix::zeros(2, 3)]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            KrausChannel::new(vec![linalg::identity(2), linalg::identity(3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_channel_is_noop() {
        let ch = KrausChannel::identity(3);
        let rho = DensityMatrix::maximally_mixed(3);
        assert_eq!(ch.apply(&rho).unwrap(), rho);
        assert!(ch.apply(&DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn reset_channel_on_plus_state() {
        let plus = DensityMatrix::new(from_real_rows(2, 2, &[0.5, 0.5, 0.5, 0.5]), Tolerance::default()).unwrap();
        let out = reset_qubit().apply(&plus).unwrap();
        let expected = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(linalg::frobenius_distance(out.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn choi_matches_matrix_unit_route() {
        let ch = reset_qubit();
        assert!(linalg::frobenius_distance(ch.choi().matrix(), &choi_by_matrix_units(&ch)) < 1e-15);
        let k = ComplexMatrix::from_fn(3, 3, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        let ch = KrausChannel::new(vec![k.clone(), k.adjoint()]).unwrap();
        assert!(linalg::frobenius_distance(ch.choi().matrix(), &choi_by_matrix_units(&ch)) < 1e-12);
    }

    #[test]
    fn identity_choi_is_unnormalised_bell_projector() {
        let choi = KrausChannel::identity(2).choi();
        let s = 1.0 / 2f64.sqrt();
        let omega = ComplexVector::from_vec(vec![real(s), real(0.0), real(0.0), real(s)]);
        let expected = linalg::outer(&omega).scale(2.0);
        assert!(linalg::frobenius_distance(choi.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn depolarising_choi_is_scaled_identity() {
        let d = 3;
        let kraus = (0..d * d)
            .map(|n| {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(n / d, n % d)] = real(1.0 / (d as f64).sqrt());
                e
            })
            .collect();
        let ch = KrausChannel::new(kraus).unwrap();
        assert!(ch.verify_tpcp(Tolerance::default()).passed);
        let choi = ch.choi();
        let expected = linalg::identity(d * d).scale(1.0 / d as f64);
        assert!(linalg::frobenius_distance(choi.matrix(), &expected) < 1e-15);
        assert!(linalg::frobenius_distance(&choi.partial_trace_output(), &linalg::identity(d)) < 1e-15);
    }

    #[test]
    fn non_tp_single_kraus_reports_residual() {
        let d = 3;
        let ch = KrausChannel::new(vec![linalg::identity(d).scale(0.5)]).unwrap();
        let r = ch.verify_tpcp(Tolerance::default());
        assert!(!r.passed);
        assert!((r.residual - (d as f64).sqrt() * 0.75).abs() < 1e-15);
        assert!(KrausChannel::new_tpcp(vec![linalg::identity(d).scale(0.5)], Tolerance::default()).is_err());
    }

    #[test]
    fn identity_vs_reset_distance_is_two() {
        // closed-form Choi difference: entries (0,3),(3,0),(3,3) = +1, (2,2) = −1
        let d = KrausChannel::identity(2).distance(&reset_qubit()).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        let dephase = KrausChannel::new(vec![
            from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            from_real_rows(2, 2, &[0.0, 0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let d = KrausChannel::identity(2).distance(&dephase).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        assert!(KrausChannel::identity(2).distance(&KrausChannel::identity(3)).is_err());
    }

    #[test]
    fn kraus_from_identity_choi() {
        let ch = KrausChannel::identity(3).choi().to_kraus(Tolerance::default()).unwrap();
        assert_eq!(ch.n_kraus(), 1);
        assert!(linalg::frobenius_distance(&ch.kraus()[0], &linalg::identity(3)) < 1e-12);
    }

    #[test]
    fn negative_choi_eigenvalue_is_rejected() {
        let mut m = KrausChannel::identity(2).choi().matrix().clone();
        m[(1, 1)] = real(-0.1);
        let choi = ChoiMatrix::new(2, m, Tolerance::default()).unwrap();
        match choi.to_kraus(Tolerance::default()) {
            Err(Error::NotCompletelyPositive(v)) => assert!((v + 0.1).abs() < 1e-12),
            other => panic!("expected CP error, got {other:?}"),
        }
    }

    #[test]
    fn compose_is_sequential_application() {
        let a = reset_qubit();
        let b = KrausChannel::new(vec![from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0])]).unwrap();
        let ab = b.after(&a).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let seq = b.apply(&a.apply(&rho).unwrap()).unwrap();
        assert!(linalg::frobenius_distance(ab.apply(&rho).unwrap().matrix(), seq.matrix()) < 1e-15);
        assert_eq!(ab.n_kraus(), 2);
    }
}
