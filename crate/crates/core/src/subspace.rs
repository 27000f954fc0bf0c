//! The orthogonal split `H = H_A ⊕ H_Ā` and the block arithmetic built on it.
//!
//! A split stores two isometries: `V_A` (`d × d_A`) and `V_Ā` (`d × d_Ā`).
//! Blocks are always taken in the frame `W = [V_A | V_Ā]`, so a density
//! matrix reads
//!
//! ```text
//! W†ρW = ( ρ_A   ρ_C )
//!        ( ρ_C†  ρ_Ā )
//! ```
//!
//! and a Kraus operator whose range lies in `H_A` reads `(A_μ B_μ; 0 0)`.

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::state::{DensityMatrix, PureState, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSplit {
    dim: usize,
    dim_a: usize,
    basis_a: ComplexMatrix,
    basis_abar: ComplexMatrix,
}

/// Blocks of a density matrix in the split frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub rho_a: ComplexMatrix,
    /// Coherences between `H_A` and `H_Ā`, `d_A × d_Ā`.
    pub rho_c: ComplexMatrix,
    pub rho_abar: ComplexMatrix,
}

/// Blocks of one Kraus operator in the split frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockKraus {
    /// `V_A† K V_A`.
    pub a_mu: ComplexMatrix,
    /// `V_A† K V_Ā`.
    pub b_mu: ComplexMatrix,
    /// `‖V_Ā† K‖_F`, the weight of `K` outside `H_A`.
    pub bottom_residual: f64,
}

/// Components of a pure state along `H_A` and `H_Ā`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSplit {
    pub psi_a: ComplexVector,
    pub psi_abar: ComplexVector,
}

impl SubspaceSplit {
    /// Builds a split of a `dim`-dimensional space with `dim_a`-dimensional
    /// target subspace.
    ///
    /// Without `basis_a` the target is spanned by the first `dim_a` standard
    /// basis vectors. The complement is always completed by Gram–Schmidt over
    /// the standard basis in index order, skipping vectors whose residual
    /// norm is at most `tol`.
    pub fn new(dim: usize, dim_a: usize, basis_a: Option<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        if dim_a < 1 || dim_a >= dim {
            return Err(Error::SplitDimension { dim, dim_a });
        }
        let basis_a = match basis_a {
            Some(v) => {
                if v.nrows() != dim || v.ncols() != dim_a {
                    return Err(Error::DimensionMismatch {
                        expected: dim * dim_a,
                        found: v.nrows() * v.ncols(),
                        context: "basis_a shape (d × d_A)",
                    });
                }
                linalg::check_finite(&v)?;
                let res = linalg::isometry_residual(&v);
                if res > tol.eps() {
                    return Err(Error::NotIsometry(res));
                }
                v
            }
            None => ComplexMatrix::identity(dim, dim_a),
        };
        let basis_abar = complete_basis(&basis_a, tol)?;
        Ok(Self {
            dim,
            dim_a,
            basis_a,
            basis_abar,
        })
    }

    /// Split with `H_A` spanned by the first `dim_a` standard basis vectors.
    pub fn standard(dim: usize, dim_a: usize) -> Result<Self> {
        Self::new(dim, dim_a, None, Tolerance::default())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    #[inline]
    pub fn dim_abar(&self) -> usize {
        self.dim - self.dim_a
    }

    #[inline]
    pub fn basis_a(&self) -> &ComplexMatrix {
        &self.basis_a
    }

    #[inline]
    pub fn basis_abar(&self) -> &ComplexMatrix {
        &self.basis_abar
    }

    /// The purity statement for pure inputs needs `1 < d_A`; with `d_A = 1`
    /// the coherence-destruction result still holds but the subspace carries
    /// no quantum information.
    pub fn corollary_applies(&self) -> bool {
        self.dim_a > 1
    }

    /// `max(‖V_A†V_A − I‖, ‖V_Ā†V_Ā − I‖, ‖V_A†V_Ā‖)`.
    pub fn orthonormality_residual(&self) -> f64 {
        let cross = linalg::frobenius(&(self.basis_a.adjoint() * &self.basis_abar));
        linalg::isometry_residual(&self.basis_a)
            .max(linalg::isometry_residual(&self.basis_abar))
            .max(cross)
    }

    /// `V_A V_A†`.
    pub fn projector_a(&self) -> ComplexMatrix {
        &self.basis_a * self.basis_a.adjoint()
    }

    /// `V_Ā V_Ā†`.
    pub fn projector_abar(&self) -> ComplexMatrix {
        &self.basis_abar * self.basis_abar.adjoint()
    }

    /// The two-outcome projective measurement `{P_A, P_Ā}` as a channel, i.e.
    /// the pinching map `P_A + P_Ā`.
    pub fn pinching_channel(&self) -> KrausChannel {
        KrausChannel::new(vec![self.projector_a(), self.projector_abar()]).expect("projectors are square and finite")
    }

    /// The (non trace-preserving) projection superoperator onto `H_A`.
    pub fn projection_channel_a(&self) -> KrausChannel {
        KrausChannel::new(vec![self.projector_a()]).expect("projector is square and finite")
    }

    fn check_dim(&self, found: usize, context: &'static str) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
                context,
            });
        }
        Ok(())
    }

    pub fn block_decompose(&self, rho: &DensityMatrix) -> Result<BlockDecomposition> {
        self.check_dim(rho.dim(), "density matrix")?;
        Ok(self.blocks_of(rho.matrix()))
    }

    pub(crate) fn blocks_of(&self, m: &ComplexMatrix) -> BlockDecomposition {
        let va = &self.basis_a;
        let vb = &self.basis_abar;
        BlockDecomposition {
            rho_a: va.adjoint() * m * va,
            rho_c: va.adjoint() * m * vb,
            rho_abar: vb.adjoint() * m * vb,
        }
    }

    /// `V_A ρ_A V_A† + V_A ρ_C V_Ā† + h.c. + V_Ā ρ_Ā V_Ā†`.
    pub fn recompose(&self, blocks: &BlockDecomposition) -> ComplexMatrix {
        let va = &self.basis_a;
        let vb = &self.basis_abar;
        let cross = va * &blocks.rho_c * vb.adjoint();
        va * &blocks.rho_a * va.adjoint() + vb * &blocks.rho_abar * vb.adjoint() + &cross + cross.adjoint()
    }

    /// `V_A V_A† ρ V_A V_A†`, unnormalised.
    pub fn project_a(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho.dim(), "density matrix")?;
        let p = self.projector_a();
        Ok(&p * rho.matrix() * &p)
    }

    /// `V_Ā V_Ā† ρ V_Ā V_Ā†`, unnormalised.
    pub fn project_abar(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho.dim(), "density matrix")?;
        let p = self.projector_abar();
        Ok(&p * rho.matrix() * &p)
    }

    /// Keeps the diagonal blocks and zeroes the `A`/`Ā` coherences.
    pub fn pinch(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_unchecked(
            self.project_a(rho)? + self.project_abar(rho)?,
        ))
    }

    /// Blocks `(A_μ, B_μ)` of every Kraus operator, plus the weight each
    /// operator places outside `H_A`.
    pub fn kraus_blocks(&self, ch: &KrausChannel) -> Result<Vec<BlockKraus>> {
        self.check_dim(ch.dim(), "channel")?;
        let va = &self.basis_a;
        let vb = &self.basis_abar;
        Ok(ch
            .kraus()
            .iter()
            .map(|k| BlockKraus {
                a_mu: va.adjoint() * k * va,
                b_mu: va.adjoint() * k * vb,
                bottom_residual: linalg::frobenius(&(vb.adjoint() * k)),
            })
            .collect())
    }

    pub fn split_state(&self, psi: &PureState) -> Result<StateSplit> {
        self.check_dim(psi.dim(), "state")?;
        Ok(StateSplit {
            psi_a: self.basis_a.adjoint() * psi.amplitudes(),
            psi_abar: self.basis_abar.adjoint() * psi.amplitudes(),
        })
    }

    /// `V_A ψ_A + V_Ā ψ_Ā`.
    pub fn join_state(&self, parts: &StateSplit) -> ComplexVector {
        &self.basis_a * &parts.psi_a + &self.basis_abar * &parts.psi_abar
    }

    /// Embeds `d_A × d_A` and `d_A × d_Ā` blocks as `V_A A V_A† + V_A B V_Ā†`.
    pub fn embed_top(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        &self.basis_a * a * self.basis_a.adjoint() + &self.basis_a * b * self.basis_abar.adjoint()
    }
}

fn complete_basis(basis_a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let dim = basis_a.nrows();
    let needed = dim - basis_a.ncols();
    let mut columns: Vec<ComplexVector> = basis_a.column_iter().map(|c| c.into_owned()).collect();
    let mut found = Vec::with_capacity(needed);
    for k in 0..dim {
        if found.len() == needed {
            break;
        }
        let mut r = ComplexVector::zeros(dim);
        r[k] = linalg::ONE;
        // two classical Gram-Schmidt passes
        for _ in 0..2 {
            for q in &columns {
                let overlap = q.dotc(&r);
                r -= q * overlap;
            }
        }
        let norm = r.norm();
        if norm > tol.eps() {
            let q = r.unscale(norm);
            columns.push(q.clone());
            found.push(q);
        }
    }
    if found.len() < needed {
        return Err(Error::ComplementIncomplete {
            found: found.len(),
            needed,
        });
    }
    Ok(ComplexMatrix::from_columns(&found))
}
