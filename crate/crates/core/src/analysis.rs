//! Range, decoherence-free and coherence-destruction checks for a control
//! channel, plus the equivalent measure-then-correct protocol.
//!
//! For a channel whose output always lies in `H_A`, every Kraus operator has
//! the block form `K_μ = (A_μ B_μ; 0 0)`. If moreover `H_A` is
//! decoherence-free, all `A_μ = c_μ U_A` for one unitary `U_A`, and the
//! off-diagonal block of `Σ K_μ†K_μ = I` forces `Σ c̄_μ B_μ = 0`. The cross
//! term `Σ_μ A_μ ρ_C B_μ† + h.c.` then vanishes, so the channel cannot see
//! the `A`/`Ā` coherences and equals its own composition with the pinching
//! map. The functions below measure each of these facts numerically.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::channel::{KrausChannel, VerificationReport};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::state::{self, PureState, Tolerance};
use crate::subspace::{BlockKraus, SubspaceSplit};

/// Whether every output is supported in `H_A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeCheck {
    /// `max_μ ‖V_Ā† K_μ‖_F`.
    pub residual: f64,
    pub passed: bool,
}

/// Witness that `H_A` is decoherence-free: `A_μ ≈ c_μ U_A` for all μ.
#[derive(Debug, Clone, PartialEq)]
pub struct DfsCertificate {
    /// Unitary on `H_A`, phase-fixed so its largest entry is real-positive.
    pub u_a: ComplexMatrix,
    /// `c_μ = tr(U_A† A_μ) / d_A`.
    pub coeffs: Vec<Complex64>,
    /// `‖U_A†U_A − I‖_F`.
    pub unitarity_residual: f64,
    /// `max_μ ‖A_μ − c_μ U_A‖_F`.
    pub proportionality_residual: f64,
    /// `|Σ_μ |c_μ|² − 1|`.
    pub coefficient_norm_residual: f64,
    /// Choi distance between the restricted channel and `ρ_A ↦ U_A ρ_A U_A†`.
    pub channel_residual: f64,
}

/// Result of the decoherence-free test.
#[derive(Debug, Clone, PartialEq)]
pub struct DfsCheck {
    /// Eigenvalues (descending) of the Choi matrix of `ρ_A ↦ Σ A_μ ρ_A A_μ†`.
    pub restricted_eigenvalues: Vec<f64>,
    /// Second eigenvalue; zero for a rank-one restricted Choi matrix.
    pub second_eigenvalue: f64,
    /// Choi distance between the restriction and conjugation by the
    /// extracted unitary.
    pub channel_residual: f64,
    /// Present iff the restriction is a single unitary conjugation.
    pub certificate: Option<DfsCertificate>,
}

impl DfsCheck {
    pub fn passed(&self) -> bool {
        self.certificate.is_some()
    }

    fn into_certificate(self) -> Result<DfsCertificate> {
        let (second_eigenvalue, channel_residual) = (self.second_eigenvalue, self.channel_residual);
        self.certificate.ok_or(Error::NotDecoherenceFree {
            second_eigenvalue,
            channel_residual,
        })
    }
}

/// A check that ran, or the reason it did not.
#[derive(Debug, Clone, PartialEq)]
pub enum Checked<T> {
    Done(T),
    Skipped { reason: String },
}

impl<T> Checked<T> {
    fn skipped(reason: &str) -> Self {
        Checked::Skipped {
            reason: reason.to_owned(),
        }
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Checked::Done(v) => Some(v),
            Checked::Skipped { .. } => None,
        }
    }

    pub fn skip_reason(&self) -> Option<&str> {
        match self {
            Checked::Done(_) => None,
            Checked::Skipped { reason } => Some(reason),
        }
    }
}

/// The measure-then-correct realisation: measure `A` vs `Ā`, apply `U_A` on
/// outcome `A`, apply the Kraus set `{B_μ}` (`H_Ā → H_A`) on outcome `Ā`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackProtocol {
    pub u_a: ComplexMatrix,
    pub correction: Vec<ComplexMatrix>,
}

/// Purity of the output for one pure input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryResult {
    /// `tr(ρ_out,A²)` on the `A` block of the output.
    pub purity: f64,
    /// `tr(ρ_out²)` on the full space; equal to `purity` when the range
    /// condition holds.
    pub full_purity: f64,
    /// Whether `Σ B_μ ψ_Ā ψ_Ā† B_μ† ∝ U_A ψ_A ψ_A† U_A†`.
    pub exception: bool,
    /// `ψ_A = 0` or `ψ_Ā = 0`; `exception` is then reported as true.
    pub vacuous: bool,
    /// `d_A > 1`.
    pub corollary_applies: bool,
}

/// Every check for one channel and split.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub dim: usize,
    pub dim_a: usize,
    pub tolerance: f64,
    pub tpcp: VerificationReport,
    pub range: RangeCheck,
    pub dfs: Checked<DfsCheck>,
    /// `‖Σ_μ A_μ†B_μ‖_F`.
    pub cross_term_residual: Checked<f64>,
    /// Choi distance between `S` and `S ∘ (P_A + P_Ā)`.
    pub theorem_residual: Checked<f64>,
    /// Threshold `theorem_residual` is compared against (`tol · d`).
    pub theorem_tolerance: f64,
    pub coherence_sensitivity: Checked<f64>,
    pub corollary_applies: bool,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn dfs_certificate(&self) -> Option<&DfsCertificate> {
        self.dfs.value().and_then(|d| d.certificate.as_ref())
    }

    pub fn theorem_passed(&self) -> bool {
        self.theorem_residual
            .value()
            .is_some_and(|&r| r <= self.theorem_tolerance)
    }

    /// Range condition, DFS and coherence destruction all hold.
    pub fn passed(&self) -> bool {
        self.range.passed && self.dfs_certificate().is_some() && self.theorem_passed()
    }
}

pub fn check_range_condition(ch: &KrausChannel, split: &SubspaceSplit, tol: Tolerance) -> Result<RangeCheck> {
    let residual = split
        .kraus_blocks(ch)?
        .iter()
        .map(|b| b.bottom_residual)
        .fold(0.0, f64::max);
    Ok(RangeCheck {
        residual,
        passed: residual <= tol.eps(),
    })
}

/// Decides whether `H_A` is decoherence-free under `ch`.
///
/// The restriction `ρ_A ↦ Σ A_μ ρ_A A_μ†` is a unitary conjugation iff its
/// Choi matrix has rank one (second eigenvalue at most `tol · d_A`) and the
/// rank-one factor is unitary. `U_A` is read off the dominant eigenvector and
/// re-unitarised by its polar factor. The certificate is issued when the
/// restriction is within `tol · d_A` (Choi distance) of conjugation by `U_A`.
pub fn check_dfs(ch: &KrausChannel, split: &SubspaceSplit, tol: Tolerance) -> Result<DfsCheck> {
    let blocks = split.kraus_blocks(ch)?;
    let da = split.dim_a();
    let restricted = restricted_channel(&blocks)?;
    let choi = restricted.choi();
    let (values, vectors) = linalg::hermitian_eigen(choi.matrix());
    let second = values.get(1).copied().unwrap_or(0.0);
    let threshold = tol.eps() * da as f64;

    let top = values[0].max(0.0);
    let factor: Vec<Complex64> = vectors.column(0).iter().map(|z| z * top.sqrt()).collect();
    let factor = linalg::unvectorize(&factor, da, da);
    let u_a = linalg::fix_global_phase(&linalg::polar_unitary(&factor));

    let coeffs: Vec<Complex64> = blocks
        .iter()
        .map(|b| linalg::trace(&(u_a.adjoint() * &b.a_mu)) / da as f64)
        .collect();
    let proportionality_residual = blocks
        .iter()
        .zip(&coeffs)
        .map(|(b, &c)| linalg::frobenius(&(&b.a_mu - &u_a * c)))
        .fold(0.0, f64::max);
    let coeff_norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let unitary = KrausChannel::new(vec![u_a.clone()])?;
    let channel_residual = restricted.distance(&unitary)?;

    let certificate = (second <= threshold && channel_residual <= threshold).then(|| DfsCertificate {
        unitarity_residual: linalg::isometry_residual(&u_a),
        u_a,
        coeffs,
        proportionality_residual,
        coefficient_norm_residual: (coeff_norm - 1.0).abs(),
        channel_residual,
    });
    Ok(DfsCheck {
        restricted_eigenvalues: values,
        second_eigenvalue: second,
        channel_residual,
        certificate,
    })
}

fn restricted_channel(blocks: &[BlockKraus]) -> Result<KrausChannel> {
    KrausChannel::new(blocks.iter().map(|b| b.a_mu.clone()).collect())
}

/// `‖Σ_μ A_μ†B_μ‖_F`, the off-diagonal block of `Σ K_μ†K_μ` for a channel
/// whose range lies in `H_A`.
pub fn check_cross_term(ch: &KrausChannel, split: &SubspaceSplit) -> Result<f64> {
    let blocks = split.kraus_blocks(ch)?;
    let mut acc = ComplexMatrix::zeros(split.dim_a(), split.dim_abar());
    for b in &blocks {
        acc += b.a_mu.adjoint() * &b.b_mu;
    }
    Ok(linalg::frobenius(&acc))
}

/// Choi distance between `ch` and `ch ∘ (P_A + P_Ā)`; zero iff the channel
/// is blind to the `A`/`Ā` coherences.
pub fn verify_theorem(ch: &KrausChannel, split: &SubspaceSplit) -> Result<f64> {
    let pinched = ch.after(&split.pinching_channel())?;
    ch.distance(&pinched)
}

/// `ρ_C ↦ Σ_μ A_μ ρ_C B_μ† + h.c.`, the contribution of the coherence block
/// to the `A` block of the output.
pub fn cross_map(blocks: &[BlockKraus], rho_c: &ComplexMatrix) -> ComplexMatrix {
    let da = blocks.first().map_or(0, |b| b.a_mu.nrows());
    let mut x = ComplexMatrix::zeros(da, da);
    for b in blocks {
        x += &b.a_mu * rho_c * b.b_mu.adjoint();
    }
    &x + x.adjoint()
}

/// Operator norm (largest singular value, Frobenius on both sides) of
/// [`cross_map`].
///
/// The map is only real-linear because of the Hermitian-conjugate term, so
/// it is stacked over the real basis `{E_kl, i·E_kl}` of `d_A × d_Ā` complex
/// matrices into a real `2d_A² × 2d_A d_Ā` matrix.
pub fn coherence_sensitivity(ch: &KrausChannel, split: &SubspaceSplit) -> Result<f64> {
    let blocks = split.kraus_blocks(ch)?;
    let (da, db) = (split.dim_a(), split.dim_abar());
    let mut stacked = DMatrix::<f64>::zeros(2 * da * da, 2 * da * db);
    let mut col = 0;
    for l in 0..db {
        for k in 0..da {
            for unit in [linalg::ONE, Complex64::i()] {
                let mut e = ComplexMatrix::zeros(da, db);
                e[(k, l)] = unit;
                let image = cross_map(&blocks, &e);
                for (r, z) in image.iter().enumerate() {
                    stacked[(2 * r, col)] = z.re;
                    stacked[(2 * r + 1, col)] = z.im;
                }
                col += 1;
            }
        }
    }
    Ok(SVD::new(stacked, false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max))
}

impl FeedbackProtocol {
    pub fn validate(&self, split: &SubspaceSplit, tol: Tolerance) -> Result<()> {
        let (da, db) = (split.dim_a(), split.dim_abar());
        if self.u_a.nrows() != da || self.u_a.ncols() != da {
            return Err(Error::InvalidProtocol(format!(
                "U_A is {}x{}, expected {da}x{da}",
                self.u_a.nrows(),
                self.u_a.ncols()
            )));
        }
        let unitarity = linalg::isometry_residual(&self.u_a);
        if unitarity > tol.eps() {
            return Err(Error::InvalidProtocol(format!(
                "U_A is not unitary (‖U†U − I‖_F = {unitarity:e})"
            )));
        }
        if self.correction.is_empty() {
            return Err(Error::InvalidProtocol("no correction operators".into()));
        }
        let mut gram = ComplexMatrix::zeros(db, db);
        for (i, b) in self.correction.iter().enumerate() {
            if b.nrows() != da || b.ncols() != db {
                return Err(Error::InvalidProtocol(format!(
                    "correction[{i}] is {}x{}, expected {da}x{db}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            gram += b.adjoint() * b;
        }
        let tp = linalg::frobenius_distance(&gram, &linalg::identity(db));
        if tp > tol.eps() {
            return Err(Error::InvalidProtocol(format!(
                "corrections are not trace preserving (‖Σ B†B − I‖_F = {tp:e})"
            )));
        }
        Ok(())
    }
}

/// Reads off `(U_A, {B_μ})` from a channel that satisfies the range and DFS
/// conditions. Correction operators with norm at most `tol` are dropped; the
/// remaining set is gauge-dependent, only the channel it defines is not.
pub fn extract_feedback_protocol(ch: &KrausChannel, split: &SubspaceSplit, tol: Tolerance) -> Result<FeedbackProtocol> {
    let range = check_range_condition(ch, split, tol)?;
    if !range.passed {
        return Err(Error::RangeViolation(range.residual));
    }
    let cert = check_dfs(ch, split, tol)?.into_certificate()?;
    let correction = split
        .kraus_blocks(ch)?
        .into_iter()
        .map(|b| b.b_mu)
        .filter(|b| linalg::frobenius(b) > tol.eps())
        .collect();
    Ok(FeedbackProtocol {
        u_a: cert.u_a,
        correction,
    })
}

/// Kraus set `{V_A U_A V_A†} ∪ {V_A B_μ V_Ā†}`: a projective `A`/`Ā`
/// measurement followed by the conditional operation.
pub fn protocol_to_channel(p: &FeedbackProtocol, split: &SubspaceSplit, tol: Tolerance) -> Result<KrausChannel> {
    p.validate(split, tol)?;
    let (da, db) = (split.dim_a(), split.dim_abar());
    let mut kraus = Vec::with_capacity(1 + p.correction.len());
    kraus.push(split.embed_top(&p.u_a, &ComplexMatrix::zeros(da, db)));
    for b in &p.correction {
        kraus.push(split.embed_top(&ComplexMatrix::zeros(da, da), b));
    }
    KrausChannel::new(kraus)
}

/// Output purity for the pure input `ψ`, and whether `ψ` lies in the
/// exceptional set where the output stays pure.
pub fn corollary_check(
    ch: &KrausChannel,
    split: &SubspaceSplit,
    psi: &PureState,
    tol: Tolerance,
) -> Result<CorollaryResult> {
    let cert = check_dfs(ch, split, tol)?.into_certificate()?;
    let out = ch.apply(&psi.density())?;
    let out_a = split.blocks_of(out.matrix()).rho_a;
    let parts = split.split_state(psi)?;

    let norm_a = parts.psi_a.norm();
    let norm_abar = parts.psi_abar.norm();
    let vacuous = norm_a <= tol.eps() || norm_abar <= tol.eps();
    let exception = vacuous || {
        let mut corrected = ComplexMatrix::zeros(split.dim_a(), split.dim_a());
        for b in split.kraus_blocks(ch)? {
            let v = &b.b_mu * &parts.psi_abar;
            corrected += linalg::outer(&v);
        }
        let target = linalg::outer(&(&cert.u_a * &parts.psi_a));
        let lambda = linalg::trace(&corrected).re / (norm_a * norm_a);
        linalg::frobenius(&(corrected - target.scale(lambda))) <= tol.eps()
    };
    Ok(CorollaryResult {
        purity: state::purity(&out_a),
        full_purity: out.purity(),
        exception,
        vacuous,
        corollary_applies: split.corollary_applies(),
    })
}

/// Runs every check. Checks that presuppose the range condition are skipped
/// when it fails.
pub fn analyze(ch: &KrausChannel, split: &SubspaceSplit, tol: Tolerance) -> Result<AnalysisReport> {
    let tpcp = ch.verify_tpcp(tol);
    let range = check_range_condition(ch, split, tol)?;
    let theorem_tolerance = tol.eps() * split.dim() as f64;
    let mut notes = Vec::new();
    if !tpcp.passed {
        notes.push(format!(
            "Kraus set is not trace preserving (residual {:e})",
            tpcp.residual
        ));
    }
    if !split.corollary_applies() {
        notes.push(
            "d_A = 1: coherence destruction still applies, but the pure-state purity statement needs d_A > 1".into(),
        );
    }

    let report = if range.passed {
        let dfs = check_dfs(ch, split, tol)?;
        if dfs.certificate.is_none() {
            notes.push(format!(
                "H_A is not decoherence-free (second restricted-Choi eigenvalue {:e})",
                dfs.second_eigenvalue
            ));
        }
        AnalysisReport {
            dim: split.dim(),
            dim_a: split.dim_a(),
            tolerance: tol.eps(),
            tpcp,
            range,
            dfs: Checked::Done(dfs),
            cross_term_residual: Checked::Done(check_cross_term(ch, split)?),
            theorem_residual: Checked::Done(verify_theorem(ch, split)?),
            theorem_tolerance,
            coherence_sensitivity: Checked::Done(coherence_sensitivity(ch, split)?),
            corollary_applies: split.corollary_applies(),
            notes,
        }
    } else {
        let reason = format!("range condition failed (residual {:e})", range.residual);
        AnalysisReport {
            dim: split.dim(),
            dim_a: split.dim_a(),
            tolerance: tol.eps(),
            tpcp,
            range,
            dfs: Checked::skipped(&reason),
            cross_term_residual: Checked::skipped(&reason),
            theorem_residual: Checked::skipped(&reason),
            theorem_tolerance,
            coherence_sensitivity: Checked::skipped(&reason),
            corollary_applies: split.corollary_applies(),
            notes,
        }
    };
    Ok(report)
}
