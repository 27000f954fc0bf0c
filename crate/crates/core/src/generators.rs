//! Seeded construction of test objects.
//!
//! All randomness flows from ChaCha20 (`rand_chacha` 0.9.0) with Gaussian
//! variates from `rand_distr` 0.5.1 `StandardNormal`; both versions are
//! pinned in the manifest so that seeded outputs stay byte-stable. A [`Seed`]
//! is split into independent sub-seeds by [`Seed::child`], and every draw
//! that may run in parallel takes its own child.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::analysis::{protocol_to_channel, FeedbackProtocol};
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::state::{DensityMatrix, PureState};
use crate::subspace::SubspaceSplit;

/// Smallest eigenvalue of `Σ B̃_μ†B̃_μ` accepted before whitening.
pub const WHITENING_FLOOR: f64 = 1e-12;
/// Fresh draws attempted when the whitening matrix is near-singular.
pub const MAX_RETRIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// ChaCha20 stream `stream` keyed by this seed.
    pub fn rng(self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }

    /// Independent sub-seed for `(self, index)`, via two SplitMix64 rounds.
    pub fn child(self, index: u64) -> Seed {
        Seed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)),
        ))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Complex standard Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    // filled row-major so the draw order does not depend on storage layout
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(dim: usize, seed: Seed) -> ComplexMatrix {
    haar_unitary_with(&mut seed.rng(0), dim)
}

/// Unit vector uniform on the complex sphere.
pub fn random_unit_vector_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let v = ComplexVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)));
        let n = v.norm();
        if n > 0.0 {
            return v.unscale(n);
        }
    }
}

pub fn random_pure_state_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    PureState::normalized(random_unit_vector_with(rng, dim)).expect("nonzero vector")
}

pub fn random_pure_state(dim: usize, seed: Seed) -> PureState {
    random_pure_state_with(&mut seed.rng(0), dim)
}

/// Hilbert–Schmidt random density matrix `GG† / tr(GG†)`.
pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    let m = m.unscale(tr);
    // exact Hermitian symmetrisation
    DensityMatrix::from_matrix_unchecked((&m + m.adjoint()).scale(0.5))
}

pub fn random_density(dim: usize, seed: Seed) -> DensityMatrix {
    random_density_with(&mut seed.rng(0), dim)
}

/// Parameters of a random control channel for which `H_A` is decoherence-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DfsChannelSpec {
    pub dim_a: usize,
    pub dim_abar: usize,
    pub n_kraus: usize,
    pub seed: Seed,
}

impl DfsChannelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim_a < 1 || self.dim_abar < 1 {
            return Err(Error::InvalidSpec(format!(
                "need d_A ≥ 1 and d_Ā ≥ 1, got ({}, {})",
                self.dim_a, self.dim_abar
            )));
        }
        if self.n_kraus < 2 {
            return Err(Error::InvalidSpec(format!(
                "need n_kraus ≥ 2 to satisfy Σ c̄_μ B_μ = 0 with B ≠ 0, got {}",
                self.n_kraus
            )));
        }
        if self.n_kraus * self.dim_a < self.dim_abar + self.dim_a {
            return Err(Error::InvalidSpec(format!(
                "need n_kraus·d_A ≥ d_Ā + d_A, got {}·{} < {} + {}",
                self.n_kraus, self.dim_a, self.dim_abar, self.dim_a
            )));
        }
        Ok(())
    }
}

/// A DFS control channel together with the parameters it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct DfsInstance {
    pub channel: KrausChannel,
    pub split: SubspaceSplit,
    pub u_a: ComplexMatrix,
    pub coeffs: Vec<Complex64>,
    pub corrections: Vec<ComplexMatrix>,
}

impl DfsInstance {
    /// Assembles `K_μ = (c_μ U_A  B_μ; 0 0)` in the standard split.
    pub fn assemble(u_a: ComplexMatrix, coeffs: Vec<Complex64>, corrections: Vec<ComplexMatrix>) -> Result<Self> {
        let dim_a = u_a.nrows();
        let dim_abar = corrections.first().map_or(0, |b| b.ncols());
        if coeffs.len() != corrections.len() {
            return Err(Error::DimensionMismatch {
                expected: coeffs.len(),
                found: corrections.len(),
                context: "coefficient / correction count",
            });
        }
        let split = SubspaceSplit::standard(dim_a + dim_abar, dim_a)?;
        let kraus = coeffs
            .iter()
            .zip(&corrections)
            .map(|(&c, b)| split.embed_top(&(&u_a * c), b))
            .collect();
        Ok(Self {
            channel: KrausChannel::new(kraus)?,
            split,
            u_a,
            coeffs,
            corrections,
        })
    }
}

/// Random channel satisfying the range and DFS conditions by construction.
///
/// `U_A` is Haar, `c` is a Haar-uniform unit vector and the corrections are
/// complex Gaussian matrices with the `c`-direction projected out
/// (`B̃_μ = G_μ − c_μ Σ_ν c̄_ν G_ν`) and then whitened by `M^{-1/2}`,
/// `M = Σ B̃_μ†B̃_μ`. The result has `Σ c̄_μ B_μ = 0` and `Σ B_μ†B_μ = I`.
pub fn random_dfs_channel(spec: DfsChannelSpec) -> Result<DfsInstance> {
    spec.validate()?;
    let DfsChannelSpec {
        dim_a,
        dim_abar,
        n_kraus,
        seed,
    } = spec;
    for attempt in 0..MAX_RETRIES {
        let mut rng = seed.rng(attempt as u64);
        let u_a = haar_unitary_with(&mut rng, dim_a);
        let c = random_unit_vector_with(&mut rng, n_kraus);
        let raw: Vec<ComplexMatrix> = (0..n_kraus)
            .map(|_| gaussian_matrix(&mut rng, dim_a, dim_abar))
            .collect();
        let mut weighted = ComplexMatrix::zeros(dim_a, dim_abar);
        for (g, cv) in raw.iter().zip(c.iter()) {
            weighted += g * cv.conj();
        }
        let projected: Vec<ComplexMatrix> = raw.iter().zip(c.iter()).map(|(g, &cv)| g - &weighted * cv).collect();
        let mut gram = ComplexMatrix::zeros(dim_abar, dim_abar);
        for b in &projected {
            gram += b.adjoint() * b;
        }
        let Some(whiten) = linalg::inverse_sqrt_psd(&gram, WHITENING_FLOOR) else {
            continue;
        };
        let corrections = projected.iter().map(|b| b * &whiten).collect();
        return DfsInstance::assemble(u_a, c.iter().copied().collect(), corrections);
    }
    Err(Error::SingularWhitening(MAX_RETRIES))
}

/// Hand-built `d_A = 2`, `d_Ā = 1` instance: `U_A = I`, `c = (1, 1)/√2`,
/// `B_1 = −B_2 = (1, 0)ᵀ/√2`.
pub fn hand_dfs_instance() -> DfsInstance {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b = linalg::from_real_rows(2, 1, &[s, 0.0]);
    DfsInstance::assemble(
        linalg::identity(2),
        vec![linalg::real(s), linalg::real(s)],
        vec![b.clone(), -b],
    )
    .expect("hand instance is well-formed")
}

/// The two-qubit map with `K_1 = (I Z; 0 0)/√2` and `K_2 = (Z −I; 0 0)/√2`
/// on the split `H_A = span{|00⟩, |01⟩}`. It forces every state into `H_A`
/// but its output depends on the `A`/`Ā` coherences.
pub fn counterexample_channel() -> (KrausChannel, SubspaceSplit) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let k1 = linalg::from_real_rows(4, 4, &[
        s, 0.0, s, 0.0,
        0.0, s, 0.0, -s,
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
    ]);
    #[rustfmt::skip]
    let k2 = linalg::from_real_rows(4, 4, &[
        s, 0.0, -s, 0.0,
        0.0, -s, 0.0, -s,
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
    ]);
    let ch = KrausChannel::new(vec![k1, k2]).expect("counterexample is well-formed");
    let split = SubspaceSplit::standard(4, 2).expect("valid split");
    (ch, split)
}

/// Measure `A` vs `Ā`; on `Ā`, send every basis vector `|j⟩` of `H_Ā` to
/// the target basis vector `|t⟩` of `H_A` with `B_j = |t⟩⟨j|`.
pub fn reset_channel(dim_a: usize, dim_abar: usize, target_basis_index: usize) -> Result<KrausChannel> {
    if target_basis_index >= dim_a {
        return Err(Error::IndexOutOfRange {
            index: target_basis_index,
            bound: dim_a,
        });
    }
    let split = SubspaceSplit::standard(dim_a + dim_abar, dim_a)?;
    let corrections = (0..dim_abar)
        .map(|j| {
            let mut b = ComplexMatrix::zeros(dim_a, dim_abar);
            b[(target_basis_index, j)] = linalg::ONE;
            b
        })
        .collect();
    let protocol = FeedbackProtocol {
        u_a: linalg::identity(dim_a),
        correction: corrections,
    };
    protocol_to_channel(&protocol, &split, Default::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Tolerance;

    #[test]
    fn haar_dim_one_is_phase() {
        let u = haar_unitary(1, Seed(3));
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for s in 0..20 {
            let u = haar_unitary(4, Seed(s));
            assert!(linalg::isometry_residual(&u) <= 1e-12);
            assert_eq!(u, haar_unitary(4, Seed(s)));
        }
        assert_ne!(haar_unitary(3, Seed(1)), haar_unitary(3, Seed(2)));
    }

    #[test]
    fn random_states_are_normalised() {
        for s in 0..20 {
            let psi = random_pure_state(5, Seed(s));
            assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
            let rho = random_density(5, Seed(s));
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(rho.min_eigenvalue() >= -1e-14);
            assert!(DensityMatrix::new(rho.matrix().clone(), Tolerance::default()).is_ok());
        }
    }

    #[test]
    fn fixed_seed_density_bytes_repeat() {
        let a = random_density(4, Seed(42));
        let b = random_density(4, Seed(42));
        let bits = |m: &DensityMatrix| {
            m.matrix()
                .iter()
                .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn child_seeds_differ() {
        let s = Seed(7);
        assert_ne!(s.child(0), s.child(1));
        assert_eq!(s.child(5), Seed(7).child(5));
    }

    #[test]
    fn spec_validation() {
        let ok = DfsChannelSpec {
            dim_a: 2,
            dim_abar: 1,
            n_kraus: 2,
            seed: Seed(0),
        };
        assert!(ok.validate().is_ok());
        assert!(random_dfs_channel(DfsChannelSpec { n_kraus: 1, ..ok }).is_err());
        assert!(random_dfs_channel(DfsChannelSpec { dim_abar: 3, ..ok }).is_err());
        assert!(random_dfs_channel(DfsChannelSpec { dim_abar: 0, ..ok }).is_err());
    }

    #[test]
    fn whitening_constraints_hold() {
        for (i, &(da, db, n)) in [(2, 1, 2), (2, 2, 3), (3, 2, 2), (2, 3, 4), (1, 1, 2)]
            .iter()
            .enumerate()
        {
            let inst = random_dfs_channel(DfsChannelSpec {
                dim_a: da,
                dim_abar: db,
                n_kraus: n,
                seed: Seed(100 + i as u64),
            })
            .unwrap();
            let mut gram = ComplexMatrix::zeros(db, db);
            let mut weighted = ComplexMatrix::zeros(da, db);
            for (b, c) in inst.corrections.iter().zip(&inst.coeffs) {
                gram += b.adjoint() * b;
                weighted += b * c.conj();
            }
            assert!(linalg::frobenius_distance(&gram, &linalg::identity(db)) <= 1e-12);
            assert!(linalg::frobenius(&weighted) <= 1e-12);
            let norm: f64 = inst.coeffs.iter().map(|c| c.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(inst.channel.verify_tpcp(Tolerance::new(1e-12).unwrap()).passed);
        }
    }

    #[test]
    fn hand_instance_arithmetic() {
        let inst = hand_dfs_instance();
        assert!(inst.channel.verify_tpcp(Tolerance::new(1e-15).unwrap()).passed);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let k1 = linalg::from_real_rows(3, 3, &[s, 0.0, s, 0.0, s, 0.0, 0.0, 0.0, 0.0]);
        assert!(linalg::frobenius_distance(&inst.channel.kraus()[0], &k1) < 1e-15);
    }

    #[test]
    fn counterexample_rows() {
        let (ch, split) = counterexample_channel();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let row0: Vec<f64> = (0..4).map(|j| ch.kraus()[0][(0, j)].re).collect();
        assert_eq!(row0, vec![s, 0.0, s, 0.0]);
        let row1: Vec<f64> = (0..4).map(|j| ch.kraus()[1][(1, j)].re).collect();
        assert_eq!(row1, vec![0.0, -s, 0.0, -s]);
        assert!(ch.verify_tpcp(Tolerance::default()).passed);
        assert_eq!(split.dim_a(), 2);
    }

    #[test]
    fn smallest_reset_channel() {
        let ch = reset_channel(1, 1, 0).unwrap();
        let expected = KrausChannel::new(vec![
            linalg::from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            linalg::from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        ])
        .unwrap();
        assert!(ch.distance(&expected).unwrap() < 1e-15);
        assert!(reset_channel(2, 1, 2).is_err());
    }

    #[test]
    fn reset_concentrates_mixed_input() {
        let ch = reset_channel(2, 3, 1).unwrap();
        let out = ch.apply(&DensityMatrix::maximally_mixed(5)).unwrap();
        let split = SubspaceSplit::standard(5, 2).unwrap();
        let blocks = split.block_decompose(&out).unwrap();
        assert!((linalg::trace(&blocks.rho_a).re - 1.0).abs() < 1e-14);
        assert!((blocks.rho_a[(1, 1)].re - 0.8).abs() < 1e-14);
    }
}
