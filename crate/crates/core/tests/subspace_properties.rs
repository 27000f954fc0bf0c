mod common;

use dfs_core::generators::{random_density, random_dfs_channel, Seed};
use dfs_core::linalg;
use dfs_core::{ComplexMatrix, DfsChannelSpec, SubspaceSplit, Tolerance};

fn splits(count: u64) -> impl Iterator<Item = (SubspaceSplit, u64)> {
    (0..count).map(|s| {
        let dim = 2 + (s % 4) as usize;
        let dim_a = 1 + (s / 4 % (dim as u64 - 1)) as usize;
        (common::random_split(dim, dim_a, Seed(500 + s)), s)
    })
}

#[test]
fn block_round_trip_on_random_states_and_splits() {
    for (split, s) in splits(100) {
        assert!(split.orthonormality_residual() <= 1e-12);
        let rho = random_density(split.dim(), Seed(s));
        let blocks = split.block_decompose(&rho).unwrap();
        assert!(linalg::frobenius_distance(&split.recompose(&blocks), rho.matrix()) <= 1e-12);
        let tr = linalg::trace(&blocks.rho_a).re + linalg::trace(&blocks.rho_abar).re;
        assert!((tr - 1.0).abs() <= 1e-12);
        assert!(linalg::hermiticity_residual(&blocks.rho_a) <= 1e-12);
        assert!(linalg::hermiticity_residual(&blocks.rho_abar) <= 1e-12);
    }
}

#[test]
fn pinch_is_idempotent_trace_and_positivity_preserving() {
    for (split, s) in splits(100) {
        let rho = random_density(split.dim(), Seed(7_000 + s));
        let once = split.pinch(&rho).unwrap();
        let twice = split.pinch(&once).unwrap();
        assert!(linalg::frobenius_distance(once.matrix(), twice.matrix()) <= 1e-12);
        assert!((once.trace() - 1.0).abs() <= 1e-12);
        assert!(once.min_eigenvalue() >= -1e-12);
        let sum = split.project_a(&rho).unwrap() + split.project_abar(&rho).unwrap();
        assert!(linalg::frobenius_distance(&sum, once.matrix()) <= 1e-14);
        // the pinching channel agrees with the direct formula
        let via_channel = split.pinching_channel().apply(&rho).unwrap();
        assert!(linalg::frobenius_distance(via_channel.matrix(), once.matrix()) <= 1e-12);
        assert!(linalg::frobenius(&split.block_decompose(&once).unwrap().rho_c) <= 1e-12);
    }
}

#[test]
fn block_gram_matches_direct_gram() {
    for (split, s) in splits(60) {
        let ch = common::random_channel(split.dim(), 3, Seed(s));
        let blocks = split.kraus_blocks(&ch).unwrap();
        let mut from_blocks = ComplexMatrix::zeros(split.dim_a(), split.dim_a());
        for b in &blocks {
            from_blocks += b.a_mu.adjoint() * &b.a_mu;
        }
        // A-block of Σ K†K minus the contribution of the bottom rows
        let va = split.basis_a();
        let pa = split.projector_a();
        let mut direct = ComplexMatrix::zeros(split.dim_a(), split.dim_a());
        for k in ch.kraus() {
            let top = &pa * k;
            direct += va.adjoint() * top.adjoint() * &top * va;
        }
        assert!(linalg::frobenius_distance(&from_blocks, &direct) <= 1e-12);
    }
}

#[test]
fn block_gram_equals_a_block_when_range_holds() {
    for s in 0..40 {
        let split = common::random_split(5, 2, Seed(s));
        let ch = common::rotate_into(&common::random_range_channel(2, 5, 3, Seed(s)), &split);
        let blocks = split.kraus_blocks(&ch).unwrap();
        let mut from_blocks = ComplexMatrix::zeros(2, 2);
        for b in &blocks {
            from_blocks += b.a_mu.adjoint() * &b.a_mu;
        }
        let va = split.basis_a();
        let direct = va.adjoint() * ch.gram() * va;
        assert!(linalg::frobenius_distance(&from_blocks, &direct) <= 1e-12);
    }
}

#[test]
fn zero_bottom_blocks_iff_projection_leaves_channel_unchanged() {
    let tol = Tolerance::default();
    for s in 0..30 {
        let split = common::random_split(4, 2, Seed(s));
        let inside = common::rotate_into(&common::random_range_channel(2, 4, 2, Seed(s)), &split);
        let outside = common::random_channel(4, 2, Seed(s));
        for (ch, expect_inside) in [(inside, true), (outside, false)] {
            let max_bottom = split
                .kraus_blocks(&ch)
                .unwrap()
                .iter()
                .map(|b| b.bottom_residual)
                .fold(0.0, f64::max);
            let projected = split.projection_channel_a().after(&ch).unwrap();
            let dist = ch.distance(&projected).unwrap();
            assert_eq!(max_bottom <= tol.eps(), expect_inside);
            assert_eq!(dist <= tol.eps(), expect_inside, "distance {dist}");
        }
    }
    let inst = random_dfs_channel(DfsChannelSpec {
        dim_a: 3,
        dim_abar: 2,
        n_kraus: 2,
        seed: Seed(4),
    })
    .unwrap();
    let projected = inst.split.projection_channel_a().after(&inst.channel).unwrap();
    assert!(inst.channel.distance(&projected).unwrap() <= 1e-12);
}
