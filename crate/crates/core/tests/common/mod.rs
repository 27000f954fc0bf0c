#![allow(dead_code)]

use dfs_core::generators::{haar_unitary_with, Seed};
use dfs_core::{ComplexMatrix, KrausChannel, SubspaceSplit, Tolerance};

/// Random trace-preserving channel whose range lies in the first `dim_a`
/// coordinates: the top blocks of `n_kraus` stacked rows of a Haar isometry.
/// Generically not decoherence-free on `H_A`.
pub fn random_range_channel(dim_a: usize, dim: usize, n_kraus: usize, seed: Seed) -> KrausChannel {
    let rows = n_kraus * dim_a;
    assert!(rows >= dim);
    let u = haar_unitary_with(&mut seed.rng(0), rows);
    let iso = u.columns(0, dim).into_owned();
    let kraus = (0..n_kraus)
        .map(|mu| {
            let mut k = ComplexMatrix::zeros(dim, dim);
            k.rows_mut(0, dim_a).copy_from(&iso.rows(mu * dim_a, dim_a));
            k
        })
        .collect();
    KrausChannel::new(kraus).unwrap()
}

/// Random CPTP channel with no structure (Stinespring isometry split into
/// `n_kraus` square blocks).
pub fn random_channel(dim: usize, n_kraus: usize, seed: Seed) -> KrausChannel {
    let u = haar_unitary_with(&mut seed.rng(0), dim * n_kraus);
    let iso = u.columns(0, dim).into_owned();
    let kraus = (0..n_kraus).map(|mu| iso.rows(mu * dim, dim).into_owned()).collect();
    KrausChannel::new(kraus).unwrap()
}

/// Random split with a Haar-rotated target basis.
pub fn random_split(dim: usize, dim_a: usize, seed: Seed) -> SubspaceSplit {
    let u = haar_unitary_with(&mut seed.rng(1), dim);
    let basis = u.columns(0, dim_a).into_owned();
    SubspaceSplit::new(dim, dim_a, Some(basis), Tolerance::default()).unwrap()
}

pub fn haar_remix(ch: &KrausChannel, seed: Seed) -> KrausChannel {
    let u = haar_unitary_with(&mut seed.rng(2), ch.n_kraus());
    ch.remix(&u).unwrap()
}

/// Rotates a standard-frame channel into the frame of `split`:
/// `K ↦ W K W†` with `W = [V_A | V_Ā]`.
pub fn rotate_into(ch: &KrausChannel, split: &SubspaceSplit) -> KrausChannel {
    let mut w = ComplexMatrix::zeros(split.dim(), split.dim());
    w.columns_mut(0, split.dim_a()).copy_from(split.basis_a());
    w.columns_mut(split.dim_a(), split.dim_abar())
        .copy_from(split.basis_abar());
    KrausChannel::new(ch.kraus().iter().map(|k| &w * k * w.adjoint()).collect()).unwrap()
}
