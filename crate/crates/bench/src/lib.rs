//! Fixed benchmark inputs, seeded so every run measures the same instances.

use pcsft_core::linalg::ComplexOperator;
use pcsft_core::random::{random_density, random_hermitian, random_kraus_set, seeded_rng};
use pcsft_core::{covariance_from_state, BlockFilter, DensityOperator, DispersionScale, GaussianFieldSpec};

pub const SEED: u64 = 0x5eed;

pub fn state(dim: usize) -> DensityOperator {
    random_density(dim, dim, &mut seeded_rng(SEED ^ dim as u64))
}

pub fn field(dim: usize) -> GaussianFieldSpec {
    covariance_from_state(&state(dim), DispersionScale::default(), SEED)
}

pub fn hermitian(dim: usize) -> ComplexOperator {
    random_hermitian(dim, &mut seeded_rng(SEED.rotate_left(7) ^ dim as u64))
}

pub fn kraus_channel(dim: usize, blocks: usize) -> BlockFilter {
    let set = random_kraus_set(dim, blocks, &mut seeded_rng(SEED.rotate_left(13) ^ dim as u64));
    BlockFilter::new(set).expect("normalized Kraus sets are trace preserving")
}
