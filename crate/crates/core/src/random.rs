//! Seeded random streams and random test instances (states, observables,
//! projectors, channels).
//!
//! Every field realization is drawn from its own ChaCha8 substream, keyed by
//! `(seed, sample index, block index)`. A draw never depends on which worker
//! produced the neighbouring draws, so parallel sampling is bitwise equal to
//! serial sampling.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The generator behind every stream.
pub use rand_chacha::ChaCha8Rng as StreamRng;

use crate::linalg::{self, ComplexOperator, FieldVector, C64};
use crate::state::DensityOperator;

/// Each block owns a window of `2^40` keystream words inside the sample's
/// stream; a field of dimension `d` consumes roughly `4d` words.
const BLOCK_WORD_SHIFT: u32 = 40;

/// Upper bound on the number of blocks addressable within one sample stream.
pub const MAX_BLOCKS: usize = 1 << (68 - BLOCK_WORD_SHIFT);

/// Generator for the `block`-th independent field of sample `sample`.
pub fn substream(seed: u64, sample: u64, block: u64) -> ChaCha8Rng {
    debug_assert!((block as usize) < MAX_BLOCKS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng.set_word_pos(u128::from(block) << BLOCK_WORD_SHIFT);
    rng
}

/// A plain seeded generator for building random instances.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
pub(crate) fn rng_for_tests(seed: u64) -> ChaCha8Rng {
    seeded_rng(seed)
}

/// Standard circular complex normal: real and imaginary parts `N(0, 1/2)`,
/// so `E|z|^2 = 1` and `E z^2 = 0`.
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn standard_complex_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> FieldVector {
    DVector::from_fn(dim, |_, _| standard_complex_normal(rng))
}

/// Ginibre matrix: i.i.d. standard complex normal entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexOperator {
    ComplexOperator::from_fn(rows, cols, |_, _| standard_complex_normal(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    let g = random_complex_matrix(dim, dim, rng);
    (&g + g.adjoint()).unscale(2.0)
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexOperator {
    let qr = random_complex_matrix(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for z in q.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    q
}

pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> FieldVector {
    let v = standard_complex_vector(dim, rng);
    let norm = v.norm();
    v.unscale(norm)
}

/// Random density operator of the given rank (`G G* / Tr(G G*)` with `G`
/// of shape `dim x rank`).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let g = random_complex_matrix(dim, rank.max(1), rng);
    let gg = &g * g.adjoint();
    let tr = linalg::trace(&gg).re;
    let mut rho = gg.unscale(tr);
    // exact Hermitian symmetry
    rho = (&rho + rho.adjoint()).unscale(2.0);
    DensityOperator::new(rho).expect("Wishart normalization is a density operator")
}

/// Random orthogonal projector of rank `rank` onto a Haar-random subspace.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexOperator {
    let u = random_unitary(dim, rng);
    let cols = u.columns(0, rank.min(dim));
    let p = cols * cols.adjoint();
    (&p + p.adjoint()).unscale(2.0)
}

/// Random trace-preserving Kraus set `{K_i S^{-1/2}}` with
/// `S = sum_i K_i* K_i`, so that `sum_i V_i* V_i = I`.
pub fn random_kraus_set<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<ComplexOperator> {
    let raw: Vec<ComplexOperator> = (0..count.max(1))
        .map(|_| random_complex_matrix(dim, dim, rng))
        .collect();
    let s = raw.iter().fold(linalg::zero(dim), |acc, k| acc + k.adjoint() * k);
    let eig = linalg::eig_hermitian_unchecked(&s).expect("Gram matrix decomposes");
    let inv_sqrt = eig.map_spectrum(|l| C64::new(1.0 / l.sqrt(), 0.0));
    raw.into_iter().map(|k| k * &inv_sqrt).collect()
}
