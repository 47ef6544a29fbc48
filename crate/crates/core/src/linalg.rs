//! Dense complex linear algebra on a finite-dimensional Hilbert space.
//!
//! Inner products are linear in the first argument and conjugate-linear in
//! the second: `<u, v> = sum_k u_k conj(v_k)`. With that convention the
//! quadratic form `<A phi, phi>` equals `phi* A phi` and a covariance
//! operator is `D = E[phi phi*]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix. Square for states, observables and Hamiltonians;
/// filters may be rectangular (`out_dim x in_dim`).
pub type ComplexOperator = DMatrix<C64>;

/// A single field realization `phi(omega)` in `C^d`.
pub type FieldVector = DVector<C64>;

/// Tolerance for structural predicates on unit-scale operators.
pub const STRUCTURAL_TOL: f64 = 1e-10;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_SWEEPS: usize = 10_000;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(dim: usize) -> ComplexOperator {
    ComplexOperator::identity(dim, dim)
}

pub fn zero(dim: usize) -> ComplexOperator {
    ComplexOperator::zeros(dim, dim)
}

/// Diagonal operator with real entries.
pub fn diag(values: &[f64]) -> ComplexOperator {
    let d = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
    ComplexOperator::from_diagonal(&d)
}

/// Builds a square operator from rows of complex entries.
///
/// Panics if the rows are ragged or their count differs from their length.
pub fn from_rows(rows: &[Vec<C64>]) -> ComplexOperator {
    let dim = rows.len();
    assert!(rows.iter().all(|r| r.len() == dim), "rows must form a square matrix");
    ComplexOperator::from_fn(dim, dim, |i, j| rows[i][j])
}

pub fn pauli_x() -> ComplexOperator {
    from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])
}

pub fn pauli_y() -> ComplexOperator {
    from_rows(&[vec![ZERO, -I], vec![I, ZERO]])
}

pub fn pauli_z() -> ComplexOperator {
    diag(&[1.0, -1.0])
}

/// `<u, v>`, linear in `u`.
pub fn inner(u: &FieldVector, v: &FieldVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Rank-one operator `u (x) v : w -> <w, v> u`, i.e. the matrix `u v*`.
pub fn outer(u: &FieldVector, v: &FieldVector) -> ComplexOperator {
    u * v.adjoint()
}

/// Conjugate transpose.
pub fn adjoint(m: &ComplexOperator) -> ComplexOperator {
    m.adjoint()
}

pub fn trace(m: &ComplexOperator) -> C64 {
    m.diagonal().iter().sum()
}

pub fn frobenius_norm(m: &ComplexOperator) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &ComplexOperator, b: &ComplexOperator) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::dims(
            format!("{}x{}", a.nrows(), a.ncols()),
            format!("{}x{}", b.nrows(), b.ncols()),
        ));
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Tolerance scaled to the size of `m`: `1e-10 * max(1, |m|_F)`.
pub fn structural_tol(m: &ComplexOperator) -> f64 {
    STRUCTURAL_TOL * frobenius_norm(m).max(1.0)
}

/// Largest entrywise modulus of `M - M*`. Infinite for non-square input.
pub fn hermitian_deviation(m: &ComplexOperator) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &ComplexOperator, tol: f64) -> bool {
    hermitian_deviation(m) <= tol
}

pub(crate) fn ensure_hermitian(m: &ComplexOperator, tol: f64) -> Result<()> {
    let deviation = hermitian_deviation(m);
    if deviation <= tol {
        Ok(())
    } else {
        Err(Error::NotHermitian { deviation, tol })
    }
}

pub(crate) fn ensure_square(m: &ComplexOperator, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::dims(
            format!("{dim}x{dim}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

/// True iff `M` is Hermitian within `tol` and its smallest eigenvalue is at
/// least `-tol`.
pub fn is_psd(m: &ComplexOperator, tol: f64) -> Result<bool> {
    ensure_hermitian(m, tol)?;
    let eig = eig_hermitian_unchecked(m)?;
    Ok(eig.min_eigenvalue().is_none_or(|l| l >= -tol))
}

/// Spectral decomposition `M = Q diag(lambda) Q*` of a Hermitian operator,
/// eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in eigenvalue order.
    pub eigenvectors: ComplexOperator,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// `Q diag(f(lambda)) Q*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexOperator {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let factor = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= factor;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexOperator {
        self.map_spectrum(|l| C64::new(l, 0.0))
    }
}

pub fn eig_hermitian(m: &ComplexOperator) -> Result<HermitianEig> {
    ensure_hermitian(m, structural_tol(m))?;
    eig_hermitian_unchecked(m)
}

/// Decomposes the Hermitian part `(M + M*)/2` without checking how far `M`
/// is from it.
pub(crate) fn eig_hermitian_unchecked(m: &ComplexOperator) -> Result<HermitianEig> {
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEig {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexOperator::zeros(0, 0),
        });
    }
    let herm = (m + m.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::try_new(herm, EIG_EPS, EIG_MAX_SWEEPS).ok_or(Error::ConvergenceFailure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    if order.iter().any(|&k| !eig.eigenvalues[k].is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexOperator::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Propagator `exp(-i t H / hbar)` of the Schrodinger equation, built from
/// the spectral decomposition of `H`.
pub fn unitary_from_hamiltonian(h: &ComplexOperator, t: f64, hbar: f64) -> Result<ComplexOperator> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    ensure_hermitian(h, structural_tol(h))?;
    if t == 0.0 {
        return Ok(identity(h.nrows()));
    }
    let eig = eig_hermitian_unchecked(h)?;
    Ok(eig.map_spectrum(|lambda| C64::from_polar(1.0, -t * lambda / hbar)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, rng_for_tests};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&identity(3)), identity(3));
        let m = from_rows(&[vec![ZERO, I], vec![ZERO, ZERO]]);
        let expected = from_rows(&[vec![ZERO, ZERO], vec![-I, ZERO]]);
        assert_eq!(adjoint(&m), expected);
    }

    #[test]
    fn hermitian_predicate() {
        assert!(is_hermitian(&pauli_y(), 1e-12));
        assert!(!is_hermitian(&from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]), 1e-12));
        assert!(is_hermitian(&identity(4), 0.0));
        assert!(!is_hermitian(&ComplexOperator::zeros(2, 3), 1.0));
    }

    #[test]
    fn psd_predicate() {
        assert!(is_psd(&diag(&[1.0, 0.0]), 1e-12).unwrap());
        assert!(!is_psd(&diag(&[1.0, -0.5]), 1e-12).unwrap());
        let psi = FieldVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        assert!(is_psd(&outer(&psi, &psi), 1e-12).unwrap());
        let err = is_psd(&from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]), 1e-12);
        assert!(matches!(err, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_examples() {
        let eig = eig_hermitian(&diag(&[1.0, 3.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, 1.0]);
        let eig = eig_hermitian(&diag(&[3.0, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, 1.0]);
        assert!(frobenius_distance(&eig.eigenvectors.map(|z| c(z.norm(), 0.0)), &identity(2)).unwrap() < 1e-14);

        let eig = eig_hermitian(&pauli_x()).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);

        let psi = FieldVector::from_vec(vec![c(0.5, 0.5), c(0.5, 0.0), c(0.0, -0.5)]);
        let eig = eig_hermitian(&outer(&psi, &psi)).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!(eig.eigenvalues[1..].iter().all(|l| l.abs() < 1e-14));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn frobenius_examples() {
        let m = pauli_y();
        assert_eq!(frobenius_distance(&m, &m).unwrap(), 0.0);
        assert_eq!(frobenius_distance(&identity(2), &zero(2)).unwrap(), 2f64.sqrt());
        assert_eq!(
            frobenius_distance(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap(),
            2f64.sqrt()
        );
        assert!(matches!(
            frobenius_distance(&identity(2), &identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn propagator_at_time_zero_is_identity() {
        let mut rng = rng_for_tests(1);
        let h = random_hermitian(5, &mut rng);
        assert_eq!(unitary_from_hamiltonian(&h, 0.0, 1.0).unwrap(), identity(5));
    }

    #[test]
    fn propagator_diagonal_phase() {
        let u = unitary_from_hamiltonian(&diag(&[0.0, 1.0]), PI, 1.0).unwrap();
        assert!(frobenius_distance(&u, &diag(&[1.0, -1.0])).unwrap() < 1e-14);
    }

    /// Truncated power series of `exp(A)`, summed until terms vanish.
    fn expm_series(a: &ComplexOperator) -> ComplexOperator {
        let n = a.nrows();
        let mut sum = identity(n);
        let mut term = identity(n);
        for k in 1..200 {
            term = &term * a / C64::new(k as f64, 0.0);
            sum += &term;
            if frobenius_norm(&term) < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn propagator_pauli_x_quarter_period() {
        // exp(-i (pi/2) sigma_x) = -i sigma_x
        let generator = pauli_x() * C64::new(0.0, -PI / 2.0);
        let oracle = expm_series(&generator);
        let expected = pauli_x() * C64::new(0.0, -1.0);
        assert!(frobenius_distance(&oracle, &expected).unwrap() < 1e-14);

        let u = unitary_from_hamiltonian(&pauli_x(), PI / 2.0, 1.0).unwrap();
        assert!(frobenius_distance(&u, &oracle).unwrap() < 1e-13);
    }

    #[test]
    fn propagator_matches_power_series_on_random_hamiltonians() {
        let mut rng = rng_for_tests(7);
        for dim in [2, 3, 5, 8] {
            let h = random_hermitian(dim, &mut rng);
            let t = 0.7;
            let oracle = expm_series(&(&h * C64::new(0.0, -t / 1.3)));
            let u = unitary_from_hamiltonian(&h, t, 1.3).unwrap();
            assert!(frobenius_distance(&u, &oracle).unwrap() < 1e-11, "dim {dim}");
        }
    }

    #[test]
    fn propagator_rejects_bad_arguments() {
        assert!(unitary_from_hamiltonian(&pauli_z(), 1.0, 0.0).is_err());
        assert!(unitary_from_hamiltonian(&pauli_z(), f64::NAN, 1.0).is_err());
        let m = from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]);
        assert!(matches!(
            unitary_from_hamiltonian(&m, 1.0, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    fn arb_complex_matrix(max_dim: usize) -> impl Strategy<Value = ComplexOperator> {
        (1..=max_dim).prop_flat_map(|n| {
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n)
                .prop_map(move |v| ComplexOperator::from_iterator(n, n, v.into_iter().map(|(a, b)| c(a, b))))
        })
    }

    fn arb_hermitian(max_dim: usize) -> impl Strategy<Value = ComplexOperator> {
        arb_complex_matrix(max_dim).prop_map(|m| (&m + m.adjoint()).unscale(2.0))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adjoint_is_an_involution(m in arb_complex_matrix(8)) {
            prop_assert_eq!(adjoint(&adjoint(&m)), m);
        }

        #[test]
        fn eig_reconstructs_and_is_unitary(m in arb_hermitian(32)) {
            let eig = eig_hermitian(&m).unwrap();
            let scale = frobenius_norm(&m).max(1.0);
            prop_assert!(frobenius_distance(&eig.reconstruct(), &m).unwrap() <= 1e-10 * scale);
            let n = m.nrows();
            let gram = eig.eigenvectors.adjoint() * &eig.eigenvectors;
            prop_assert!(frobenius_distance(&gram, &identity(n)).unwrap() <= 1e-10);
            prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn propagator_is_unitary_and_a_group(h in arb_hermitian(16), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let n = h.nrows();
            let u1 = unitary_from_hamiltonian(&h, t1, 1.0).unwrap();
            let u2 = unitary_from_hamiltonian(&h, t2, 1.0).unwrap();
            let u12 = unitary_from_hamiltonian(&h, t1 + t2, 1.0).unwrap();
            prop_assert!(frobenius_distance(&(&u1 * &u2), &u12).unwrap() <= 1e-9);
            prop_assert!(frobenius_distance(&(u1.adjoint() * &u1), &identity(n)).unwrap() <= 1e-10);
        }

        #[test]
        fn frobenius_distance_is_symmetric(a in arb_complex_matrix(6)) {
            let b = a.map(|z| z * c(0.5, -0.25));
            let ab = frobenius_distance(&a, &b).unwrap();
            let ba = frobenius_distance(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
        }
    }
}
