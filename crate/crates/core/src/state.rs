//! Dictionary between quantum states and prequantum fields.
//!
//! A density operator `rho` corresponds to the covariance `D = sigma^2 rho`
//! of a Gaussian field; the observable `A` corresponds to the quadratic form
//! `f_A(phi) = <A phi, phi>`, whose field average is `Tr(D A)`, i.e. the
//! quantum average `Tr(rho A)` rescaled by the dispersion `Tr D`.

use crate::error::{Error, Result};
use crate::field::{self, FieldEnsemble, GaussianFieldSpec, STATISTICAL_SIGMAS};
use crate::linalg::{self, ComplexOperator, FieldVector, C64, STRUCTURAL_TOL};
use crate::stats::McEstimate;
use nalgebra::DMatrix;

/// Covariance traces at or below this are treated as a vanishing field.
pub const ZERO_FIELD_TRACE: f64 = 1e-12;

/// Hermitian, positive semidefinite operator with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(ComplexOperator);

impl DensityOperator {
    pub fn new(operator: ComplexOperator) -> Result<Self> {
        if !operator.is_square() {
            return Err(Error::InvalidState(format!(
                "operator must be square, got {}x{}",
                operator.nrows(),
                operator.ncols()
            )));
        }
        if operator.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let deviation = linalg::hermitian_deviation(&operator);
        if deviation > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let tr = linalg::trace(&operator);
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let eig = linalg::eig_hermitian_unchecked(&operator)?;
        if let Some(min) = eig.min_eigenvalue() {
            if min < -STRUCTURAL_TOL {
                return Err(Error::InvalidState(format!(
                    "not positive semidefinite (smallest eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(Self(operator))
    }

    /// `rho_psi = psi (x) psi`.
    pub fn from_pure(psi: &PureState) -> Self {
        Self(linalg::outer(psi.vector(), psi.vector()))
    }

    /// Maximally mixed state `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(linalg::identity(dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn operator(&self) -> &ComplexOperator {
        &self.0
    }

    pub fn into_operator(self) -> ComplexOperator {
        self.0
    }
}

/// Unit vector `psi` (a wave function).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(FieldVector);

impl PureState {
    pub fn new(vector: FieldVector) -> Result<Self> {
        let norm = vector.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(Self(vector))
    }

    pub fn normalized(vector: FieldVector) -> Result<Self> {
        let norm = vector.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self(vector.unscale(norm)))
    }

    pub fn vector(&self) -> &FieldVector {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// The dispersion `sigma^2 = Tr D` of a prequantum field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionScale(f64);

impl DispersionScale {
    pub fn new(sigma2: f64) -> Result<Self> {
        if sigma2 > 0.0 && sigma2.is_finite() {
            Ok(Self(sigma2))
        } else {
            Err(Error::InvalidArgument(format!(
                "dispersion must be positive, got {sigma2}"
            )))
        }
    }

    pub fn sigma2(self) -> f64 {
        self.0
    }
}

impl Default for DispersionScale {
    fn default() -> Self {
        Self(1.0)
    }
}

/// `D = sigma^2 rho`.
pub fn covariance_from_state(rho: &DensityOperator, scale: DispersionScale, seed: u64) -> GaussianFieldSpec {
    let d = rho.operator() * C64::new(scale.sigma2(), 0.0);
    GaussianFieldSpec::new(d, seed).expect("a scaled density operator is a valid covariance")
}

/// `rho = D / Tr D` for a bare covariance operator.
pub fn normalize_covariance(covariance: &ComplexOperator) -> Result<DensityOperator> {
    if !covariance.is_square() {
        return Err(Error::dims(
            "square covariance",
            format!("{}x{}", covariance.nrows(), covariance.ncols()),
        ));
    }
    let trace = linalg::trace(covariance).re;
    // NaN traces fall through to here as well
    if trace.partial_cmp(&ZERO_FIELD_TRACE) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::ZeroField { trace });
    }
    DensityOperator::new(covariance.unscale(trace))
}

pub fn state_from_covariance(spec: &GaussianFieldSpec) -> Result<DensityOperator> {
    normalize_covariance(spec.covariance())
}

/// `D_hat / Tr D_hat` for the empirical covariance of an ensemble.
pub fn empirical_state(ens: &FieldEnsemble) -> Result<DensityOperator> {
    normalize_covariance(&field::empirical_covariance(ens))
}

/// Entrywise standard error of [`empirical_state`] by linearizing
/// `D_hat / Tr D_hat`: each sample contributes
/// `(phi phi* - rho_hat |phi|^2) / Tr D_hat`. Zero for pure states; `None`
/// for one sample or a zero field.
pub fn empirical_state_stderr(ens: &FieldEnsemble) -> Option<DMatrix<f64>> {
    let n = ens.count();
    if n < 2 {
        return None;
    }
    let rho = empirical_state(ens).ok()?;
    let rho = rho.operator();
    let t = field::empirical_dispersion(ens).estimate;
    let d = ens.dim();
    let mut ss = DMatrix::<f64>::zeros(d, d);
    for phi in ens.samples() {
        let w = phi.norm_squared();
        for k in 0..d {
            for l in 0..d {
                ss[(k, l)] += ((phi[k] * phi[l].conj() - rho[(k, l)] * w) / t).norm_sqr();
            }
        }
    }
    let nf = n as f64;
    Some(ss.map(|v| (v / (nf - 1.0) / nf).sqrt()))
}

/// First-order RMS Frobenius error of [`empirical_state`] for `n` samples of
/// a field whose normalized covariance is `rho`:
/// `sqrt((1 - 2 Tr rho^3 + (Tr rho^2)^2) / n)`. It vanishes for pure states
/// and never exceeds `1 / sqrt(n)`.
pub fn state_rms_error(rho: &DensityOperator, n: usize) -> f64 {
    let r = rho.operator();
    let r2 = r * r;
    let p2 = linalg::trace(&r2).re;
    let p3 = trace_of_product(&r2, r).re;
    ((1.0 - 2.0 * p3 + p2 * p2).max(0.0) / n as f64).sqrt()
}

/// State-independent acceptance bound `C / sqrt(n)` on the Frobenius
/// residual of [`empirical_state`], with `C = 4` (four times the largest
/// first-order RMS error).
pub fn state_error_bound(n: usize) -> f64 {
    STATISTICAL_SIGMAS / (n as f64).sqrt()
}

fn check_observable(a: &ComplexOperator, dim: usize) -> Result<()> {
    linalg::ensure_square(a, dim)?;
    linalg::ensure_hermitian(a, linalg::structural_tol(a))
}

/// `<A phi, phi> = phi* A phi` for Hermitian `A`; the vanishing imaginary
/// part is dropped.
pub fn quadratic_form(a: &ComplexOperator, phi: &FieldVector) -> Result<f64> {
    check_observable(a, phi.len())?;
    Ok(quadratic_form_unchecked(a, phi))
}

pub(crate) fn quadratic_form_unchecked(a: &ComplexOperator, phi: &FieldVector) -> f64 {
    let value = linalg::inner(&(a * phi), phi);
    debug_assert!(
        value.im.abs()
            <= 1e-10 * phi.norm_squared() * a.iter().map(|z| z.norm()).fold(1.0, f64::max) * phi.len() as f64
    );
    value.re
}

/// `Re Tr(A B)` without forming the product.
fn trace_of_product(a: &ComplexOperator, b: &ComplexOperator) -> C64 {
    let n = a.nrows();
    let mut sum = linalg::ZERO;
    for i in 0..n {
        for j in 0..n {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    sum
}

/// Quantum average `Tr(rho A)`; for a pure state this is `<A psi, psi>`.
pub fn quantum_average(a: &ComplexOperator, rho: &DensityOperator) -> Result<f64> {
    check_observable(a, rho.dim())?;
    Ok(trace_of_product(rho.operator(), a).re)
}

/// Exact field average `E f_A(phi) = Tr(D A)` for `phi ~ N(0, D)`.
pub fn expected_quadratic_form(a: &ComplexOperator, spec: &GaussianFieldSpec) -> Result<f64> {
    check_observable(a, spec.dim())?;
    Ok(trace_of_product(spec.covariance(), a).re)
}

/// Monte Carlo estimate of the classical average `E f_A(phi)` from
/// `sample(spec, n)`.
pub fn classical_average_mc(a: &ComplexOperator, spec: &GaussianFieldSpec, n: usize) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::InvalidArgument("a Monte Carlo average needs n >= 2".into()));
    }
    check_observable(a, spec.dim())?;
    let ens = field::sample(spec, n)?;
    Ok(McEstimate::from_values(
        ens.samples().iter().map(|phi| quadratic_form_unchecked(a, phi)),
    ))
}

/// Classical average against `Tr D` times the quantum average.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    /// Monte Carlo classical average with its standard error.
    pub lhs: McEstimate,
    /// `sigma^2 Tr(rho A)`, exact.
    pub rhs: f64,
    pub difference: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn check_scaling_relation(
    a: &ComplexOperator,
    rho: &DensityOperator,
    scale: DispersionScale,
    n: usize,
    seed: u64,
) -> Result<ScalingReport> {
    let spec = covariance_from_state(rho, scale, seed);
    let lhs = classical_average_mc(a, &spec, n)?;
    let rhs = scale.sigma2() * quantum_average(a, rho)?;
    let difference = lhs.estimate - rhs;
    // The floor only matters for zero-variance forms (e.g. A = 0).
    let threshold = (STATISTICAL_SIGMAS * lhs.stderr.unwrap_or(0.0)).max(STRUCTURAL_TOL * rhs.abs().max(1.0));
    Ok(ScalingReport {
        lhs,
        rhs,
        difference,
        threshold,
        pass: difference.abs() <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, frobenius_distance, identity, pauli_x, pauli_z, zero};
    use crate::random::{random_density, random_hermitian, rng_for_tests};
    use proptest::prelude::*;

    fn ket0() -> DensityOperator {
        DensityOperator::new(diag(&[1.0, 0.0])).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::new(diag(&[0.5, 0.5])).is_ok());
        assert!(DensityOperator::new(diag(&[1.0, 1.0])).is_err());
        assert!(DensityOperator::new(diag(&[1.5, -0.5])).is_err());
        assert!(DensityOperator::new(pauli_x() * c(0.5, 0.0) + diag(&[0.5, 0.5])).is_ok());
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityOperator::new(m).is_err());
    }

    #[test]
    fn pure_state_validation() {
        let v = FieldVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(PureState::new(v.clone()).is_err());
        let psi = PureState::normalized(v).unwrap();
        assert!((psi.vector().norm() - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(FieldVector::zeros(2)).is_err());
        assert!(DispersionScale::new(0.0).is_err());
        assert!(DispersionScale::new(-1.0).is_err());
        assert_eq!(DispersionScale::default().sigma2(), 1.0);
    }

    #[test]
    fn covariance_from_state_examples() {
        let psi = PureState::new(FieldVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let spec = covariance_from_state(&DensityOperator::from_pure(&psi), DispersionScale::default(), 3);
        assert_eq!(spec.covariance(), &diag(&[1.0, 0.0]));
        assert_eq!(spec.seed(), 3);

        let spec = covariance_from_state(
            &DensityOperator::maximally_mixed(2),
            DispersionScale::new(4.0).unwrap(),
            0,
        );
        assert_eq!(spec.covariance(), &diag(&[2.0, 2.0]));
        assert!((field::dispersion(&spec) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn state_from_covariance_examples() {
        let rho = state_from_covariance(&GaussianFieldSpec::new(diag(&[2.0, 0.0]), 0).unwrap()).unwrap();
        assert_eq!(rho.operator(), &diag(&[1.0, 0.0]));
        let rho = state_from_covariance(&GaussianFieldSpec::new(identity(3), 0).unwrap()).unwrap();
        assert!(frobenius_distance(rho.operator(), &identity(3).unscale(3.0)).unwrap() < 1e-15);
        let err = state_from_covariance(&GaussianFieldSpec::new(zero(2), 0).unwrap());
        assert!(matches!(err, Err(Error::ZeroField { .. })));
    }

    #[test]
    fn quadratic_form_examples() {
        let phi = FieldVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.25)]);
        assert!((quadratic_form(&identity(2), &phi).unwrap() - phi.norm_squared()).abs() < 1e-14);
        let ones = FieldVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(quadratic_form(&pauli_z(), &ones).unwrap(), 0.0);
        let plus = ones.unscale(2f64.sqrt());
        assert!((quadratic_form(&pauli_x(), &plus).unwrap() - 1.0).abs() < 1e-15);

        assert!(matches!(
            quadratic_form(&identity(3), &phi),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut m = identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(quadratic_form(&m, &phi), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn quantum_average_examples() {
        let mut rng = rng_for_tests(2);
        let rho = random_density(3, 2, &mut rng);
        assert!((quantum_average(&identity(3), &rho).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(quantum_average(&diag(&[0.3, -2.0]), &ket0()).unwrap(), 0.3);
        assert_eq!(
            quantum_average(&pauli_z(), &DensityOperator::maximally_mixed(2)).unwrap(),
            0.0
        );
    }

    #[test]
    fn classical_average_examples() {
        let zero_spec = GaussianFieldSpec::new(zero(2), 1).unwrap();
        let est = classical_average_mc(&pauli_z(), &zero_spec, 100).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.stderr, Some(0.0));

        let spec = GaussianFieldSpec::new(diag(&[2.0, 1.0]), 2).unwrap();
        let est = classical_average_mc(&identity(2), &spec, 100_000).unwrap();
        assert!(est.agrees_with(3.0, 4.0, 0.0), "{est:?}");

        let spec = GaussianFieldSpec::new(identity(2), 3).unwrap();
        let est = classical_average_mc(&pauli_z(), &spec, 100_000).unwrap();
        assert!(est.agrees_with(0.0, 4.0, 0.0), "{est:?}");

        assert!(classical_average_mc(&pauli_z(), &spec, 1).is_err());
    }

    #[test]
    fn classical_average_is_reproducible() {
        let spec = GaussianFieldSpec::new(diag(&[0.7, 0.3]), 77).unwrap();
        let a = classical_average_mc(&pauli_x(), &spec, 5000).unwrap();
        let b = classical_average_mc(&pauli_x(), &spec, 5000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pauli_z_variance_matches_independent_long_run() {
        // For D = I, f = |phi_1|^2 - |phi_2|^2 is a difference of two unit
        // exponentials, so Var f = 2 and the stderr is sqrt(2/n).
        let n = 100_000;
        let spec = GaussianFieldSpec::new(identity(2), 4).unwrap();
        let est = classical_average_mc(&pauli_z(), &spec, n).unwrap();
        let expected = (2.0 / n as f64).sqrt();
        assert!((est.stderr.unwrap() / expected - 1.0).abs() < 0.05);
    }

    #[test]
    fn scaling_relation_examples() {
        let mut rng = rng_for_tests(9);
        let rho = random_density(3, 3, &mut rng);
        let r = check_scaling_relation(&identity(3), &rho, DispersionScale::default(), 100_000, 1).unwrap();
        assert_eq!(r.rhs, 1.0);
        assert!(r.pass, "{r:?}");

        // analytic identity first: E<A phi, phi> = Tr(D A) = 1
        let spec = covariance_from_state(&ket0(), DispersionScale::default(), 2);
        assert_eq!(expected_quadratic_form(&pauli_z(), &spec).unwrap(), 1.0);
        let r = check_scaling_relation(&pauli_z(), &ket0(), DispersionScale::default(), 100_000, 2).unwrap();
        assert_eq!(r.rhs, 1.0);
        assert!(r.pass, "{r:?}");
        assert!((r.lhs.estimate - 1.0).abs() < 0.05);

        // doubling sigma^2 doubles both sides (same underlying draws)
        let a = random_hermitian(3, &mut rng);
        let r1 = check_scaling_relation(&a, &rho, DispersionScale::new(1.5).unwrap(), 20_000, 5).unwrap();
        let r2 = check_scaling_relation(&a, &rho, DispersionScale::new(3.0).unwrap(), 20_000, 5).unwrap();
        assert!((r2.rhs - 2.0 * r1.rhs).abs() < 1e-12);
        assert!((r2.lhs.estimate - 2.0 * r1.lhs.estimate).abs() < 1e-10 * r1.lhs.estimate.abs().max(1.0));
    }

    #[test]
    fn mc_matches_trace_identity_on_random_pairs() {
        let mut rng = rng_for_tests(12);
        for k in 0..20u64 {
            let dim = [2, 3, 5, 8][k as usize % 4];
            let a = random_hermitian(dim, &mut rng);
            let d = random_density(dim, 1 + k as usize % dim, &mut rng).operator() * c(1.0 + k as f64 * 0.3, 0.0);
            let spec = GaussianFieldSpec::new(d, 40 + k).unwrap();
            let exact = expected_quadratic_form(&a, &spec).unwrap();
            let est = classical_average_mc(&a, &spec, 20_000).unwrap();
            assert!(est.agrees_with(exact, 4.0, 0.0), "pair {k}: {est:?} vs {exact}");
        }
    }

    /// Independent calibration of [`state_rms_error`]: average the squared
    /// residual of the empirical state over many seeds.
    #[test]
    fn state_error_calibration() {
        let mut rng = rng_for_tests(14);
        for (dim, rank) in [(2, 2), (3, 2), (4, 4)] {
            let rho = random_density(dim, rank, &mut rng);
            let n = 2000;
            let runs = 400;
            let mean_sq: f64 = (0..runs)
                .map(|seed| {
                    let spec = covariance_from_state(&rho, DispersionScale::new(2.0).unwrap(), 9000 + seed);
                    let est = empirical_state(&field::sample(&spec, n).unwrap()).unwrap();
                    frobenius_distance(est.operator(), rho.operator()).unwrap().powi(2)
                })
                .sum::<f64>()
                / runs as f64;
            let predicted = state_rms_error(&rho, n).powi(2);
            assert!(
                (mean_sq / predicted - 1.0).abs() < 0.15,
                "dim {dim}: {mean_sq} vs {predicted}"
            );
            assert!(state_rms_error(&rho, n) <= 1.0 / (n as f64).sqrt());
        }
        // pure states: every sample is proportional to psi
        let psi = PureState::new(crate::random::random_unit_vector(3, &mut rng)).unwrap();
        let rho = DensityOperator::from_pure(&psi);
        assert!(state_rms_error(&rho, 10) < 1e-7);
        let spec = covariance_from_state(&rho, DispersionScale::default(), 1);
        let est = empirical_state(&field::sample(&spec, 10).unwrap()).unwrap();
        assert!(frobenius_distance(est.operator(), rho.operator()).unwrap() < 1e-12);
    }

    #[test]
    fn state_stderr_calibration() {
        let mut rng = rng_for_tests(15);
        let rho = random_density(3, 3, &mut rng);
        let (n, runs) = (1000, 400);
        let mut sum = DMatrix::<f64>::zeros(3, 3);
        let mut sum_sq = DMatrix::<f64>::zeros(3, 3);
        let mut mean_stderr = DMatrix::<f64>::zeros(3, 3);
        for seed in 0..runs {
            let spec = covariance_from_state(&rho, DispersionScale::new(0.5).unwrap(), 40_000 + seed);
            let ens = field::sample(&spec, n).unwrap();
            let est = empirical_state(&ens).unwrap();
            let err = est.operator() - rho.operator();
            sum += err.map(|z| z.re);
            sum_sq += err.map(|z| z.norm_sqr());
            mean_stderr += empirical_state_stderr(&ens).unwrap();
        }
        let runs = runs as f64;
        for k in 0..3 {
            for l in 0..3 {
                let spread = (sum_sq[(k, l)] / runs).sqrt();
                let predicted = mean_stderr[(k, l)] / runs;
                assert!(
                    (spread / predicted - 1.0).abs() < 0.15,
                    "({k},{l}): {spread} vs {predicted}"
                );
            }
        }
        assert!((sum.sum() / runs).abs() < 0.01);
        let total = (mean_stderr.map(|v| (v / runs).powi(2)).sum()).sqrt();
        assert!((total / state_rms_error(&rho, n) - 1.0).abs() < 0.1);

        let psi = PureState::new(crate::random::random_unit_vector(2, &mut rng)).unwrap();
        let spec = covariance_from_state(&DensityOperator::from_pure(&psi), DispersionScale::default(), 3);
        let ens = field::sample(&spec, 50).unwrap();
        assert!(empirical_state_stderr(&ens).unwrap().max() < 1e-12);
        assert!(empirical_state_stderr(&field::sample(&spec, 1).unwrap()).is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn trace_scaling_and_round_trip(seed in any::<u64>(), dim in 1usize..8, sigma2 in 0.01f64..50.0) {
            let mut rng = crate::random::seeded_rng(seed);
            let rho = random_density(dim, dim, &mut rng);
            let a = random_hermitian(dim, &mut rng);
            let scale = DispersionScale::new(sigma2).unwrap();
            let spec = covariance_from_state(&rho, scale, seed);

            let tr_da = expected_quadratic_form(&a, &spec).unwrap();
            let tr_d = field::dispersion(&spec);
            let qm = quantum_average(&a, &rho).unwrap();
            prop_assert!((tr_da - tr_d * qm).abs() <= 1e-12 * tr_d.max(1.0) * qm.abs().max(1.0));
            prop_assert!((tr_d - sigma2).abs() <= 1e-10 * sigma2.max(1.0));

            let back = state_from_covariance(&spec).unwrap();
            prop_assert!(frobenius_distance(back.operator(), rho.operator()).unwrap() <= 1e-12);
        }

        #[test]
        fn quadratic_form_is_real(seed in any::<u64>(), dim in 1usize..8) {
            let mut rng = crate::random::seeded_rng(seed);
            let a = random_hermitian(dim, &mut rng);
            let phi = crate::random::standard_complex_vector(dim, &mut rng);
            let z = linalg::inner(&(&a * &phi), &phi);
            let max_a = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
            prop_assert!(z.im.abs() <= 1e-10 * phi.norm_squared() * max_a * dim as f64);
        }
    }
}
