//! Zero-mean circular complex Gaussian fields `N(0, D)` on `C^d`: sampling
//! and ensemble estimators.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexOperator, FieldVector, C64};
use crate::random;
use crate::stats::McEstimate;

/// How many RMS errors a seeded statistical residual may reach before a
/// check reports failure.
pub const STATISTICAL_SIGMAS: f64 = 4.0;

/// Distribution `N(0, D)` of a prequantum field together with the seed of
/// its sampling streams.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFieldSpec {
    covariance: ComplexOperator,
    seed: u64,
}

impl GaussianFieldSpec {
    /// Validates that `covariance` is Hermitian and positive semidefinite
    /// within `1e-10` (scaled by `max(1, |D|_F)`).
    pub fn new(covariance: ComplexOperator, seed: u64) -> Result<Self> {
        if !covariance.is_square() {
            return Err(Error::InvalidCovariance(format!(
                "covariance must be square, got {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if covariance.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let tol = linalg::structural_tol(&covariance);
        let deviation = linalg::hermitian_deviation(&covariance);
        if deviation > tol {
            return Err(Error::InvalidCovariance(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let eig = linalg::eig_hermitian_unchecked(&covariance)?;
        if let Some(min) = eig.min_eigenvalue() {
            if min < -tol {
                return Err(Error::InvalidCovariance(format!(
                    "not positive semidefinite (smallest eigenvalue {min:.3e})"
                )));
            }
        }
        Ok(Self { covariance, seed })
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn covariance(&self) -> &ComplexOperator {
        &self.covariance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            covariance: self.covariance.clone(),
            seed,
        }
    }

    /// `F = Q diag(sqrt(lambda))`, so that `F z ~ N(0, D)` for a standard
    /// circular `z`. Eigenvalues at or below the numerical-rank threshold
    /// `dim * eps * lambda_max` (including clipped negatives) are set to
    /// zero, so rank-deficient covariances give fields in their exact range.
    pub(crate) fn sampling_factor(&self) -> Result<ComplexOperator> {
        let eig = linalg::eig_hermitian_unchecked(&self.covariance)?;
        let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        let cutoff = self.dim() as f64 * f64::EPSILON * top;
        let mut factor = eig.eigenvectors;
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let s = if lambda > cutoff {
                C64::new(lambda.sqrt(), 0.0)
            } else {
                linalg::ZERO
            };
            for z in factor.column_mut(k).iter_mut() {
                *z *= s;
            }
        }
        Ok(factor)
    }
}

/// `sigma^2 = E|phi|^2 = Tr D`.
pub fn dispersion(spec: &GaussianFieldSpec) -> f64 {
    let tr = linalg::trace(spec.covariance());
    debug_assert!(tr.im.abs() <= linalg::structural_tol(spec.covariance()));
    tr.re
}

/// Finite sample of field realizations together with their distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEnsemble {
    spec: GaussianFieldSpec,
    samples: Vec<FieldVector>,
}

impl FieldEnsemble {
    pub fn new(spec: GaussianFieldSpec, samples: Vec<FieldVector>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("an ensemble needs at least one sample".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != spec.dim()) {
            return Err(Error::dims(spec.dim(), bad.len()));
        }
        Ok(Self { spec, samples })
    }

    pub fn spec(&self) -> &GaussianFieldSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn samples(&self) -> &[FieldVector] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn into_samples(self) -> Vec<FieldVector> {
        self.samples
    }

    /// Samples as the columns of a `dim x count` matrix.
    pub fn as_matrix(&self) -> ComplexOperator {
        ComplexOperator::from_columns(&self.samples)
    }
}

pub(crate) fn draw_field(factor: &ComplexOperator, seed: u64, sample: u64, block: u64) -> FieldVector {
    let mut rng = random::substream(seed, sample, block);
    let z = random::standard_complex_vector(factor.ncols(), &mut rng);
    factor * z
}

/// Draws `n` independent realizations of `N(0, D)`, in parallel.
///
/// Sample `s` comes from substream `(seed, s, 0)`, so the result is identical
/// to [`sample_serial`] bit for bit.
pub fn sample(spec: &GaussianFieldSpec, n: usize) -> Result<FieldEnsemble> {
    sample_with(spec, n, true)
}

/// Single-threaded reference path for [`sample`].
pub fn sample_serial(spec: &GaussianFieldSpec, n: usize) -> Result<FieldEnsemble> {
    sample_with(spec, n, false)
}

fn sample_with(spec: &GaussianFieldSpec, n: usize, parallel: bool) -> Result<FieldEnsemble> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let factor = spec.sampling_factor()?;
    let seed = spec.seed();
    let draw = |s: usize| draw_field(&factor, seed, s as u64, 0);
    let samples: Vec<FieldVector> = if parallel {
        (0..n).into_par_iter().map(draw).collect()
    } else {
        (0..n).map(draw).collect()
    };
    Ok(FieldEnsemble {
        spec: spec.clone(),
        samples,
    })
}

pub fn empirical_mean(ens: &FieldEnsemble) -> FieldVector {
    let n = ens.count() as f64;
    let sum = ens
        .samples()
        .iter()
        .fold(DVector::zeros(ens.dim()), |acc: FieldVector, s| acc + s);
    sum.unscale(n)
}

/// `(1/n) sum phi phi*`; the mean is known to be zero and is not subtracted.
pub fn empirical_covariance(ens: &FieldEnsemble) -> ComplexOperator {
    let x = ens.as_matrix();
    let cov = &x * x.adjoint();
    cov.unscale(ens.count() as f64)
}

/// `(1/n) sum phi phi^T`, which vanishes in expectation for circular fields.
pub fn empirical_pseudo_covariance(ens: &FieldEnsemble) -> ComplexOperator {
    let x = ens.as_matrix();
    let cov = &x * x.transpose();
    cov.unscale(ens.count() as f64)
}

/// `(1/n) sum a(omega) b(omega)*` over paired realizations.
pub fn empirical_cross_covariance(a: &FieldEnsemble, b: &FieldEnsemble) -> Result<ComplexOperator> {
    if a.count() != b.count() {
        return Err(Error::dims(
            format!("{} samples", a.count()),
            format!("{} samples", b.count()),
        ));
    }
    let xa = a.as_matrix();
    let xb = b.as_matrix();
    Ok((&xa * xb.adjoint()).unscale(a.count() as f64))
}

/// Entrywise standard error of [`empirical_covariance`], estimated from the
/// spread of `phi_k conj(phi_l)` over the ensemble. `None` for one sample.
pub fn empirical_covariance_stderr(ens: &FieldEnsemble) -> Option<nalgebra::DMatrix<f64>> {
    let n = ens.count();
    if n < 2 {
        return None;
    }
    let mean = empirical_covariance(ens);
    let d = ens.dim();
    let mut ss = nalgebra::DMatrix::<f64>::zeros(d, d);
    for phi in ens.samples() {
        for k in 0..d {
            for l in 0..d {
                ss[(k, l)] += (phi[k] * phi[l].conj() - mean[(k, l)]).norm_sqr();
            }
        }
    }
    let nf = n as f64;
    Some(ss.map(|v| (v / (nf - 1.0) / nf).sqrt()))
}

/// Sample mean of `|phi|^2`, an estimate of the dispersion `Tr D`.
pub fn empirical_dispersion(ens: &FieldEnsemble) -> McEstimate {
    McEstimate::from_values(ens.samples().iter().map(|s| s.norm_squared()))
}

/// RMS Frobenius error of [`empirical_covariance`] at sample size `n`.
///
/// For a circular Gaussian, `E|phi_k conj(phi_l)|^2 = D_kk D_ll + |D_kl|^2`,
/// so `E|D_hat - D|_F^2 = (Tr D)^2 / n` exactly.
pub fn covariance_rms_error(trace: f64, n: usize) -> f64 {
    trace / (n as f64).sqrt()
}

/// Acceptance bound `C / sqrt(n)` for [`empirical_covariance`] with
/// `C = 4 Tr D`.
pub fn covariance_error_bound(trace: f64, n: usize) -> f64 {
    STATISTICAL_SIGMAS * covariance_rms_error(trace, n)
}
