//! Quantum operations realized as classical linear filters on Gaussian
//! fields.
//!
//! A single filter `phi_out = V phi_in` maps `N(0, D)` to `N(0, V D V*)`.
//! A block filter feeds `k` independent copies `phi_1, ..., phi_k` of the
//! input field through `V_1, ..., V_k` and sums the results; independence
//! makes the branch covariances add, so the output covariance is the Kraus
//! map `sum_i V_i D V_i*`. For `sum_i V_i* V_i = I` the dispersion is kept
//! and `D_out / Tr D_out` is the channel output state, whatever `sigma^2`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{self, FieldEnsemble, GaussianFieldSpec};
use crate::linalg::{self, ComplexOperator, FieldVector, C64, STRUCTURAL_TOL};
use crate::random::MAX_BLOCKS;
use crate::state::DensityOperator;

/// Default Frobenius tolerance on `sum_i V_i* V_i - I`.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// Branch weights below this have no conditional state.
pub const DEGENERATE_BRANCH_WEIGHT: f64 = 1e-12;

fn hermitize(m: ComplexOperator) -> ComplexOperator {
    (&m + m.adjoint()).unscale(2.0)
}

/// `phi_out = V phi_in` for `V : C^in_dim -> C^out_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFilter(ComplexOperator);

impl LinearFilter {
    pub fn new(operator: ComplexOperator) -> Self {
        Self(operator)
    }

    pub fn operator(&self) -> &ComplexOperator {
        &self.0
    }

    pub fn in_dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Applies `V` to every realization. The output carries the pushed-forward
/// covariance `V D V*` and the input's seed.
pub fn apply_filter(v: &LinearFilter, ens: &FieldEnsemble) -> Result<FieldEnsemble> {
    if v.in_dim() != ens.dim() {
        return Err(Error::dims(
            format!("filter input dim {}", v.in_dim()),
            format!("field dim {}", ens.dim()),
        ));
    }
    let d_out = hermitize(v.operator() * ens.spec().covariance() * v.operator().adjoint());
    let spec = GaussianFieldSpec::new(d_out, ens.spec().seed())?;
    let samples = ens.samples().par_iter().map(|phi| v.operator() * phi).collect();
    FieldEnsemble::new(spec, samples)
}

/// `D_out = V D V*`.
pub fn pushforward_covariance(v: &LinearFilter, d: &ComplexOperator) -> Result<ComplexOperator> {
    if !d.is_square() || v.in_dim() != d.nrows() {
        return Err(Error::dims(
            format!("{}x{} covariance", v.in_dim(), v.in_dim()),
            format!("{}x{}", d.nrows(), d.ncols()),
        ));
    }
    // validation only; the spec is discarded
    GaussianFieldSpec::new(d.clone(), 0)?;
    Ok(hermitize(v.operator() * d * v.operator().adjoint()))
}

/// Schrodinger evolution over time `t` as the filter `U_t = exp(-i t H / hbar)`.
pub fn unitary_filter(h: &ComplexOperator, t: f64, hbar: f64) -> Result<LinearFilter> {
    Ok(LinearFilter(linalg::unitary_from_hamiltonian(h, t, hbar)?))
}

fn check_projector(p: &ComplexOperator, index: usize) -> Result<()> {
    if !p.is_square() {
        return Err(Error::NotProjector {
            index,
            reason: format!("shape {}x{} is not square", p.nrows(), p.ncols()),
        });
    }
    let tol = linalg::structural_tol(p);
    let deviation = linalg::hermitian_deviation(p);
    if deviation > tol {
        return Err(Error::NotProjector {
            index,
            reason: format!("not Hermitian (deviation {deviation:.3e})"),
        });
    }
    let idempotency = linalg::frobenius_distance(&(p * p), p)?;
    if idempotency > tol {
        return Err(Error::NotProjector {
            index,
            reason: format!("|P^2 - P|_F = {idempotency:.3e}"),
        });
    }
    Ok(())
}

/// Filtering on the range of an orthogonal projector. Not trace
/// preserving: `Tr(P D P) <= Tr D`.
pub fn projection_filter(p: &ComplexOperator) -> Result<LinearFilter> {
    check_projector(p, 0)?;
    Ok(LinearFilter(p.clone()))
}

/// Whether a block filter was checked to satisfy `sum_i V_i* V_i = I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Validated,
    /// Sub-normalized or otherwise unverified filters, e.g. a bare projector.
    Unchecked,
}

/// Ordered blocks `(V_1, ..., V_k)` acting on `k` independent field copies:
/// `phi_out = sum_i V_i phi_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFilter {
    blocks: Vec<ComplexOperator>,
    mode: TraceMode,
}

impl BlockFilter {
    /// Trace-preserving block filter, checked at [`TRACE_PRESERVATION_TOL`].
    pub fn new(blocks: Vec<ComplexOperator>) -> Result<Self> {
        Self::with_tolerance(blocks, TRACE_PRESERVATION_TOL)
    }

    pub fn with_tolerance(blocks: Vec<ComplexOperator>, tol: f64) -> Result<Self> {
        let mut filter = Self::unchecked(blocks)?;
        let report = validate_kraus(&filter, tol);
        if !report.trace_preserving {
            return Err(Error::NotTracePreserving {
                residual: report.residual.unwrap_or(f64::INFINITY),
                tol,
            });
        }
        filter.mode = TraceMode::Validated;
        Ok(filter)
    }

    /// Only shapes are checked: at least one block, all blocks share
    /// `out_dim`.
    pub fn unchecked(blocks: Vec<ComplexOperator>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidArgument("a block filter needs at least one block".into()))?;
        if blocks.len() > MAX_BLOCKS {
            return Err(Error::InvalidArgument(format!(
                "at most {MAX_BLOCKS} blocks are supported"
            )));
        }
        let out_dim = first.nrows();
        if let Some(bad) = blocks.iter().find(|b| b.nrows() != out_dim) {
            return Err(Error::dims(
                format!("{out_dim} output rows"),
                format!("{} output rows", bad.nrows()),
            ));
        }
        Ok(Self {
            blocks,
            mode: TraceMode::Unchecked,
        })
    }

    pub fn blocks(&self) -> &[ComplexOperator] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn mode(&self) -> TraceMode {
        self.mode
    }

    pub fn out_dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn in_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.ncols()).collect()
    }

    /// Input dimension shared by all blocks, if any.
    pub fn common_in_dim(&self) -> Option<usize> {
        let d = self.blocks[0].ncols();
        self.blocks.iter().all(|b| b.ncols() == d).then_some(d)
    }

    /// The single map `V(x_1, ..., x_k) = sum_i V_i x_i` on the product
    /// space, as one `out_dim x sum(in_dims)` matrix.
    pub fn stacked(&self) -> LinearFilter {
        let total: usize = self.blocks.iter().map(|b| b.ncols()).sum();
        let mut out = ComplexOperator::zeros(self.out_dim(), total);
        let mut offset = 0;
        for b in &self.blocks {
            out.view_mut((0, offset), b.shape()).copy_from(b);
            offset += b.ncols();
        }
        LinearFilter(out)
    }

    fn require_input_dim(&self, dim: usize) -> Result<()> {
        if let Some(bad) = self.blocks.iter().find(|b| b.ncols() != dim) {
            return Err(Error::dims(
                format!("block input dim {dim}"),
                format!("{}", bad.ncols()),
            ));
        }
        Ok(())
    }
}

/// Covariance of the product-space field `(phi_1, ..., phi_k)` with
/// independent components `phi_i ~ N(0, D_i)`: `diag(D_1, ..., D_k)`.
pub fn block_input_covariance(inputs: &[&ComplexOperator]) -> ComplexOperator {
    let total: usize = inputs.iter().map(|d| d.nrows()).sum();
    let mut out = ComplexOperator::zeros(total, total);
    let mut offset = 0;
    for d in inputs {
        let n = d.nrows();
        out.view_mut((offset, offset), (n, n)).copy_from(d);
        offset += n;
    }
    out
}

/// Output covariance of a block filter fed `k` independent copies of
/// `N(0, D)`, computed as the pushforward of `diag(D, ..., D)` through the
/// stacked map.
pub fn block_output_covariance(ch: &BlockFilter, d: &ComplexOperator) -> Result<ComplexOperator> {
    ch.require_input_dim(d.nrows())?;
    let inputs = vec![d; ch.len()];
    pushforward_covariance(&ch.stacked(), &block_input_covariance(&inputs))
}

/// Projective (Luders) measurement: blocks `P_1, ..., P_k` on independent
/// field copies, giving `D_out = sum_i P_i D P_i`.
pub fn luders_measurement_filter(projectors: &[ComplexOperator]) -> Result<BlockFilter> {
    let first = projectors
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one projector is required".into()))?;
    let dim = first.nrows();
    for (i, p) in projectors.iter().enumerate() {
        check_projector(p, i)?;
        if p.nrows() != dim {
            return Err(Error::dims(
                format!("{dim}x{dim}"),
                format!("{}x{} (projector {i})", p.nrows(), p.ncols()),
            ));
        }
    }
    let tol = STRUCTURAL_TOL * (dim as f64).sqrt().max(1.0);
    for i in 0..projectors.len() {
        for j in (i + 1)..projectors.len() {
            let overlap = linalg::frobenius_norm(&(&projectors[i] * &projectors[j]));
            if overlap > tol {
                return Err(Error::NotOrthogonal {
                    first: i,
                    second: j,
                    overlap,
                });
            }
        }
    }
    let sum = projectors.iter().fold(linalg::zero(dim), |acc, p| acc + p);
    let residual = linalg::frobenius_distance(&sum, &linalg::identity(dim))?;
    if residual > tol {
        return Err(Error::Incomplete { residual });
    }
    Ok(BlockFilter {
        blocks: projectors.to_vec(),
        mode: TraceMode::Validated,
    })
}

/// Draws `n` outputs `sum_i V_i phi_i` with `phi_i ~ N(0, D)` independent
/// across blocks and samples. Block `i` of sample `s` uses substream
/// `(seed, s, i)`, so a single identity block reproduces
/// [`field::sample`] exactly.
pub fn kraus_filter_apply(ch: &BlockFilter, spec: &GaussianFieldSpec, n: usize) -> Result<FieldEnsemble> {
    ch.require_input_dim(spec.dim())?;
    let inputs = vec![spec.clone(); ch.len()];
    apply_block_filter_with(ch, &inputs, n, spec.seed(), true)
}

/// Single-threaded reference path for [`kraus_filter_apply`].
pub fn kraus_filter_apply_serial(ch: &BlockFilter, spec: &GaussianFieldSpec, n: usize) -> Result<FieldEnsemble> {
    ch.require_input_dim(spec.dim())?;
    let inputs = vec![spec.clone(); ch.len()];
    apply_block_filter_with(ch, &inputs, n, spec.seed(), false)
}

/// General block filter on `H_1 x ... x H_k` with independent inputs
/// `phi_i ~ inputs[i]`, all drawn from the streams of `seed`.
pub fn apply_block_filter(
    ch: &BlockFilter,
    inputs: &[GaussianFieldSpec],
    n: usize,
    seed: u64,
) -> Result<FieldEnsemble> {
    apply_block_filter_with(ch, inputs, n, seed, true)
}

fn apply_block_filter_with(
    ch: &BlockFilter,
    inputs: &[GaussianFieldSpec],
    n: usize,
    seed: u64,
    parallel: bool,
) -> Result<FieldEnsemble> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if inputs.len() != ch.len() {
        return Err(Error::dims(format!("{} input fields", ch.len()), inputs.len()));
    }
    for (block, input) in ch.blocks().iter().zip(inputs) {
        if block.ncols() != input.dim() {
            return Err(Error::dims(format!("block input dim {}", block.ncols()), input.dim()));
        }
    }
    // V_i F_i maps a standard normal straight to V_i phi_i
    let maps: Vec<ComplexOperator> = ch
        .blocks()
        .iter()
        .zip(inputs)
        .map(|(v, spec)| Ok(v * spec.sampling_factor()?))
        .collect::<Result<_>>()?;
    let out_dim = ch.out_dim();
    let draw = |s: usize| {
        maps.iter()
            .enumerate()
            .fold(FieldVector::zeros(out_dim), |acc, (b, m)| {
                acc + field::draw_field(m, seed, s as u64, b as u64)
            })
    };
    let samples: Vec<FieldVector> = if parallel {
        (0..n).into_par_iter().map(draw).collect()
    } else {
        (0..n).map(draw).collect()
    };

    let covs: Vec<&ComplexOperator> = inputs.iter().map(|s| s.covariance()).collect();
    let d_out = pushforward_covariance(&ch.stacked(), &block_input_covariance(&covs))?;
    FieldEnsemble::new(GaussianFieldSpec::new(d_out, seed)?, samples)
}

/// The individual branches `V_i phi_i` that [`kraus_filter_apply`] sums,
/// drawn from the same substreams.
pub fn branch_ensembles(ch: &BlockFilter, spec: &GaussianFieldSpec, n: usize) -> Result<Vec<FieldEnsemble>> {
    ch.require_input_dim(spec.dim())?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let factor = spec.sampling_factor()?;
    let seed = spec.seed();
    ch.blocks()
        .iter()
        .enumerate()
        .map(|(b, v)| {
            let map = v * &factor;
            let samples = (0..n)
                .into_par_iter()
                .map(|s| field::draw_field(&map, seed, s as u64, b as u64))
                .collect();
            let d_b = hermitize(v * spec.covariance() * v.adjoint());
            FieldEnsemble::new(GaussianFieldSpec::new(d_b, seed)?, samples)
        })
        .collect()
}

/// Completely positive map `X -> sum_i V_i X V_i*`.
pub fn kraus_map(ch: &BlockFilter, x: &ComplexOperator) -> Result<ComplexOperator> {
    if !x.is_square() {
        return Err(Error::dims("square operator", format!("{}x{}", x.nrows(), x.ncols())));
    }
    ch.require_input_dim(x.nrows())?;
    let sum = ch
        .blocks()
        .iter()
        .fold(linalg::zero(ch.out_dim()), |acc, v| acc + v * x * v.adjoint());
    Ok(hermitize(sum))
}

/// Exact channel output `sum_i V_i rho V_i*` for a trace-preserving block
/// filter. Unchecked filters are validated here first.
pub fn kraus_channel_exact(ch: &BlockFilter, rho: &DensityOperator) -> Result<DensityOperator> {
    if ch.mode() == TraceMode::Unchecked {
        let report = validate_kraus(ch, TRACE_PRESERVATION_TOL);
        if !report.trace_preserving {
            return Err(Error::NotTracePreserving {
                residual: report.residual.unwrap_or(f64::INFINITY),
                tol: TRACE_PRESERVATION_TOL,
            });
        }
    }
    DensityOperator::new(kraus_map(ch, rho.operator())?)
}

/// Born weights `p_i = Tr(V_i rho V_i*)` and the conditional states
/// `V_i rho V_i* / p_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDecomposition {
    pub weights: Vec<f64>,
    /// `None` where `p_i <` [`DEGENERATE_BRANCH_WEIGHT`].
    pub conditional_states: Vec<Option<DensityOperator>>,
}

impl ChannelDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn degenerate_branches(&self) -> Vec<usize> {
        self.conditional_states
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.is_none().then_some(i))
            .collect()
    }

    /// `sum_i p_i rho_i` over the non-degenerate branches.
    pub fn reconstruct(&self, dim: usize) -> ComplexOperator {
        self.weights
            .iter()
            .zip(&self.conditional_states)
            .filter_map(|(p, s)| s.as_ref().map(|s| s.operator() * C64::new(*p, 0.0)))
            .fold(linalg::zero(dim), |acc, m| acc + m)
    }
}

pub fn channel_decomposition(ch: &BlockFilter, rho: &DensityOperator) -> Result<ChannelDecomposition> {
    ch.require_input_dim(rho.dim())?;
    let mut weights = Vec::with_capacity(ch.len());
    let mut conditional_states = Vec::with_capacity(ch.len());
    for v in ch.blocks() {
        let branch = hermitize(v * rho.operator() * v.adjoint());
        let p = linalg::trace(&branch).re.max(0.0);
        weights.push(p);
        if p < DEGENERATE_BRANCH_WEIGHT {
            conditional_states.push(None);
        } else {
            conditional_states.push(Some(DensityOperator::new(branch.unscale(p))?));
        }
    }
    Ok(ChannelDecomposition {
        weights,
        conditional_states,
    })
}

/// Outcome of checking a Kraus set against both completeness conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausValidation {
    /// `|sum_i V_i* V_i - I|_F <= tol`.
    pub trace_preserving: bool,
    /// `|sum_i V_i* V_i - I|_F`; `None` when block input dims differ.
    pub residual: Option<f64>,
    /// `|sum_i V_i V_i* - I|_F`, the literal POVM form `Q_i = V_i V_i*`.
    pub povm_residual: f64,
    /// Every `V_i* V_i` is positive semidefinite.
    pub blocks_psd: bool,
    pub tol: f64,
}

pub fn validate_kraus(ch: &BlockFilter, tol: f64) -> KrausValidation {
    let out_dim = ch.out_dim();
    let gram: Vec<ComplexOperator> = ch.blocks().iter().map(|v| hermitize(v.adjoint() * v)).collect();
    let residual = ch.common_in_dim().map(|d| {
        let sum = gram.iter().fold(linalg::zero(d), |acc, g| acc + g);
        linalg::frobenius_norm(&(sum - linalg::identity(d)))
    });
    let povm_sum = ch
        .blocks()
        .iter()
        .fold(linalg::zero(out_dim), |acc, v| acc + v * v.adjoint());
    let povm_residual = linalg::frobenius_norm(&(povm_sum - linalg::identity(out_dim)));
    let blocks_psd = gram
        .iter()
        .all(|g| linalg::is_psd(g, linalg::structural_tol(g)).unwrap_or(false));
    KrausValidation {
        trace_preserving: residual.is_some_and(|r| r <= tol),
        residual,
        povm_residual,
        blocks_psd,
        tol,
    }
}

/// Standard channels as block filters.
pub mod channels {
    use super::*;

    pub fn identity_channel(dim: usize) -> BlockFilter {
        BlockFilter {
            blocks: vec![linalg::identity(dim)],
            mode: TraceMode::Validated,
        }
    }

    /// Qubit depolarizing channel with Kraus set
    /// `{sqrt(1 - 3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}`, which
    /// acts as `rho -> (1 - p) rho + p I/2`.
    pub fn depolarizing(p: f64) -> Result<BlockFilter> {
        if !(0.0..=4.0 / 3.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "depolarizing parameter {p} outside [0, 4/3]"
            )));
        }
        let a = C64::new((1.0 - 0.75 * p).sqrt(), 0.0);
        let b = C64::new((p / 4.0).sqrt(), 0.0);
        BlockFilter::new(vec![
            linalg::identity(2) * a,
            linalg::pauli_x() * b,
            linalg::pauli_y() * b,
            linalg::pauli_z() * b,
        ])
    }

    /// Complete dephasing in the computational basis: Luders measurement
    /// with projectors `|k><k|`.
    pub fn dephasing(dim: usize) -> BlockFilter {
        let projectors: Vec<_> = (0..dim)
            .map(|k| {
                let mut p = linalg::zero(dim);
                p[(k, k)] = linalg::ONE;
                p
            })
            .collect();
        luders_measurement_filter(&projectors).expect("basis projectors are complete")
    }
}
