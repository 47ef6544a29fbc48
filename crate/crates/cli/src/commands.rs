//! One function per subcommand; each returns a finished [`Report`] or an
//! input error.

use std::path::Path;

use pcsft_core::field::{self, covariance_error_bound, empirical_covariance_stderr, empirical_dispersion};
use pcsft_core::filters::{block_output_covariance, kraus_map, BlockFilter};
use pcsft_core::linalg::{self, frobenius_distance, frobenius_norm, ComplexOperator};
use pcsft_core::state::{
    empirical_state, empirical_state_stderr, expected_quadratic_form, normalize_covariance, state_error_bound,
    ZERO_FIELD_TRACE,
};
use pcsft_core::{
    apply_filter, channel_decomposition, check_scaling_relation, covariance_from_state, pushforward_covariance,
    quantum_average, unitary_filter, validate_kraus, DensityOperator, DispersionScale, FieldEnsemble, McEstimate,
};

use crate::error::CliError;
use crate::io::{self, Role};
use crate::report::{Check, Report};

/// Sampling parameters shared by the Monte Carlo commands.
#[derive(Debug, Clone, Copy)]
pub struct Sampling {
    pub sigma2: f64,
    pub n: usize,
    pub seed: u64,
}

impl Sampling {
    fn scale(&self) -> Result<DispersionScale, CliError> {
        DispersionScale::new(self.sigma2).map_err(|e| CliError::Usage(format!("--sigma2: {e}")))
    }

    fn require_n(&self, min: usize) -> Result<(), CliError> {
        if self.n < min {
            return Err(CliError::Usage(format!("--n must be at least {min}, got {}", self.n)));
        }
        Ok(())
    }

    fn echo(&self, report: &mut Report) {
        report.param("sigma2", self.sigma2);
        report.seed = Some(self.seed);
        report.n = Some(self.n);
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn ensure_dims(what: &str, expected: usize, found: usize) -> Result<(), CliError> {
    if expected != found {
        return Err(pcsft_core::Error::DimensionMismatch {
            expected: format!("{what} of dim {expected}"),
            found: format!("dim {found}"),
        }
        .into());
    }
    Ok(())
}

/// Statistical checks are only meaningful with more than one sample.
fn statistical(name: &str, value: f64, threshold: f64, n: usize) -> Check {
    if n < 2 {
        Check::not_applicable(name, value)
    } else {
        Check::at_most(name, value, threshold)
    }
}

/// Residual checks for an ensemble expected to be `N(0, d)` with
/// `d / Tr d = rho`, plus the estimated operators themselves.
fn ensemble_checks(report: &mut Report, ens: &FieldEnsemble, d: &ComplexOperator, rho: Option<&ComplexOperator>) {
    let n = ens.count();
    let trace = linalg::trace(d).re;

    let disp = empirical_dispersion(ens);
    report.estimate("dispersion-estimate", &disp);
    let threshold = disp.stderr.map(|s| field::STATISTICAL_SIGMAS * s);
    report.check(match threshold {
        Some(t) => Check::at_most(
            "dispersion-residual",
            (disp.estimate - trace).abs(),
            t.max(ZERO_FIELD_TRACE),
        ),
        None => Check::not_applicable("dispersion-residual", (disp.estimate - trace).abs()),
    });

    let cov = field::empirical_covariance(ens);
    let residual = frobenius_distance(&cov, d).expect("dims agree");
    report.estimated_operator("empirical-covariance", &cov, empirical_covariance_stderr(ens));
    report.check(statistical(
        "covariance-residual",
        residual,
        covariance_error_bound(trace, n),
        n,
    ));

    match (rho, empirical_state(ens)) {
        (Some(rho), Ok(est)) => {
            report.estimated_operator("empirical-state", est.operator(), empirical_state_stderr(ens));
            let residual = frobenius_distance(est.operator(), rho).expect("dims agree");
            report.check(statistical("state-residual", residual, state_error_bound(n), n));
        }
        // a vanishing field has no state
        _ => {
            report.check(Check::not_applicable("state-residual", f64::NAN));
        }
    }
}

pub fn sample(state: &Path, s: Sampling) -> Result<Report, CliError> {
    s.require_n(1)?;
    let rho = io::load_state(state)?;
    let spec = covariance_from_state(&rho, s.scale()?, s.seed);
    let ens = pcsft_core::sample(&spec, s.n)?;

    let mut r = Report::new("sample");
    r.param("state", path_str(state));
    s.echo(&mut r);
    r.exact("dispersion", field::dispersion(&spec));
    r.exact_operator("covariance", spec.covariance());

    let mean = field::empirical_mean(&ens);
    let bound = field::STATISTICAL_SIGMAS * (field::dispersion(&spec) / s.n as f64).sqrt();
    r.check(statistical("mean-residual", mean.norm(), bound, s.n));
    ensemble_checks(&mut r, &ens, spec.covariance(), Some(rho.operator()));
    Ok(r.finish())
}

pub fn average(state: &Path, observable: &Path, s: Sampling) -> Result<Report, CliError> {
    s.require_n(2)?;
    let rho = io::load_state(state)?;
    let a = io::load_hermitian(observable, Role::Observable)?;
    ensure_dims("observable", rho.dim(), a.nrows())?;
    let scale = s.scale()?;

    let mut r = Report::new("average");
    r.param("state", path_str(state))
        .param("observable", path_str(observable));
    s.echo(&mut r);

    let spec = covariance_from_state(&rho, scale, s.seed);
    let qm = quantum_average(&a, &rho)?;
    let tr_da = expected_quadratic_form(&a, &spec)?;
    let report = check_scaling_relation(&a, &rho, scale, s.n, s.seed)?;

    r.exact("dispersion", field::dispersion(&spec));
    r.exact("quantum-average", qm);
    r.exact("field-average", tr_da);
    r.estimate("classical-average", &report.lhs);
    r.exact("scaled-quantum-average", report.rhs);
    r.estimate(
        "difference",
        &McEstimate {
            estimate: report.difference,
            ..report.lhs
        },
    );
    r.check(Check::at_most(
        "scaling-relation",
        report.difference.abs(),
        report.threshold,
    ));
    let identity_gap = (tr_da - field::dispersion(&spec) * qm).abs();
    r.check(Check::at_most(
        "trace-identity",
        identity_gap,
        1e-12 * report.rhs.abs().max(1.0),
    ));
    Ok(r.finish())
}

pub struct Evolution {
    pub t: f64,
    pub hbar: f64,
    pub tol: f64,
}

pub fn evolve(state: &Path, hamiltonian: &Path, ev: Evolution, s: Sampling) -> Result<Report, CliError> {
    s.require_n(1)?;
    let rho = io::load_state(state)?;
    let h = io::load_hermitian(hamiltonian, Role::Hamiltonian)?;
    ensure_dims("hamiltonian", rho.dim(), h.nrows())?;
    let v = unitary_filter(&h, ev.t, ev.hbar)?;
    let spec = covariance_from_state(&rho, s.scale()?, s.seed);

    let mut r = Report::new("evolve");
    r.param("state", path_str(state))
        .param("hamiltonian", path_str(hamiltonian))
        .param("t", ev.t)
        .param("hbar", ev.hbar)
        .param("tol", ev.tol);
    s.echo(&mut r);

    let u = v.operator();
    let unitarity = frobenius_norm(&(u.adjoint() * u - linalg::identity(u.nrows())));
    r.check(Check::at_most("unitarity", unitarity, ev.tol));

    let rho_t = pushforward_covariance(&v, rho.operator())?;
    let d_out = pushforward_covariance(&v, spec.covariance())?;
    r.exact_operator("propagator", u);
    r.exact_operator("evolved-state", &rho_t);
    r.exact("state-change", frobenius_distance(&rho_t, rho.operator())?);
    let (tr_in, tr_out) = (field::dispersion(&spec), linalg::trace(&d_out).re);
    r.exact("dispersion-in", tr_in);
    r.exact("dispersion-out", tr_out);
    r.check(Check::at_most(
        "dispersion-conservation",
        (tr_out - tr_in).abs(),
        ev.tol * tr_in.max(1.0),
    ));

    let ens = pcsft_core::sample(&spec, s.n)?;
    let out = apply_filter(&v, &ens)?;
    let worst = ens
        .samples()
        .iter()
        .zip(out.samples())
        .map(|(a, b)| (b.norm() - a.norm()).abs() / a.norm().max(1.0))
        .fold(0.0, f64::max);
    r.check(Check::at_most("norm-deviation", worst, 1e-12));
    ensemble_checks(&mut r, &out, &d_out, Some(&rho_t));
    Ok(r.finish())
}

pub struct ChannelOptions {
    pub tol: f64,
    pub exact_only: bool,
    pub unchecked: bool,
}

fn validation_checks(r: &mut Report, ch: &BlockFilter, tol: f64, enforce: bool) {
    let v = validate_kraus(ch, tol);
    let residual = v.residual.unwrap_or(f64::INFINITY);
    r.exact("trace-residual", residual);
    r.exact("povm-residual", v.povm_residual);
    r.check(if enforce {
        Check::at_most("trace-preservation", residual, tol)
    } else {
        Check::not_applicable("trace-preservation", residual)
    });
}

pub fn channel(state: &Path, channel: &Path, opts: ChannelOptions, s: Sampling) -> Result<Report, CliError> {
    s.require_n(1)?;
    let rho = io::load_state(state)?;
    let blocks = io::load_channel(channel)?;
    ensure_dims("channel", rho.dim(), blocks[0].nrows())?;
    let ch = if opts.unchecked {
        BlockFilter::unchecked(blocks)?
    } else {
        BlockFilter::with_tolerance(blocks, opts.tol)?
    };

    let mut r = Report::new("channel");
    r.param("state", path_str(state))
        .param("channel", path_str(channel))
        .param("tol", opts.tol)
        .param("exact-only", opts.exact_only)
        .param("unchecked", opts.unchecked)
        .param("blocks", ch.len());
    s.echo(&mut r);
    validation_checks(&mut r, &ch, opts.tol, !opts.unchecked);

    // exact route: the Kraus map on rho
    let oracle = kraus_map(&ch, rho.operator())?;
    let oracle_trace = linalg::trace(&oracle).re;
    r.exact_operator("oracle-output", &oracle);
    r.exact("output-trace", oracle_trace);

    // filter route: covariance of sum V_i phi_i over independent copies
    let spec = covariance_from_state(&rho, s.scale()?, s.seed);
    let d_out = block_output_covariance(&ch, spec.covariance())?;
    let (tr_in, tr_out) = (field::dispersion(&spec), linalg::trace(&d_out).re);
    r.exact_operator("output-covariance", &d_out);
    r.exact("dispersion-in", tr_in);
    r.exact("dispersion-out", tr_out);
    if !opts.unchecked {
        r.check(Check::at_most(
            "dispersion-conservation",
            (tr_out - tr_in).abs(),
            opts.tol * tr_in.max(1.0),
        ));
    }

    let oracle_state = (oracle_trace > ZERO_FIELD_TRACE)
        .then(|| normalize_covariance(&oracle))
        .transpose()?;
    match (&oracle_state, normalize_covariance(&d_out)) {
        (Some(o), Ok(f)) => {
            let gap = frobenius_distance(o.operator(), f.operator())?;
            r.check(Check::at_most("filter-oracle-equivalence", gap, opts.tol));
        }
        _ => {
            r.check(Check::not_applicable("filter-oracle-equivalence", f64::NAN));
        }
    }

    let dec = channel_decomposition(&ch, &rho)?;
    for (i, (p, state)) in dec.weights.iter().zip(&dec.conditional_states).enumerate() {
        r.exact(&format!("weight[{i}]"), *p);
        if let Some(state) = state {
            r.exact_operator(&format!("conditional-state[{i}]"), state.operator());
        }
    }
    r.exact("degenerate-branches", dec.degenerate_branches().len() as f64);
    if !opts.unchecked {
        r.check(Check::at_most("weight-sum", (dec.total_weight() - 1.0).abs(), opts.tol));
    }
    let rebuilt = frobenius_distance(&dec.reconstruct(ch.out_dim()), &oracle)?;
    r.check(Check::at_most("decomposition-reconstruction", rebuilt, opts.tol));

    if !opts.exact_only {
        let ens = pcsft_core::kraus_filter_apply(&ch, &spec, s.n)?;
        ensemble_checks(
            &mut r,
            &ens,
            &d_out,
            oracle_state.as_ref().map(DensityOperator::operator),
        );
    }
    Ok(r.finish())
}

pub fn validate(channel: &Path, tol: f64) -> Result<Report, CliError> {
    let blocks = io::load_channel(channel)?;
    let ch = BlockFilter::unchecked(blocks)?;
    let mut r = Report::new("validate");
    r.param("channel", path_str(channel))
        .param("tol", tol)
        .param("blocks", ch.len());
    validation_checks(&mut r, &ch, tol, true);
    Ok(r.finish())
}
