//! Finite-dimensional prequantum classical statistical field theory.
//!
//! Quantum states are carried by covariance operators of zero-mean circular
//! complex Gaussian fields (`D = sigma^2 rho`), observables by quadratic
//! forms of the field, and quantum channels by classical linear filters
//! acting on independent copies of the field. Every Monte Carlo route is
//! paired with an exact density-operator computation to check it against.
//!
//! Modules:
//! - [`linalg`]: dense Hermitian algebra, eigendecomposition, propagators.
//! - [`field`]: sampling `N(0, D)` and ensemble estimators.
//! - [`state`]: states, dispersion and the classical/quantum averages.
//! - [`filters`]: unitary, projection, Luders and Kraus filters plus the
//!   exact channel oracle.

pub mod error;
pub mod field;
pub mod filters;
pub mod linalg;
pub mod random;
pub mod state;
pub mod stats;

pub use error::{Error, Result};
pub use field::{
    dispersion, empirical_covariance, empirical_mean, sample, sample_serial, FieldEnsemble, GaussianFieldSpec,
};
pub use filters::{
    apply_filter, channel_decomposition, kraus_channel_exact, kraus_filter_apply, luders_measurement_filter,
    projection_filter, pushforward_covariance, unitary_filter, validate_kraus, BlockFilter, ChannelDecomposition,
    KrausValidation, LinearFilter, TraceMode,
};
pub use linalg::{ComplexOperator, FieldVector, HermitianEig, C64};
pub use state::{
    check_scaling_relation, classical_average_mc, covariance_from_state, empirical_state, empirical_state_stderr,
    quadratic_form, quantum_average, state_from_covariance, DensityOperator, DispersionScale, PureState, ScalingReport,
};
pub use stats::McEstimate;
