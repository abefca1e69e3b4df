//! Centralized numerical tolerances.
//!
//! Every threshold used by the library lives here so that no module
//! carries its own ad-hoc magic numbers.

/// Maximum deviation from `U U† = 1` accepted before a matrix is
/// rejected as non-unitary.
pub const UNITARY_TOL: f64 = 1e-12;

/// Maximum relative deviation from `A = A†` accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Residual bound for the eigensolver: `‖A v − λ v‖ < EIG_RESIDUAL_TOL · ‖A‖`.
pub const EIG_RESIDUAL_TOL: f64 = 1e-10;

/// Off-diagonal Frobenius mass (relative to `‖A‖_F`) at which Jacobi
/// sweeps stop.
pub const JACOBI_OFF_TOL: f64 = 1e-14;

/// Maximum number of cyclic Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 60;

/// Imaginary part allowed on quantities that must be real
/// (traces of Hermitian products and the like).
pub const REAL_TOL: f64 = 1e-12;

/// Idempotency / Hermiticity bound for rank-1 projectors.
pub const PROJECTOR_TOL: f64 = 1e-12;

/// Norm below which a vector is treated as zero and rejected where a
/// direction is required.
pub const ZERO_VECTOR_TOL: f64 = 1e-14;

/// Pairwise-product bound used when checking disjoint supports.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Per-step Hermiticity re-symmetrization drift considered healthy.
pub const SYMMETRIZATION_HEALTH: f64 = 1e-12;

/// Negative position-density values larger than this are clamped to zero;
/// anything more negative is a genuine positivity violation.
pub const DENSITY_CLAMP_TOL: f64 = 1e-10;
