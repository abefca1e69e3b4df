//! Exact scattering solutions of density-matrix flows, built two ways and
//! cross-checked: closed forms for a three-level oscillator block, and an
//! independent numerical route through a rank-1 dressing transformation of
//! an auxiliary linear (Lax) system.
//!
//! Modules:
//! - [`matrix`]: dense complex matrices/vectors sized for small truncated
//!   number bases, plus brackets and density-matrix checks.
//! - [`hamiltonian`]: number-operator Hamiltonians with a designated
//!   equally spaced three-level block.
//! - [`eig`]: deterministic Jacobi eigensolver for Hermitian matrices.
//! - [`dynamics`]: RK4 integration of the matrix and vector flows,
//!   residual checks, rescaling and disjoint-support combination.
//! - [`darboux`]: projector, dressing/annihilation operators, partner
//!   Hamiltonians and the reconstruction pipeline.
//! - [`scenario`]: all closed forms of the worked example.
//! - [`observables`]: position expectation and position-space densities.
//! - [`verify`]: the release-gating numerical checks.

pub mod darboux;
pub mod dynamics;
pub mod eig;
pub mod error;
pub mod hamiltonian;
pub mod matrix;
pub mod observables;
pub mod scenario;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, ComplexVector};
pub use scenario::ScenarioParams;
