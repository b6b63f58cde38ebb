//! Uncertainty relations for finite-dimensional quantum systems.
//!
//! The crate evaluates the Robertson, Schrödinger and Maccone–Pati lower
//! bounds for a pair of Hermitian observables, decides whether a bound is
//! attained from an exact algebraic characterization, and constructs
//! orthonormal state pairs that attain the Maccone–Pati bounds.
//!
//! Module map:
//!
//! - [`matrix`]: dense complex primitives (Hermitian eigensystems, PSD powers,
//!   unitary completion, dependence tests).
//! - [`state`]: observables, pure and mixed states, expectations, deviations
//!   and the 2×2 Gram pair behind the product bounds.
//! - [`relations`]: every inequality as an auditable [`relations::BoundReport`].
//! - [`saturation`]: equality certificates and saturating-pair constructors.
//! - [`sampling`]: seeded random observables, states and unitaries.
//! - [`report`]: the verify/reproduce/saturate drivers used by the CLI.

pub mod error;
pub mod golden;
pub mod io;
pub mod matrix;
pub mod relations;
pub mod report;
pub mod sampling;
pub mod saturation;
pub mod state;
pub mod tolerance;

mod digest;
mod exec;

pub use error::{Error, Result};
pub use exec::Execution;
pub use matrix::{ComplexMatrix, ComplexVector, EigenSystem, HermitianMatrix};
pub use state::{DensityMatrix, Observable, PureState, QuantumState};
pub use tolerance::Tolerance;

pub use num_complex::Complex64;
