use thiserror::Error;

use crate::relations::BoundKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square with at least one row, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("NonHermitianInput: ‖H − H†‖_F = {deviation:.3e}")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("state vector norm {norm} differs from 1")]
    NotNormalized { norm: f64 },

    #[error("density matrix trace {trace} differs from 1")]
    InvalidTrace { trace: f64 },

    #[error("columns are not orthonormal (Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("states are not orthogonal (|⟨φ|ψ⟩| = {overlap:.3e})")]
    NotOrthogonal { overlap: f64 },

    #[error("μ must have unit modulus, got |μ| = {modulus}")]
    InvalidMu { modulus: f64 },

    #[error("expectation has imaginary part {imag:.3e} beyond tolerance")]
    NonRealExpectation { imag: f64 },

    #[error("{bound} bound violated: slack {slack:.3e} below −{threshold:.3e}")]
    BoundViolation {
        bound: BoundKind,
        slack: f64,
        threshold: f64,
    },

    #[error("standard deviation of {observable} is {deviation:.3e}, at or below tolerance")]
    ZeroDeviation {
        observable: &'static str,
        deviation: f64,
    },

    #[error("{bound} saturation checker disagrees with the bound report: {detail}")]
    InconsistentSaturation { bound: BoundKind, detail: String },

    #[error("equality condition fails at r = {r} (residual {residual:.3e}) although it holds at r = 1/2")]
    RIndependenceViolation { r: f64, residual: f64 },

    #[error("μ⟨[A,B]⟩ = {value:.3e} is negative")]
    HypothesisViolated { value: f64 },

    #[error("zero-deviation characterization disagrees: {detail}")]
    InconsistentCharacterization { detail: String },

    #[error("centered products vanish but ‖[A,B]‖_F = {commutator_norm:.3e} exceeds {bound:.3e}")]
    CorollaryViolation { commutator_norm: f64, bound: f64 },

    #[error("sampled density has rank {achieved}, requested {requested}")]
    RankUnachieved { requested: usize, achieved: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.to_string())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

impl Error {
    /// Errors that signal a broken invariant rather than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::BoundViolation { .. }
                | Error::InconsistentSaturation { .. }
                | Error::RIndependenceViolation { .. }
                | Error::InconsistentCharacterization { .. }
                | Error::CorollaryViolation { .. }
        )
    }

    /// Errors caused by unreadable, malformed or out-of-contract input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::BadShape { .. }
                | Error::NonFinite
                | Error::NonHermitianInput { .. }
                | Error::NotPositiveSemidefinite { .. }
                | Error::NotNormalized { .. }
                | Error::InvalidTrace { .. }
                | Error::InvalidConfig(_)
                | Error::Io(_)
                | Error::Parse(_)
        )
    }
}
