use serde::{Deserialize, Serialize};

/// Hermiticity check: ‖H − H†‖_F ≤ HERMITICITY_TOL · max(1, ‖H‖_F).
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Unit-norm and unit-trace checks.
pub const NORM_TOL: f64 = 1e-10;
/// Relative eigenvalue floor below which a PSD spectrum is treated as zero.
pub const PSD_TOL: f64 = 1e-10;
/// Allowed imaginary residue of quantities that are real in exact arithmetic.
pub const IMAG_TOL: f64 = 1e-10;
/// Unitarity and reconstruction checks of factorizations.
pub const RECON_TOL: f64 = 1e-12;
/// Orthonormality of caller-supplied columns.
pub const ORTHO_TOL: f64 = 1e-10;
/// Relative gap a constructed pair must reach to count as saturating.
pub const CONSTRUCTION_TOL: f64 = 1e-8;

/// Mixed absolute/relative tolerance; at scale `s` it allows `absolute + relative·s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Tolerance {
    pub const fn new(absolute: f64, relative: f64) -> Self {
        Self { absolute, relative }
    }

    pub fn effective(&self, scale: f64) -> f64 {
        self.absolute + self.relative * scale
    }

    pub fn is_valid(&self) -> bool {
        self.absolute.is_finite()
            && self.relative.is_finite()
            && self.absolute >= 0.0
            && self.relative >= 0.0
    }

    /// Same tolerance widened by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.absolute * factor, self.relative * factor)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-9)
    }
}
