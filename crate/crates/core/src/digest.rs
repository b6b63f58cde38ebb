use num_complex::Complex64;
use sha2::{Digest as _, Sha256};

use crate::matrix::{ComplexMatrix, ComplexVector};

/// Short content hash of the numeric inputs behind a report.
pub(crate) struct Digest(Sha256);

impl Digest {
    pub fn new() -> Self {
        Self(Sha256::new())
    }

    pub fn tag(&mut self, tag: &str) -> &mut Self {
        self.0.update((tag.len() as u64).to_le_bytes());
        self.0.update(tag.as_bytes());
        self
    }

    pub fn scalar(&mut self, z: Complex64) -> &mut Self {
        self.0.update(z.re.to_bits().to_le_bytes());
        self.0.update(z.im.to_bits().to_le_bytes());
        self
    }

    pub fn matrix(&mut self, m: &ComplexMatrix) -> &mut Self {
        self.0.update((m.nrows() as u64).to_le_bytes());
        self.0.update((m.ncols() as u64).to_le_bytes());
        for z in m.iter() {
            self.scalar(*z);
        }
        self
    }

    pub fn vector(&mut self, v: &ComplexVector) -> &mut Self {
        self.0.update((v.len() as u64).to_le_bytes());
        for z in v.iter() {
            self.scalar(*z);
        }
        self
    }

    /// First 16 hex digits of the SHA-256.
    pub fn finish(&self) -> String {
        let full = self.0.clone().finalize();
        hex::encode(&full[..8])
    }
}
