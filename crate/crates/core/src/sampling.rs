//! Seeded random observables, states and unitaries.
//!
//! Every generator has a `*_with(rng)` form and a `seed` convenience form.
//! Suites derive one independent ChaCha stream per trial from
//! (master seed, trial index) via [`trial_rng`], so results do not depend on
//! the order in which trials run.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::state::{DensityMatrix, Observable, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub dimension: usize,
    /// Rank of sampled density matrices.
    pub rank: usize,
    pub seed: u64,
    /// Number of trials.
    pub count: usize,
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if self.rank == 0 || self.rank > self.dimension {
            return Err(Error::InvalidConfig(format!(
                "rank {} must lie in 1..={}",
                self.rank, self.dimension
            )));
        }
        if self.count == 0 {
            return Err(Error::InvalidConfig(
                "trial count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Independent stream `trial` of the generator seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// rows×cols matrix of i.i.d. standard complex normal entries.
pub fn ginibre_with<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// (G + G†)/2 for a complex Ginibre G; Hermitian exactly.
pub fn random_hermitian_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Observable {
    let g = ginibre_with(n, n, rng);
    Observable::from_hermitian(HermitianMatrix::symmetrized(&g), "random")
}

pub fn random_hermitian(n: usize, seed: u64) -> Observable {
    random_hermitian_with(n, &mut trial_rng(seed, 0))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal of R
/// rotated onto the positive reals.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let z = ginibre_with(n, n, rng);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 {
            d / norm
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(n: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_with(n, &mut trial_rng(seed, 0))
}

/// First column of a Haar unitary.
pub fn random_pure_state_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let u = haar_unitary_with(n, rng);
    PureState::normalized(u.column(0).into_owned()).expect("Haar column has unit norm")
}

pub fn random_pure_state(n: usize, seed: u64) -> PureState {
    random_pure_state_with(n, &mut trial_rng(seed, 0))
}

/// First two columns of a Haar unitary; needs n ≥ 2.
pub fn random_orthonormal_pair_with<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(PureState, PureState)> {
    if n < 2 {
        return Err(Error::InvalidConfig(
            "an orthonormal pair needs n ≥ 2".into(),
        ));
    }
    let u = haar_unitary_with(n, rng);
    let psi = PureState::normalized(u.column(0).into_owned())?;
    let phi = PureState::normalized(u.column(1).into_owned())?;
    Ok((psi, phi))
}

/// GG†/tr(GG†) for an n×rank Ginibre G, resampled once if the numerical rank
/// comes out short.
pub fn random_density_with<R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > n {
        return Err(Error::InvalidConfig(format!(
            "rank {rank} must lie in 1..={n}"
        )));
    }
    let mut achieved = 0;
    for _ in 0..2 {
        let g = ginibre_with(n, rank, rng);
        let m = &g * g.adjoint();
        let trace = m.trace().re;
        let rho = DensityMatrix::from_hermitian(HermitianMatrix::symmetrized(&m.unscale(trace)))?;
        achieved = rho.rank();
        if achieved == rank {
            return Ok(rho);
        }
    }
    Err(Error::RankUnachieved {
        requested: rank,
        achieved,
    })
}

pub fn random_density(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(n, rank, &mut trial_rng(seed, 0))
}

/// A = U(αI_k ⊕ A₁)U†, B = U(βI_k ⊕ B₁)U†, ρ = U(D ⊕ 0)U† with D a full-rank
/// k×k density and U Haar. Both Ãρ and B̃ρ vanish, so Δ(A) = Δ(B) = 0.
pub fn block_scalar_with<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<(Observable, Observable, DensityMatrix)> {
    if k == 0 || k >= n {
        return Err(Error::InvalidConfig(format!(
            "block size {k} must lie in 1..{n}"
        )));
    }
    let u = haar_unitary_with(n, rng);
    let block = |rng: &mut R| {
        let scalar: f64 = rng.sample(StandardNormal);
        let tail = random_hermitian_with(n - k, rng);
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 0..k {
            m[(j, j)] = Complex64::from(scalar);
        }
        m.view_mut((k, k), (n - k, n - k))
            .copy_from(tail.matrix().as_matrix());
        HermitianMatrix::symmetrized(&m).conjugated_by(&u)
    };
    let a = Observable::from_hermitian(block(rng), "block_scalar_a");
    let b = Observable::from_hermitian(block(rng), "block_scalar_b");
    let d = random_density_with(k, k, rng)?;
    let mut m = ComplexMatrix::zeros(n, n);
    m.view_mut((0, 0), (k, k)).copy_from(d.matrix().as_matrix());
    let rho = DensityMatrix::from_hermitian(HermitianMatrix::symmetrized(&m).conjugated_by(&u))?;
    Ok((a, b, rho))
}

/// (cos(θ/2), e^{iφ} sin(θ/2)).
pub fn bloch_state(theta: f64, phi: f64) -> PureState {
    let v = DVector::from_vec(vec![
        Complex64::from((theta / 2.0).cos()),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]);
    PureState::normalized(v).expect("Bloch vector is a unit vector")
}

/// (sin(θ/2), −e^{iφ} cos(θ/2)), orthogonal to `bloch_state(θ, φ)`.
pub fn bloch_partner(theta: f64, phi: f64) -> PureState {
    let v = DVector::from_vec(vec![
        Complex64::from((theta / 2.0).sin()),
        -Complex64::from_polar((theta / 2.0).cos(), phi),
    ]);
    PureState::normalized(v).expect("Bloch partner is a unit vector")
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    use super::*;
    use crate::matrix::hermitian_eig;

    #[test]
    fn one_dimensional_samples() {
        let h = random_hermitian(1, 4);
        assert_eq!(h.matrix().as_matrix()[(0, 0)].im, 0.0);
        let u = haar_unitary(1, 4);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn samples_are_reproducible_per_seed() {
        assert_eq!(random_hermitian(5, 99), random_hermitian(5, 99));
        assert_ne!(random_hermitian(5, 99), random_hermitian(5, 100));
        assert_eq!(haar_unitary(4, 1), haar_unitary(4, 1));
        let a = random_density(3, 2, 8).unwrap();
        let b = random_density(3, 2, 8).unwrap();
        assert_eq!(a.matrix().as_matrix(), b.matrix().as_matrix());
    }

    #[test]
    fn trial_streams_are_distinct() {
        let mut a = trial_rng(7, 0);
        let mut b = trial_rng(7, 1);
        let xa: u64 = a.random();
        let xb: u64 = b.random();
        assert_ne!(xa, xb);
    }

    #[test]
    fn hermitian_sample_is_exactly_hermitian() {
        let h = random_hermitian(4, 12);
        let m = h.matrix().as_matrix();
        assert_eq!(m, &m.adjoint());
    }

    #[test]
    fn haar_columns_are_unit() {
        let u = haar_unitary(6, 31);
        for j in 0..6 {
            assert!((u.column(j).norm() - 1.0).abs() < 1e-12);
        }
        let defect = (u.adjoint() * &u - ComplexMatrix::identity(6, 6)).norm();
        assert!(defect < 1e-12);
    }

    #[test]
    fn density_samples() {
        let rho = random_density(2, 2, 3).unwrap();
        assert!((rho.matrix().as_matrix().trace().re - 1.0).abs() < 1e-14);
        assert!(rho.eigen().min_eigenvalue() > 0.0);
        assert_eq!(rho.rank(), 2);

        let pure = random_density(4, 1, 3).unwrap();
        let eig = hermitian_eig(pure.matrix());
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        let psi = eig.eigenvectors.column(0).into_owned();
        let proj = &psi * psi.adjoint();
        assert!((proj - pure.matrix().as_matrix()).norm() < 1e-12);

        assert!(random_density(3, 0, 1).is_err());
        assert!(random_density(3, 4, 1).is_err());
    }

    #[test]
    fn pure_state_has_unit_norm() {
        let psi = random_pure_state(7, 77);
        assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_examples() {
        let s = bloch_state(0.0, 1.234);
        assert_eq!(s.amplitudes()[0], Complex64::from(1.0));
        assert!(s.amplitudes()[1].norm() < 1e-15);
        let s = bloch_state(PI, 0.0);
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1] - Complex64::from(1.0)).norm() < 1e-15);
        let s = bloch_state(FRAC_PI_2, 0.0);
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let p = bloch_partner(0.7, 2.1);
        assert!(bloch_state(0.7, 2.1).overlap(&p).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let ok = SampleConfig {
            dimension: 3,
            rank: 2,
            seed: 0,
            count: 5,
        };
        assert!(ok.validate().is_ok());
        assert!(SampleConfig { rank: 4, ..ok }.validate().is_err());
        assert!(SampleConfig { count: 0, ..ok }.validate().is_err());
        assert!(SampleConfig { dimension: 0, ..ok }.validate().is_err());
    }
}
