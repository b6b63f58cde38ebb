//! Observables, pure and mixed states, and the moments built from them.
//!
//! Pure and mixed states share one code path: the centered observable Ã is
//! mapped to a "deviation vector", Ã|ψ⟩ for a pure state and the flattened
//! matrix Ãρ^{1/2} for a mixed one. Variances, covariances and the Gram pair
//! are then plain inner products of deviation vectors, since
//! ⟨Ãρ^{1/2}, B̃ρ^{1/2}⟩ = tr(ÃB̃ρ) and ⟨Ãψ, B̃ψ⟩ = ⟨ψ|ÃB̃|ψ⟩.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{
    basis_vector, hermitian_eig, psd_floor, ComplexMatrix, ComplexVector, EigenSystem,
    HermitianMatrix,
};
use crate::tolerance::{IMAG_TOL, NORM_TOL, PSD_TOL};

/// A Hermitian matrix standing for a measurable quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: HermitianMatrix,
    label: String,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        Ok(Self::from_hermitian(HermitianMatrix::new(matrix)?, label))
    }

    pub fn from_hermitian(matrix: HermitianMatrix, label: impl Into<String>) -> Self {
        Self {
            matrix,
            label: label.into(),
        }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Unit vector in ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    /// Accepts vectors whose norm is within `NORM_TOL` of 1 and renormalizes them.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::BadShape { rows: 0, cols: 1 });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalized(v: ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(v.unscale(norm))
    }

    pub fn basis(n: usize, k: usize) -> Self {
        Self {
            amplitudes: basis_vector(n, k),
        }
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(ComplexVector::from_column_slice(amplitudes))
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// ⟨self|M|other⟩.
    pub fn matrix_element(&self, m: &ComplexMatrix, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&(m * &other.amplitudes))
    }

    /// |ψ⟩⟨ψ| as a density matrix.
    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_hermitian_unchecked(HermitianMatrix::symmetrized(&m))
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
///
/// The eigensystem is computed once at construction; ρ^{1/2} and other powers
/// are derived from it, with eigenvalues below `PSD_TOL·‖ρ‖_F` treated as the kernel.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    eigen: EigenSystem,
    floor: f64,
    sqrt: ComplexMatrix,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::from_hermitian(HermitianMatrix::new(matrix)?)
    }

    pub fn from_hermitian(matrix: HermitianMatrix) -> Result<Self> {
        let trace = matrix.as_matrix().trace().re;
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidTrace { trace });
        }
        let rho = Self::from_hermitian_unchecked(matrix);
        let min_eigenvalue = rho.eigen.min_eigenvalue();
        if min_eigenvalue < -rho.floor {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
        }
        Ok(rho)
    }

    fn from_hermitian_unchecked(matrix: HermitianMatrix) -> Self {
        let eigen = hermitian_eig(&matrix);
        let floor = psd_floor(&matrix);
        let sqrt = eigen.psd_power(0.5, floor);
        Self {
            matrix,
            eigen,
            floor,
            sqrt,
        }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::from_hermitian_unchecked(HermitianMatrix::from_real_diagonal(&vec![
            1.0 / n as f64;
            n
        ]))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eigen
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// ρ^{1/2}.
    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    /// ρ^r for r > 0, restricted to the support of ρ.
    pub fn power(&self, r: f64) -> Result<ComplexMatrix> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "power r = {r} must be positive"
            )));
        }
        Ok(self.eigen.psd_power(r, self.floor))
    }

    /// Number of eigenvalues above `PSD_TOL·tr ρ`.
    pub fn rank(&self) -> usize {
        self.eigen
            .rank_above(PSD_TOL * self.matrix.as_matrix().trace().re)
    }
}

/// Either a state vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl From<PureState> for QuantumState {
    fn from(s: PureState) -> Self {
        QuantumState::Pure(s)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(s: DensityMatrix) -> Self {
        QuantumState::Mixed(s)
    }
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(p) => p.dim(),
            QuantumState::Mixed(m) => m.dim(),
        }
    }

    /// ⟨ψ|M|ψ⟩ or tr(Mρ) for an arbitrary square M.
    pub fn expect_operator(&self, m: &ComplexMatrix) -> Result<Complex64> {
        check_dim(self.dim(), m.nrows())?;
        check_dim(self.dim(), m.ncols())?;
        Ok(match self {
            QuantumState::Pure(p) => p.matrix_element(m, p),
            QuantumState::Mixed(rho) => {
                let r = rho.matrix.as_matrix();
                let n = r.nrows();
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        acc += m[(i, j)] * r[(j, i)];
                    }
                }
                acc
            }
        })
    }

    /// Ã|ψ⟩, or Ãρ^{1/2} flattened column-major.
    pub fn deviation_vector(&self, centered: &HermitianMatrix) -> ComplexVector {
        match self {
            QuantumState::Pure(p) => centered.as_matrix() * p.amplitudes(),
            QuantumState::Mixed(rho) => {
                let m = centered.as_matrix() * rho.sqrt();
                ComplexVector::from_iterator(m.len(), m.iter().copied())
            }
        }
    }

    /// The state as a density matrix (pure states become projectors).
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(p) => p.projector(),
            QuantumState::Mixed(m) => m.clone(),
        }
    }

    /// Feeds the raw state data into a digest.
    pub(crate) fn digest_into(&self, d: &mut crate::digest::Digest) {
        match self {
            QuantumState::Pure(p) => d.tag("pure").vector(p.amplitudes()),
            QuantumState::Mixed(m) => d.tag("mixed").matrix(m.matrix().as_matrix()),
        };
    }
}

/// A − α·I with α the expectation of A in the generating state.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredObservable {
    pub matrix: HermitianMatrix,
    pub mean: f64,
}

/// The 2×2 Gram matrices C₁, C₂ of the centered deviation vectors x, y:
/// C₁ = [[⟨x,x⟩, ⟨x,y⟩], [⟨y,x⟩, ⟨y,y⟩]], C₂ = [[⟨x,x⟩, −⟨y,x⟩], [−⟨x,y⟩, ⟨y,y⟩]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramPair {
    pub c1: Matrix2<Complex64>,
    pub c2: Matrix2<Complex64>,
}

impl GramPair {
    pub fn sum(&self) -> Matrix2<Complex64> {
        self.c1 + self.c2
    }

    /// det(C₁ + C₂) = 4Δ(A)²Δ(B)² − |⟨[A,B]⟩|².
    pub fn det_sum(&self) -> f64 {
        det2(&self.sum())
    }

    /// Eigenvalues of a 2×2 Hermitian matrix, ascending.
    pub fn eigenvalues(m: &Matrix2<Complex64>) -> [f64; 2] {
        let p = m[(0, 0)].re;
        let s = m[(1, 1)].re;
        let rad = (0.5 * (p - s)).hypot(m[(0, 1)].norm());
        let mid = 0.5 * (p + s);
        [mid - rad, mid + rad]
    }
}

fn det2(m: &Matrix2<Complex64>) -> f64 {
    (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re
}

/// Centered observables of a pair together with their deviation vectors.
#[derive(Debug, Clone)]
pub struct DeviationPair {
    pub a: CenteredObservable,
    pub b: CenteredObservable,
    pub x: ComplexVector,
    pub y: ComplexVector,
}

impl DeviationPair {
    pub fn new(a: &Observable, b: &Observable, s: &QuantumState) -> Result<Self> {
        let ca = center(a, s)?;
        let cb = center(b, s)?;
        let x = s.deviation_vector(&ca.matrix);
        let y = s.deviation_vector(&cb.matrix);
        Ok(Self { a: ca, b: cb, x, y })
    }

    pub fn delta_a(&self) -> f64 {
        self.x.norm()
    }

    pub fn delta_b(&self) -> f64 {
        self.y.norm()
    }

    /// ⟨ÃB̃⟩ in the state.
    pub fn covariance(&self) -> Complex64 {
        self.x.dotc(&self.y)
    }

    pub fn gram_pair(&self) -> GramPair {
        let xx = Complex64::from(self.x.norm_squared());
        let yy = Complex64::from(self.y.norm_squared());
        let xy = self.x.dotc(&self.y);
        let yx = xy.conj();
        GramPair {
            c1: Matrix2::new(xx, xy, yx, yy),
            c2: Matrix2::new(xx, -yx, -xy, yy),
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// ⟨ψ|A|ψ⟩ or tr(ρA).
pub fn expectation(a: &Observable, s: &QuantumState) -> Result<f64> {
    let z = s.expect_operator(a.matrix().as_matrix())?;
    if z.im.abs() > IMAG_TOL * a.matrix().frobenius_norm().max(1.0) {
        return Err(Error::NonRealExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// Δ(A), computed as the norm of the centered deviation vector.
pub fn stddev(a: &Observable, s: &QuantumState) -> Result<f64> {
    let c = center(a, s)?;
    Ok(s.deviation_vector(&c.matrix).norm())
}

pub fn center(a: &Observable, s: &QuantumState) -> Result<CenteredObservable> {
    let mean = expectation(a, s)?;
    Ok(CenteredObservable {
        matrix: a.matrix().shifted(mean),
        mean,
    })
}

pub fn gram_pair(a: &Observable, b: &Observable, s: &QuantumState) -> Result<GramPair> {
    check_dim(a.dim(), b.dim())?;
    Ok(DeviationPair::new(a, b, s)?.gram_pair())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::matrix::pauli;
    use crate::sampling::bloch_state;

    fn obs(h: HermitianMatrix) -> Observable {
        Observable::from_hermitian(h, "")
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expectation_examples() {
        let zero = QuantumState::Pure(PureState::basis(2, 0));
        assert_eq!(expectation(&obs(pauli::z()), &zero).unwrap(), 1.0);
        let mixed = QuantumState::Mixed(DensityMatrix::maximally_mixed(2));
        assert_eq!(expectation(&obs(pauli::z()), &mixed).unwrap(), 0.0);
        for &(theta, phi) in &[(0.3, 1.1), (2.0, -0.7), (1.2, 3.0)] {
            let s = QuantumState::Pure(bloch_state(theta, phi));
            let alpha = expectation(&obs(pauli::x()), &s).unwrap();
            assert!((alpha - theta.sin() * phi.cos()).abs() < 1e-15);
            let beta = expectation(&obs(pauli::y()), &s).unwrap();
            assert!((beta - theta.sin() * phi.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let s = QuantumState::Pure(PureState::basis(3, 0));
        assert_eq!(
            expectation(&obs(pauli::z()), &s),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn stddev_examples() {
        let zero = QuantumState::Pure(PureState::basis(2, 0));
        assert!((stddev(&obs(pauli::x()), &zero).unwrap() - 1.0).abs() < 1e-15);
        let diag = obs(HermitianMatrix::from_real_diagonal(&[3.0, -2.0]));
        assert_eq!(stddev(&diag, &zero).unwrap(), 0.0);

        let psi = PureState::normalized(ComplexVector::from_vec(vec![
            c(1.0, 0.5),
            c(-0.3, 2.0),
            c(0.1, 0.0),
        ]))
        .unwrap();
        let a = Observable::new(
            ComplexMatrix::from_row_slice(
                3,
                3,
                &[
                    c(1.0, 0.0),
                    c(0.5, 0.2),
                    c(0.0, -1.0),
                    c(0.5, -0.2),
                    c(-2.0, 0.0),
                    c(0.3, 0.0),
                    c(0.0, 1.0),
                    c(0.3, 0.0),
                    c(0.7, 0.0),
                ],
            ),
            "A",
        )
        .unwrap();
        let pure = stddev(&a, &QuantumState::Pure(psi.clone())).unwrap();
        let mixed = stddev(&a, &QuantumState::Mixed(psi.projector())).unwrap();
        assert!((pure - mixed).abs() < 1e-12);
        // textbook route ⟨A²⟩ − ⟨A⟩²
        let am = a.matrix().as_matrix();
        let second = psi.matrix_element(&(am * am), &psi).re;
        let first = psi.matrix_element(am, &psi).re;
        assert!((pure - (second - first * first).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn center_examples() {
        let zero = QuantumState::Pure(PureState::basis(2, 0));
        let c0 = center(&obs(pauli::z()), &zero).unwrap();
        let expected = HermitianMatrix::from_real_diagonal(&[0.0, -2.0]);
        assert_eq!(c0.matrix, expected);
        assert_eq!(expectation(&obs(c0.matrix.clone()), &zero).unwrap(), 0.0);

        let a = obs(HermitianMatrix::from_real_diagonal(&[1.0, 2.0, 6.0]));
        let mixed = QuantumState::Mixed(DensityMatrix::maximally_mixed(3));
        let ca = center(&a, &mixed).unwrap();
        assert!((ca.mean - 3.0).abs() < 1e-15);
        assert!((ca.matrix.as_matrix() - a.matrix().shifted(3.0).as_matrix()).norm() < 1e-14);

        let s = QuantumState::Pure(bloch_state(0.8, 0.4));
        let cx = center(&obs(pauli::x()), &s).unwrap();
        assert!((cx.mean - 0.8f64.sin() * 0.4f64.cos()).abs() < 1e-15);
        assert!(expectation(&obs(cx.matrix), &s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gram_pair_for_paulis_at_zero() {
        let zero = QuantumState::Pure(PureState::basis(2, 0));
        let g = gram_pair(&obs(pauli::x()), &obs(pauli::y()), &zero).unwrap();
        // ⟨0|σxσy|0⟩ = i
        let expected = Matrix2::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0));
        assert!((g.c1 - expected).norm() < 1e-15);
        assert!((g.c2 - expected).norm() < 1e-15);
        assert!(det2(&g.c1).abs() < 1e-15);
        assert!(det2(&g.c2).abs() < 1e-15);
    }

    #[test]
    fn gram_pair_for_commuting_diagonals() {
        let a = obs(HermitianMatrix::from_real_diagonal(&[1.0, 2.0]));
        let b = obs(HermitianMatrix::from_real_diagonal(&[3.0, 4.0]));
        let s = QuantumState::Pure(
            PureState::from_slice(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap(),
        );
        let g = gram_pair(&a, &b, &s).unwrap();
        // x = y = (−1/2, 1/2)/√2, ⟨x,y⟩ = 1/4
        let q = c(0.25, 0.0);
        assert!((g.c1 - Matrix2::new(q, q, q, q)).norm() < 1e-15);
        assert!((g.c2 - Matrix2::new(q, -q, -q, q)).norm() < 1e-15);
        let da = stddev(&a, &s).unwrap();
        let db = stddev(&b, &s).unwrap();
        assert!((g.det_sum() - 4.0 * da * da * db * db).abs() < 1e-15);
        assert_eq!(g.c1[(0, 0)] + g.c1[(1, 1)], g.c2[(0, 0)] + g.c2[(1, 1)]);
    }

    #[test]
    fn density_validation() {
        let bad_trace = ComplexMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(bad_trace),
            Err(Error::InvalidTrace { .. })
        ));
        let indefinite = HermitianMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            DensityMatrix::from_hermitian(indefinite),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let pure = PureState::basis(3, 1).projector();
        assert_eq!(pure.rank(), 1);
        assert_eq!(DensityMatrix::maximally_mixed(4).rank(), 4);
    }

    #[test]
    fn pure_state_validation() {
        let v = ComplexVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            PureState::new(v.clone()),
            Err(Error::NotNormalized { .. })
        ));
        assert!(PureState::normalized(v).is_ok());
        assert!(PureState::normalized(ComplexVector::zeros(2)).is_err());
    }
}
