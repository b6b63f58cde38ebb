//! Dense complex matrix primitives.
//!
//! Everything downstream is phrased in terms of a handful of operations on
//! small dense complex matrices: Hermitian eigensystems, powers of positive
//! semidefinite matrices, the Frobenius inner product, completion of an
//! orthonormal set to a unitary, and two tolerance-aware dependence tests.
//!
//! The dependence tests never form a Gram matrix and take its smallest
//! eigenvalue, since that squares the condition number; they reduce the
//! two columns with a re-orthogonalized QR step and read the smaller
//! singular value off `|det R| / σ_max`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{Tolerance, HERMITICITY_TOL, ORTHO_TOL, PSD_TOL};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients below this magnitude (on a unit coefficient vector) are
/// rounding noise and get snapped to zero when canonicalizing angles.
const COEFF_SNAP: f64 = 8.0 * f64::EPSILON;

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction checks ‖H − H†‖_F against [`HERMITICITY_TOL`] and then stores
/// the exactly Hermitian part (H + H†)/2.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let deviation = (&matrix - matrix.adjoint()).norm();
        if deviation > HERMITICITY_TOL * matrix.norm().max(1.0) {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self::symmetrized(&matrix))
    }

    /// Hermitian part of an arbitrary square matrix, without validation.
    pub(crate) fn symmetrized(matrix: &ComplexMatrix) -> Self {
        Self((matrix + matrix.adjoint()).scale(0.5))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::from(x)));
        Self(ComplexMatrix::from_diagonal(&d))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// H − c·I, which stays Hermitian for real `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.0.clone();
        for k in 0..m.nrows() {
            m[(k, k)] -= c;
        }
        Self(m)
    }

    /// Real linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self(self.0.scale(a) + other.0.scale(b))
    }

    /// U·H·U† for a unitary `u`.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Self {
        Self::symmetrized(&(u * &self.0 * u.adjoint()))
    }
}

/// Eigenvalues (descending) and the unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    /// U·diag(f(λ))·U†.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(j).scale_mut(w);
        }
        scaled * u.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues strictly above `threshold`.
    pub fn rank_above(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > threshold).count()
    }

    /// P^r for a PSD spectrum; eigenvalues at or below `floor` are the kernel.
    pub(crate) fn psd_power(&self, r: f64, floor: f64) -> ComplexMatrix {
        self.map_spectrum(|l| if l > floor { l.powf(r) } else { 0.0 })
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub fn hermitian_eig(h: &HermitianMatrix) -> EigenSystem {
    let n = h.dim();
    let eig = SymmetricEigen::new(h.0.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    EigenSystem {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalue floor used to separate the support of a PSD matrix from its kernel.
pub fn psd_floor(p: &HermitianMatrix) -> f64 {
    PSD_TOL * p.frobenius_norm()
}

/// P^r for positive semidefinite P and r > 0.
///
/// Eigenvalues within `psd_floor(P)` of zero are treated as exact zeros, so the
/// result lives on the support of P for every r.
pub fn psd_power(p: &HermitianMatrix, r: f64) -> Result<HermitianMatrix> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "power r = {r} must be positive"
        )));
    }
    let eig = hermitian_eig(p);
    let floor = psd_floor(p);
    let min_eigenvalue = eig.min_eigenvalue();
    if min_eigenvalue < -floor {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
    }
    Ok(HermitianMatrix::symmetrized(&eig.psd_power(r, floor)))
}

/// tr(X†Y).
pub fn frobenius_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<Complex64> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum())
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

/// Basis vector e_k of ℂⁿ.
pub fn basis_vector(n: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(n);
    v[k] = ONE;
    v
}

/// Extends orthonormal columns to an n×n unitary.
///
/// The given columns are copied verbatim into the leading positions; the
/// remaining columns come from orthonormalizing e₁, e₂, … in order, skipping
/// any basis vector whose residual falls below 1/(2√n).
pub fn unitary_completion(columns: &[ComplexVector]) -> Result<ComplexMatrix> {
    let Some(first) = columns.first() else {
        return Err(Error::InvalidConfig(
            "unitary completion needs at least one column".into(),
        ));
    };
    let n = first.len();
    if n == 0 {
        return Err(Error::BadShape { rows: 0, cols: 0 });
    }
    if columns.len() > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: columns.len(),
        });
    }
    for c in columns {
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.len(),
            });
        }
    }
    let mut deviation: f64 = 0.0;
    for (i, ci) in columns.iter().enumerate() {
        for (j, cj) in columns.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            deviation = deviation.max((ci.dotc(cj) - target).norm());
        }
    }
    if deviation > ORTHO_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }

    let mut basis: Vec<ComplexVector> = columns.to_vec();
    let accept = 0.5 / (n as f64).sqrt();
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = basis_vector(n, k);
        // two Gram–Schmidt passes keep the new column orthogonal to working precision
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&v);
                v.axpy(-proj, q, ONE);
            }
        }
        let norm = v.norm();
        if norm >= accept {
            basis.push(v.unscale(norm));
        }
    }
    debug_assert_eq!(basis.len(), n);
    Ok(ComplexMatrix::from_columns(&basis))
}

/// Best real-phase combination cosϑ·x + i·sinϑ·y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit {
    /// Canonical angle in [0, 2π) with cos ϑ ≥ 0.
    pub theta: f64,
    /// Smallest singular value of the realified pair [x | i·y].
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// ‖cosϑ·x + i·sinϑ·y‖ evaluated at `theta`.
    pub residual: f64,
}

/// Best complex combination cosϑ·X + e^{iφ}·sinϑ·Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFit {
    /// In [0, π/2].
    pub theta: f64,
    /// In [0, 2π); 0 when sinϑ vanishes.
    pub phi: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub residual: f64,
}

/// Smallest singular triple of the two-column matrix [c1 | c2].
struct TwoColumn {
    sigma_min: f64,
    sigma_max: f64,
    a: Complex64,
    b: Complex64,
}

fn two_column_fit<'a>(
    c1: impl ExactSizeIterator<Item = &'a Complex64> + Clone,
    c2: impl ExactSizeIterator<Item = &'a Complex64> + Clone,
) -> TwoColumn {
    let c1: Vec<Complex64> = c1.copied().collect();
    let c2: Vec<Complex64> = c2.copied().collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let dotc = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
    };

    let r11 = norm(&c1);
    if r11 == 0.0 {
        return TwoColumn {
            sigma_min: 0.0,
            sigma_max: norm(&c2),
            a: ONE,
            b: ZERO,
        };
    }
    let q: Vec<Complex64> = c1.iter().map(|z| z / r11).collect();
    let mut r12 = dotc(&q, &c2);
    let mut z: Vec<Complex64> = c2.iter().zip(&q).map(|(c, qi)| c - r12 * qi).collect();
    let d = dotc(&q, &z);
    for (zi, qi) in z.iter_mut().zip(&q) {
        *zi -= d * qi;
    }
    r12 += d;
    let r22 = norm(&z);

    // Gram of the columns is R†R with R = [[r11, r12], [0, r22]].
    let p = r11 * r11;
    let s = r12.norm_sqr() + r22 * r22;
    let off = r12 * r11;
    let lambda_max = 0.5 * (p + s) + (0.5 * (p - s)).hypot(off.norm());
    let sigma_max = lambda_max.sqrt();
    let sigma_min = if sigma_max > 0.0 {
        r11 * r22 / sigma_max
    } else {
        0.0
    };

    // Top eigenvector of the Gram, then its orthogonal complement.
    let cand1 = (off, Complex64::from(lambda_max - p));
    let cand2 = (Complex64::from(lambda_max - s), off.conj());
    let n1 = cand1.0.norm_sqr() + cand1.1.norm_sqr();
    let n2 = cand2.0.norm_sqr() + cand2.1.norm_sqr();
    let (va, vb, nv) = if n1 >= n2 {
        (cand1.0, cand1.1, n1.sqrt())
    } else {
        (cand2.0, cand2.1, n2.sqrt())
    };
    let (a, b) = if nv > 0.0 {
        (-(vb / nv).conj(), (va / nv).conj())
    } else {
        (ZERO, ONE)
    };
    TwoColumn {
        sigma_min,
        sigma_max,
        a,
        b,
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Real-phase fit of `x` against `i·y`; always returns the best angle.
pub fn phase_fit(x: &ComplexVector, y: &ComplexVector) -> PhaseFit {
    assert_eq!(x.len(), y.len(), "phase_fit needs equal-length vectors");
    // realify: x ↦ (Re x, Im x), i·y ↦ (−Im y, Re y)
    let rx: Vec<Complex64> = x
        .iter()
        .map(|z| Complex64::from(z.re))
        .chain(x.iter().map(|z| Complex64::from(z.im)))
        .collect();
    let ry: Vec<Complex64> = y
        .iter()
        .map(|z| Complex64::from(-z.im))
        .chain(y.iter().map(|z| Complex64::from(z.re)))
        .collect();
    let fit = two_column_fit(rx.iter(), ry.iter());

    // Coefficients are real up to a global phase; strip it.
    let phase = if fit.a.norm() >= fit.b.norm() {
        fit.a.conj() / fit.a.norm()
    } else {
        fit.b.conj() / fit.b.norm()
    };
    let mut a = (fit.a * phase).re;
    let mut b = (fit.b * phase).re;
    if a.abs() <= COEFF_SNAP {
        a = 0.0;
    }
    if b.abs() <= COEFF_SNAP {
        b = 0.0;
    }
    if a < 0.0 || (a == 0.0 && b < 0.0) {
        a = -a;
        b = -b;
    }
    let theta = normalize_angle(b.atan2(a));
    let (s, c) = theta.sin_cos();
    let residual = x
        .iter()
        .zip(y.iter())
        .map(|(xi, yi)| (xi * c + I * yi * s).norm_sqr())
        .sum::<f64>()
        .sqrt();
    PhaseFit {
        theta,
        sigma_min: fit.sigma_min,
        sigma_max: fit.sigma_max,
        residual,
    }
}

/// Finds ϑ ∈ [0, 2π) with cosϑ·x + i·sinϑ·y = 0, if `x` and `i·y` are real-linearly dependent.
///
/// Dependence is declared when the smaller singular value of the realified
/// pair is within `tol` at scale max(1, ‖x‖, ‖y‖). Among the two valid angles
/// the one with cos ϑ ≥ 0 is returned; x = y = 0 gives ϑ = 0.
pub fn phase_dependence(x: &ComplexVector, y: &ComplexVector, tol: &Tolerance) -> Option<f64> {
    let fit = phase_fit(x, y);
    let bound = tol.effective(x.norm().max(y.norm()).max(1.0));
    (fit.sigma_min <= bound && fit.residual <= bound).then_some(fit.theta)
}

/// Complex fit of two equally-shaped matrices (or vectors) viewed as vectors.
pub fn complex_fit(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexFit> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let fit = two_column_fit(x.iter(), y.iter());
    let (mut a, mut b) = (fit.a, fit.b);
    if a.norm() > COEFF_SNAP {
        let phase = a.conj() / a.norm();
        a *= phase;
        b *= phase;
    } else {
        a = ZERO;
        b = Complex64::from(b.norm());
    }
    let sin = b.norm();
    let theta = sin.atan2(a.re.max(0.0));
    let phi = if sin > COEFF_SNAP {
        normalize_angle(b.arg())
    } else {
        0.0
    };
    let coeff = Complex64::from_polar(theta.sin(), phi);
    let cos = theta.cos();
    let residual = x
        .iter()
        .zip(y.iter())
        .map(|(xi, yi)| (xi * cos + coeff * yi).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(ComplexFit {
        theta,
        phi,
        sigma_min: fit.sigma_min,
        sigma_max: fit.sigma_max,
        residual,
    })
}

/// Finds (ϑ, φ) with cosϑ·X + e^{iφ}·sinϑ·Y = 0 when X and Y are linearly dependent over ℂ.
///
/// Canonical form: ϑ ∈ [0, π/2], φ ∈ [0, 2π), φ = 0 whenever sinϑ = 0.
/// Y = 0 with X ≠ 0 gives (π/2, 0); X = 0 gives (0, 0).
pub fn complex_dependence(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Option<(f64, f64)>> {
    let fit = complex_fit(x, y)?;
    let bound = tol.effective(x.norm().max(y.norm()).max(1.0));
    Ok((fit.sigma_min <= bound && fit.residual <= bound).then_some((fit.theta, fit.phi)))
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    let (rows, cols) = m.shape();
    if rows == 0 || rows != cols {
        return Err(Error::BadShape { rows, cols });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// The Pauli matrices σx, σy, σz.
pub mod pauli {
    use super::*;

    pub fn x() -> HermitianMatrix {
        HermitianMatrix(ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
    }

    pub fn y() -> HermitianMatrix {
        HermitianMatrix(ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]))
    }

    pub fn z() -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&[1.0, -1.0])
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::sampling;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn vec2(a: Complex64, b: Complex64) -> ComplexVector {
        ComplexVector::from_vec(vec![a, b])
    }

    fn unitarity_defect(u: &ComplexMatrix) -> f64 {
        (u.adjoint() * u - ComplexMatrix::identity(u.nrows(), u.ncols())).norm()
    }

    #[test]
    fn eig_of_diagonal_is_sorted_and_trivial() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]);
        let eig = hermitian_eig(&h);
        assert_eq!(eig.eigenvalues, vec![2.0, 1.0]);
        assert!((eig.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((eig.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_of_sigma_x() {
        let eig = hermitian_eig(&pauli::x());
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-15);
        // (1,1)/√2 up to phase
        let v = eig.eigenvectors.column(0);
        let overlap = (v[0] + v[1]).norm() * FRAC_1_SQRT_2;
        assert!((overlap - 1.0).abs() < 1e-14);
        let w = eig.eigenvectors.column(1);
        let overlap = (w[0] - w[1]).norm() * FRAC_1_SQRT_2;
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 8] {
            let h = sampling::random_hermitian_with(n, &mut rng);
            let h = h.matrix();
            let eig = hermitian_eig(h);
            let recon = (eig.reconstruct() - h.as_matrix()).norm();
            assert!(
                recon <= 1e-12 * h.frobenius_norm().max(1.0),
                "n={n}: {recon}"
            );
            assert!(unitarity_defect(&eig.eigenvectors) < 1e-12);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NonHermitianInput { .. })
        ));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            HermitianMatrix::new(rect),
            Err(Error::BadShape { .. })
        ));
        let mut nan = ComplexMatrix::identity(2, 2);
        nan[(0, 0)] = c(f64::NAN, 0.0);
        assert_eq!(HermitianMatrix::new(nan), Err(Error::NonFinite));
    }

    #[test]
    fn psd_square_root_of_diagonal() {
        let p = HermitianMatrix::from_real_diagonal(&[4.0, 1.0, 0.0]);
        let root = psd_power(&p, 0.5).unwrap();
        let expected = HermitianMatrix::from_real_diagonal(&[2.0, 1.0, 0.0]);
        assert!((root.as_matrix() - expected.as_matrix()).norm() < 1e-14);
    }

    #[test]
    fn psd_power_of_projector_is_the_projector() {
        let psi = vec2(c(0.6, 0.0), c(0.0, 0.8));
        let proj = HermitianMatrix::new(&psi * psi.adjoint()).unwrap();
        for r in [0.3, 0.5, 1.0, 2.0, 7.0] {
            let pr = psd_power(&proj, r).unwrap();
            assert!((pr.as_matrix() - proj.as_matrix()).norm() < 1e-14, "r={r}");
        }
    }

    #[test]
    fn psd_square_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = sampling::random_density_with(4, 3, &mut rng).unwrap();
        let m = rho.matrix();
        let squared = psd_power(m, 2.0).unwrap();
        let direct = m.as_matrix() * m.as_matrix();
        assert!((squared.as_matrix() - direct).norm() < 1e-12);
        let once = psd_power(m, 1.0).unwrap();
        assert!((once.as_matrix() - m.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn psd_power_rejects_indefinite_and_bad_exponent() {
        let p = HermitianMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(
            psd_power(&p, 0.5),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let q = HermitianMatrix::identity(2);
        assert!(psd_power(&q, 0.0).is_err());
        assert!(psd_power(&q, f64::NAN).is_err());
    }

    #[test]
    fn frobenius_inner_examples() {
        let id = ComplexMatrix::identity(2, 2);
        assert_eq!(frobenius_inner(&id, &id).unwrap(), c(2.0, 0.0));
        let v = frobenius_inner(pauli::x().as_matrix(), pauli::y().as_matrix()).unwrap();
        assert!(v.norm() < 1e-15);
        assert!(frobenius_inner(&id, &ComplexMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn frobenius_self_inner_is_entry_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = sampling::ginibre_with(3, 4, &mut rng);
        let inner = frobenius_inner(&x, &x).unwrap();
        let oracle: f64 = x.iter().map(|z| z.re * z.re + z.im * z.im).sum();
        assert!(inner.im.abs() < 1e-15);
        assert!((inner.re - oracle).abs() < 1e-12);
    }

    #[test]
    fn completion_of_e1_keeps_column_and_is_unitary() {
        let e1 = basis_vector(3, 0);
        let u = unitary_completion(std::slice::from_ref(&e1)).unwrap();
        assert_eq!(u.column(0), e1.column(0));
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn completion_of_complex_column() {
        let v = vec2(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2));
        let u = unitary_completion(std::slice::from_ref(&v)).unwrap();
        assert_eq!(u.column(0), v.column(0));
        assert!(unitarity_defect(&u) <= 1e-12);
    }

    #[test]
    fn completion_of_random_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = sampling::haar_unitary_with(4, &mut rng);
        let psi = h.column(0).into_owned();
        let phi = h.column(1).into_owned();
        let u = unitary_completion(&[psi.clone(), phi.clone()]).unwrap();
        assert_eq!(u.column(0), psi.column(0));
        assert_eq!(u.column(1), phi.column(0));
        assert!(unitarity_defect(&u) <= 1e-12);
    }

    #[test]
    fn completion_rejects_non_orthonormal() {
        let a = basis_vector(3, 0);
        let b = vec2(ONE, ONE);
        assert!(unitary_completion(&[a.clone(), a.clone()]).is_err());
        assert!(unitary_completion(&[a, b]).is_err());
        assert!(unitary_completion(&[]).is_err());
    }

    #[test]
    fn phase_dependence_examples() {
        let tol = Tolerance::default();
        let zero = vec2(ZERO, ZERO);
        let e2 = vec2(ZERO, ONE);
        assert_eq!(phase_dependence(&zero, &e2, &tol), Some(0.0));

        // σx|0⟩ = (0,1), σy|0⟩ = (0,i)
        let x = vec2(ZERO, ONE);
        let y = vec2(ZERO, I);
        let theta = phase_dependence(&x, &y, &tol).unwrap();
        assert!((theta - FRAC_PI_4).abs() < 1e-12);

        let e1 = vec2(ONE, ZERO);
        assert_eq!(phase_dependence(&e1, &e2, &tol), None);

        // y = 0, x ≠ 0 needs cos ϑ = 0
        let theta = phase_dependence(&e1, &zero, &tol).unwrap();
        assert!((theta - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn phase_dependence_prefers_nonnegative_cosine() {
        // σx|1⟩ = (1,0), σy|1⟩ = (−i,0): cos ϑ + sin ϑ = 0
        let x = vec2(ONE, ZERO);
        let y = vec2(-I, ZERO);
        let theta = phase_dependence(&x, &y, &Tolerance::default()).unwrap();
        assert!((theta - 7.0 * FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn complex_dependence_examples() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = sampling::ginibre_with(3, 3, &mut rng);
        let y = x.map(|z| z * c(2.0, 1.0));
        let (theta, phi) = complex_dependence(&x, &y, &tol).unwrap().unwrap();
        let combo =
            Complex64::from(theta.cos()) + Complex64::from_polar(theta.sin(), phi) * c(2.0, 1.0);
        assert!(combo.norm() < 1e-12);

        let none =
            complex_dependence(pauli::x().as_matrix(), pauli::y().as_matrix(), &tol).unwrap();
        assert_eq!(none, None);

        let zero = ComplexMatrix::zeros(3, 3);
        let (theta, phi) = complex_dependence(&x, &zero, &tol).unwrap().unwrap();
        assert!((theta - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(phi, 0.0);
        assert_eq!(
            complex_dependence(&zero, &x, &tol).unwrap(),
            Some((0.0, 0.0))
        );

        assert!(complex_dependence(&x, &ComplexMatrix::zeros(2, 2), &tol).is_err());
    }

    #[test]
    fn complex_dependence_of_equal_matrices() {
        let x = pauli::z().into_inner();
        let (theta, phi) = complex_dependence(&x, &x, &Tolerance::default())
            .unwrap()
            .unwrap();
        assert!((theta - FRAC_PI_4).abs() < 1e-12);
        assert!((phi - PI).abs() < 1e-12);
    }

    #[test]
    fn two_column_sigma_min_matches_direct_scan() {
        // brute-force minimum of ‖cos t·x + sin t·y‖ over a fine grid for real data
        let x = vec2(c(1.0, 0.0), c(0.5, 0.0));
        let y = vec2(c(0.3, 0.0), c(-2.0, 0.0));
        let fit = two_column_fit(x.iter(), y.iter());
        let scan = (0..200_000)
            .map(|k| {
                let t = PI * k as f64 / 200_000.0;
                (x.map(|z| z * t.cos()) + y.map(|z| z * t.sin())).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(
            (fit.sigma_min - scan).abs() < 1e-9,
            "{} vs {scan}",
            fit.sigma_min
        );
    }
}
