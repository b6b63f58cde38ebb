//! The uncertainty inequalities, each evaluated into a [`BoundReport`].
//!
//! Every quantity is computed from the deviation vectors x = Ã·ψ, y = B̃·ψ
//! (or their mixed analogues, see [`crate::state`]), which keeps the bounds
//! exactly invariant under shifts A → A + cI up to the rounding in Ã itself.
//!
//! A report whose slack falls below the negative effective tolerance is an
//! error ([`Error::BoundViolation`]): the inequalities are theorems, so a
//! violation means a numerical fault, never a legitimate outcome.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::digest::Digest;
use crate::error::{Error, Result};
use crate::matrix::{unitary_completion, ComplexVector};
use crate::state::{check_dim, DeviationPair, Observable, PureState, QuantumState};
use crate::tolerance::{Tolerance, NORM_TOL, ORTHO_TOL};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Robertson,
    Schrodinger,
    MpChainStep1,
    MpChainStep2,
    MpChainStep3,
    Mp3,
    Mp6Product,
    Mp6Reformulated,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::Robertson,
        BoundKind::Schrodinger,
        BoundKind::MpChainStep1,
        BoundKind::MpChainStep2,
        BoundKind::MpChainStep3,
        BoundKind::Mp3,
        BoundKind::Mp6Product,
        BoundKind::Mp6Reformulated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Robertson => "robertson",
            BoundKind::Schrodinger => "schrodinger",
            BoundKind::MpChainStep1 => "mp_chain_step1",
            BoundKind::MpChainStep2 => "mp_chain_step2",
            BoundKind::MpChainStep3 => "mp_chain_step3",
            BoundKind::Mp3 => "mp3",
            BoundKind::Mp6Product => "mp6_product",
            BoundKind::Mp6Reformulated => "mp6_reformulated",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs − rhs.
    pub slack: f64,
    /// |slack| within the effective tolerance at `scale`.
    pub saturated: bool,
    /// Scale the tolerance was evaluated at, normally max(1, |lhs|, |rhs|).
    pub scale: f64,
    pub tol_used: Tolerance,
    pub inputs_digest: String,
}

impl BoundReport {
    /// `scale_factor` widens the comparison scale for quantities that were
    /// divided by something small.
    pub(crate) fn evaluate(
        kind: BoundKind,
        lhs: f64,
        rhs: f64,
        scale_factor: f64,
        tol: &Tolerance,
        inputs_digest: String,
    ) -> Result<Self> {
        let slack = lhs - rhs;
        let scale = lhs.abs().max(rhs.abs()).max(1.0) * scale_factor;
        let threshold = tol.effective(scale);
        if slack.is_nan() || slack < -threshold {
            return Err(Error::BoundViolation {
                bound: kind,
                slack,
                threshold,
            });
        }
        Ok(Self {
            kind,
            lhs,
            rhs,
            slack,
            saturated: slack.abs() <= threshold,
            scale,
            tol_used: *tol,
            inputs_digest,
        })
    }

    /// Effective tolerance of this report.
    pub fn threshold(&self) -> f64 {
        self.tol_used.effective(self.scale)
    }
}

/// Quantities of the frame U = [ψ, φ, …] in which U†AU has first column (α, u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MPFrame {
    pub alpha: f64,
    pub beta: f64,
    /// Entries 2..n of the first column of U†AU; ‖u‖ = Δ(A).
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    /// ⟨ψ|A|φ⟩.
    pub c: Complex64,
    /// ⟨ψ|B|φ⟩.
    pub d: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub steps: [BoundReport; 3],
    pub mu: Complex64,
    pub frame: MPFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuChoice {
    pub mu: Complex64,
    /// ⟨ψ|[A,B]|ψ⟩, purely imaginary.
    pub commutator_expectation: Complex64,
    pub tie_broken: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProductForm {
    Report(BoundReport),
    /// 1 − ½|⟨ψ|Q_μ|φ⟩|² is within tolerance of zero.
    DenominatorDegenerate {
        denominator: f64,
    },
}

impl ProductForm {
    pub fn report(&self) -> Option<&BoundReport> {
        match self {
            ProductForm::Report(r) => Some(r),
            ProductForm::DenominatorDegenerate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mp6Report {
    pub mu: MuChoice,
    pub reformulated: BoundReport,
    pub product: ProductForm,
}

/// Validates a tolerance before use.
pub(crate) fn check_tol(tol: &Tolerance) -> Result<()> {
    if tol.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "tolerance must be finite and non-negative, got {tol:?}"
        )))
    }
}

fn pair_digest(tag: &str, a: &Observable, b: &Observable) -> Digest {
    let mut d = Digest::new();
    d.tag(tag)
        .matrix(a.matrix().as_matrix())
        .matrix(b.matrix().as_matrix());
    d
}

/// Δ(A)·Δ(B) ≥ |⟨[A,B]⟩|/2 for a pure or mixed state.
pub fn robertson(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
) -> Result<BoundReport> {
    check_tol(tol)?;
    check_dim(a.dim(), b.dim())?;
    let pair = DeviationPair::new(a, b, s)?;
    let lhs = pair.delta_a() * pair.delta_b();
    // ⟨[A,B]⟩ = 2i·Im⟨x,y⟩
    let rhs = pair.covariance().im.abs();
    let mut d = pair_digest("robertson", a, b);
    s.digest_into(&mut d);
    BoundReport::evaluate(BoundKind::Robertson, lhs, rhs, 1.0, tol, d.finish())
}

/// Δ(A)²Δ(B)² ≥ |½⟨{A,B}⟩ − αβ|² + |⟨[A,B]⟩/(2i)|².
pub fn schrodinger(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
) -> Result<BoundReport> {
    check_tol(tol)?;
    check_dim(a.dim(), b.dim())?;
    let pair = DeviationPair::new(a, b, s)?;
    let (da, db) = (pair.delta_a(), pair.delta_b());
    let lhs = da * da * db * db;
    let w = pair.covariance();
    let rhs = w.re * w.re + w.im * w.im;
    let mut d = pair_digest("schrodinger", a, b);
    s.digest_into(&mut d);
    let report = BoundReport::evaluate(BoundKind::Schrodinger, lhs, rhs, 1.0, tol, d.finish())?;
    // never fails in exact arithmetic: the anticommutator term is a square
    let robertson_sq = w.im * w.im;
    if rhs < robertson_sq - tol.effective(report.scale) {
        return Err(Error::BoundViolation {
            bound: BoundKind::Schrodinger,
            slack: rhs - robertson_sq,
            threshold: tol.effective(report.scale),
        });
    }
    Ok(report)
}

/// Everything the Maccone–Pati results need about (A, B, ψ, φ).
pub(crate) struct MpSetup {
    pub pair: DeviationPair,
    pub frame: MPFrame,
}

impl MpSetup {
    pub fn new(a: &Observable, b: &Observable, psi: &PureState, phi: &PureState) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        check_dim(a.dim(), psi.dim())?;
        check_dim(a.dim(), phi.dim())?;
        let overlap = psi.overlap(phi).norm();
        if overlap > ORTHO_TOL {
            return Err(Error::NotOrthogonal { overlap });
        }
        let state = QuantumState::Pure(psi.clone());
        let pair = DeviationPair::new(a, b, &state)?;
        let u_mat = unitary_completion(&[psi.amplitudes().clone(), phi.amplitudes().clone()])?;
        let tail = |x: &ComplexVector| -> Vec<Complex64> {
            (1..u_mat.ncols())
                .map(|k| u_mat.column(k).dotc(x))
                .collect()
        };
        let frame = MPFrame {
            alpha: pair.a.mean,
            beta: pair.b.mean,
            u: tail(&pair.x),
            v: tail(&pair.y),
            c: psi.matrix_element(a.matrix().as_matrix(), phi),
            d: psi.matrix_element(b.matrix().as_matrix(), phi),
        };
        Ok(Self { pair, frame })
    }

    /// ⟨ψ|[A,B]|ψ⟩ = 2i·Im⟨x,y⟩.
    pub fn commutator_expectation(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * self.pair.covariance().im)
    }

    fn digest(
        &self,
        tag: &str,
        a: &Observable,
        b: &Observable,
        psi: &PureState,
        phi: &PureState,
    ) -> Digest {
        let mut d = pair_digest(tag, a, b);
        d.vector(psi.amplitudes()).vector(phi.amplitudes());
        d
    }
}

pub(crate) fn check_mu(mu: Complex64) -> Result<()> {
    let modulus = mu.norm();
    if (modulus - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidMu { modulus });
    }
    Ok(())
}

/// The three-step chain
/// Δ(A)² + Δ(B)² ≥ |c|² + |d|² ≥ ½(|c| + |d|)² ≥ ½|⟨ψ|A + μB|φ⟩|²
/// for orthonormal ψ, φ and any unit-modulus μ.
pub fn mp_chain(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    phi: &PureState,
    mu: Complex64,
    tol: &Tolerance,
) -> Result<ChainReport> {
    check_tol(tol)?;
    check_mu(mu)?;
    let setup = MpSetup::new(a, b, psi, phi)?;
    let f = &setup.frame;
    let (da, db) = (setup.pair.delta_a(), setup.pair.delta_b());
    let (nc, nd) = (f.c.norm(), f.d.norm());
    let levels = [
        da * da + db * db,
        nc * nc + nd * nd,
        0.5 * (nc + nd) * (nc + nd),
        0.5 * (f.c + mu * f.d).norm_sqr(),
    ];
    let mut d = setup.digest("mp_chain", a, b, psi, phi);
    d.scalar(mu);
    let digest = d.finish();
    let kinds = [
        BoundKind::MpChainStep1,
        BoundKind::MpChainStep2,
        BoundKind::MpChainStep3,
    ];
    let mut steps = Vec::with_capacity(3);
    for (k, kind) in kinds.into_iter().enumerate() {
        steps.push(BoundReport::evaluate(
            kind,
            levels[k],
            levels[k + 1],
            1.0,
            tol,
            digest.clone(),
        )?);
    }
    let steps: [BoundReport; 3] = steps.try_into().expect("three steps");
    Ok(ChainReport {
        steps,
        mu,
        frame: setup.frame,
    })
}

/// μ ∈ {i, −i} with μ·⟨ψ|[A,B]|ψ⟩ ≥ 0; μ = i when the expectation vanishes within tolerance.
pub fn choose_mu(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    tol: &Tolerance,
) -> Result<MuChoice> {
    check_dim(a.dim(), b.dim())?;
    let pair = DeviationPair::new(a, b, &QuantumState::Pure(psi.clone()))?;
    let comm = Complex64::new(0.0, 2.0 * pair.covariance().im);
    Ok(mu_from_commutator(comm, tol))
}

pub(crate) fn mu_from_commutator(comm: Complex64, tol: &Tolerance) -> MuChoice {
    // comm = i·t; (−i)(i·t) = t and (i)(i·t) = −t
    let t = comm.im;
    let tie = t.abs() <= tol.effective(1.0);
    let mu = if !tie && t > 0.0 { -I } else { I };
    MuChoice {
        mu,
        commutator_expectation: comm,
        tie_broken: tie,
    }
}

/// Δ(A)² + Δ(B)² ≥ μ⟨ψ|[A,B]|ψ⟩ + |⟨ψ|A + μB|φ⟩|² with μ from [`choose_mu`].
pub fn mp3(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    phi: &PureState,
    tol: &Tolerance,
) -> Result<(BoundReport, MuChoice)> {
    check_tol(tol)?;
    let setup = MpSetup::new(a, b, psi, phi)?;
    let choice = mu_from_commutator(setup.commutator_expectation(), tol);
    let report = mp3_with(
        &setup,
        choice.mu,
        tol,
        setup.digest("mp3", a, b, psi, phi).finish(),
    )?;
    Ok((report, choice))
}

pub(crate) fn mp3_with(
    setup: &MpSetup,
    mu: Complex64,
    tol: &Tolerance,
    digest: String,
) -> Result<BoundReport> {
    let f = &setup.frame;
    let (da, db) = (setup.pair.delta_a(), setup.pair.delta_b());
    let lhs = da * da + db * db;
    let rhs = (mu * setup.commutator_expectation()).re + (f.c + mu * f.d).norm_sqr();
    BoundReport::evaluate(BoundKind::Mp3, lhs, rhs, 1.0, tol, digest)
}

/// Shared pieces of the product bound.
pub(crate) struct Mp6Parts {
    pub delta_a: f64,
    pub delta_b: f64,
    /// ⟨ψ|A/Δ(A) + μB/Δ(B)|φ⟩.
    pub q: Complex64,
    pub denominator: f64,
    /// (μ/2)⟨[A,B]⟩, real.
    pub half_mu_comm: f64,
}

pub(crate) fn mp6_parts(
    a: &Observable,
    b: &Observable,
    setup: &MpSetup,
    mu: Complex64,
    tol: &Tolerance,
) -> Result<Mp6Parts> {
    let (da, db) = (setup.pair.delta_a(), setup.pair.delta_b());
    let ta = tol.effective(a.matrix().frobenius_norm().max(1.0));
    if da <= ta {
        return Err(Error::ZeroDeviation {
            observable: "A",
            deviation: da,
        });
    }
    let tb = tol.effective(b.matrix().frobenius_norm().max(1.0));
    if db <= tb {
        return Err(Error::ZeroDeviation {
            observable: "B",
            deviation: db,
        });
    }
    let q = setup.frame.c / da + mu * setup.frame.d / db;
    Ok(Mp6Parts {
        delta_a: da,
        delta_b: db,
        q,
        denominator: 1.0 - 0.5 * q.norm_sqr(),
        half_mu_comm: 0.5 * (mu * setup.commutator_expectation()).re,
    })
}

/// Product bound Δ(A)Δ(B) ≥ (μ/2)⟨[A,B]⟩ / (1 − ½|⟨ψ|Q_μ|φ⟩|²) with
/// Q_μ = A/Δ(A) + μB/Δ(B), and its division-free form
/// 1 − ½|⟨ψ|Q_μ|φ⟩|² ≥ (μ/2)⟨[A,B]⟩ / (Δ(A)Δ(B)).
///
/// The division-free report is always produced. The product form is only
/// produced when the denominator exceeds the tolerance; its comparison scale
/// grows like 1/denominator.
pub fn mp6(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    phi: &PureState,
    tol: &Tolerance,
) -> Result<Mp6Report> {
    check_tol(tol)?;
    let setup = MpSetup::new(a, b, psi, phi)?;
    let choice = mu_from_commutator(setup.commutator_expectation(), tol);
    let parts = mp6_parts(a, b, &setup, choice.mu, tol)?;
    let digest = setup.digest("mp6", a, b, psi, phi).finish();
    let reformulated = BoundReport::evaluate(
        BoundKind::Mp6Reformulated,
        parts.denominator,
        parts.half_mu_comm / (parts.delta_a * parts.delta_b),
        1.0,
        tol,
        digest.clone(),
    )?;
    let product = if parts.denominator > tol.effective(1.0) {
        ProductForm::Report(BoundReport::evaluate(
            BoundKind::Mp6Product,
            parts.delta_a * parts.delta_b,
            parts.half_mu_comm / parts.denominator,
            (1.0 / parts.denominator).max(1.0),
            tol,
            digest,
        )?)
    } else {
        ProductForm::DenominatorDegenerate {
            denominator: parts.denominator,
        }
    };
    Ok(Mp6Report {
        mu: choice,
        reformulated,
        product,
    })
}

/// ⟨ψ|A|φ⟩ / ⟨ψ|B|φ⟩, or `None` when the denominator vanishes.
///
/// The chain's last step is tight for the unit-modulus μ pointing along this
/// ratio; when |⟨ψ|A|φ⟩| = |⟨ψ|B|φ⟩| the ratio itself has modulus 1.
pub fn ratio_mu(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    phi: &PureState,
) -> Result<Option<Complex64>> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), psi.dim())?;
    check_dim(a.dim(), phi.dim())?;
    let c = psi.matrix_element(a.matrix().as_matrix(), phi);
    let d = psi.matrix_element(b.matrix().as_matrix(), phi);
    Ok((d.norm() > f64::EPSILON * (1.0 + c.norm())).then(|| c / d))
}
