//! Equality decisions and saturating constructions.
//!
//! Each checker decides equality from the algebraic characterization of the
//! equality case (a dependence test or a parallelism test on deviation
//! vectors) and then cross-checks that decision against the numeric slack of
//! the matching [`BoundReport`]. The two can legitimately disagree only in a
//! thin band where the slack is within tolerance but the vectors are not (the
//! slack is quadratic in the vector residual). A disagreement outside that
//! band is reported as [`Error::InconsistentSaturation`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{commutator, complex_fit, phase_fit, ComplexMatrix, ComplexVector};
use crate::relations::{
    check_mu, check_tol, mp6_parts, mp_chain, mu_from_commutator, robertson, schrodinger,
    BoundKind, BoundReport, ChainReport, MpSetup,
};
use crate::state::{center, check_dim, DeviationPair, Observable, PureState, QuantumState};
use crate::tolerance::{Tolerance, CONSTRUCTION_TOL, NORM_TOL};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Powers of ρ at which the mixed equality conditions are re-verified.
pub const DEFAULT_R_LIST: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

/// Extra slack granted to the r-checks relative to the primary r = 1/2 test.
const R_CHECK_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    RobertsonPure,
    RobertsonMixed,
    Schrodinger,
    MpChainAll,
    Mp3,
    Mp6,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RCheck {
    pub r: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationCertificate {
    pub kind: CertificateKind,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub mu: Option<Complex64>,
    pub residual: f64,
    /// Per-power residuals; empty for the pure-state kinds.
    pub r_checked: Vec<RCheck>,
}

/// Outcome of a scalar equality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationCheck {
    pub saturated: bool,
    /// Component of the deviation vector orthogonal to the allowed direction.
    pub residual: f64,
    /// Norm of the deviation vector.
    pub lhs: f64,
    /// Length of its projection on φ as predicted by the bound.
    pub rhs: f64,
}

/// Disagreement between checker and report is tolerated only while the
/// slack implied by the checker's residual stays within 2·tol of the reported slack.
fn cross_check(
    kind: BoundKind,
    decided: bool,
    report: &BoundReport,
    predicted_slack: f64,
) -> Result<()> {
    if decided == report.saturated {
        return Ok(());
    }
    let gap = (predicted_slack - report.slack).abs();
    if gap > 2.0 * report.threshold() {
        return Err(Error::InconsistentSaturation {
            bound: kind,
            detail: format!(
                "checker says {decided}, report slack {:.3e} (predicted {predicted_slack:.3e})",
                report.slack
            ),
        });
    }
    Ok(())
}

fn check_r_list(r_list: &[f64]) -> Result<()> {
    if r_list.is_empty() || r_list.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidConfig(format!(
            "r list must be nonempty and positive, got {r_list:?}"
        )));
    }
    Ok(())
}

fn as_column(v: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

/// Slack of Δ(A)Δ(B) ≥ |Im⟨x,y⟩| implied by the smaller singular value σ of
/// the realified pair [x | i·y], with a = ‖x‖, b = ‖y‖.
fn robertson_slack_from_sigma(a: f64, b: f64, sigma: f64) -> f64 {
    let det = sigma * sigma * (a * a + b * b - sigma * sigma).max(0.0);
    let lhs = a * b;
    let rhs = (lhs * lhs - det).max(0.0).sqrt();
    if lhs + rhs > 0.0 {
        det / (lhs + rhs)
    } else {
        0.0
    }
}

fn robertson_fit(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
) -> Result<Option<(f64, f64, DeviationPair)>> {
    let report = robertson(a, b, s, tol)?;
    let pair = DeviationPair::new(a, b, s)?;
    let fit = phase_fit(&pair.x, &pair.y);
    let (na, nb) = (pair.x.norm(), pair.y.norm());
    let bound = tol.effective(na.max(nb).max(1.0));
    let dependent = fit.sigma_min <= bound && fit.residual <= bound;
    cross_check(
        BoundKind::Robertson,
        dependent,
        &report,
        robertson_slack_from_sigma(na, nb, fit.sigma_min),
    )?;
    Ok(dependent.then_some((fit.theta, fit.residual, pair)))
}

/// Equality in Δ(A)Δ(B) ≥ |⟨[A,B]⟩|/2 for a pure state: some ϑ with
/// (cosϑ·Ã + i·sinϑ·B̃)|ψ⟩ = 0.
pub fn robertson_saturation_pure(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    tol: &Tolerance,
) -> Result<Option<SaturationCertificate>> {
    check_tol(tol)?;
    let s = QuantumState::Pure(psi.clone());
    Ok(
        robertson_fit(a, b, &s, tol)?.map(|(theta, residual, _)| SaturationCertificate {
            kind: CertificateKind::RobertsonPure,
            theta: Some(theta),
            phi: None,
            mu: None,
            residual,
            r_checked: Vec::new(),
        }),
    )
}

/// Re-evaluates ‖(cosϑ·Ã + coeff·B̃)ρ^r‖_F for each r.
fn r_checks(
    pair: &DeviationPair,
    s: &QuantumState,
    cos: f64,
    coeff: Complex64,
    r_list: &[f64],
    tol: &Tolerance,
) -> Result<Vec<RCheck>> {
    let rho = s.to_density();
    let mut out = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let p = rho.power(r)?;
        let x = pair.a.matrix.as_matrix() * &p;
        let y = pair.b.matrix.as_matrix() * &p;
        let scale = x.norm().max(y.norm()).max(1.0);
        let residual = (x.scale(cos) + y * coeff).norm();
        if residual > R_CHECK_FACTOR * tol.effective(scale) {
            return Err(Error::RIndependenceViolation { r, residual });
        }
        out.push(RCheck { r, residual });
    }
    Ok(out)
}

/// Mixed-state Robertson equality: ϑ from the pair Ãρ^{1/2}, B̃ρ^{1/2}, then
/// (cosϑ·Ã + i·sinϑ·B̃)ρ^r = 0 re-verified for every r in `r_list`.
pub fn robertson_saturation_mixed(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
    r_list: &[f64],
) -> Result<Option<SaturationCertificate>> {
    check_tol(tol)?;
    check_r_list(r_list)?;
    let Some((theta, residual, pair)) = robertson_fit(a, b, s, tol)? else {
        return Ok(None);
    };
    let (sin, cos) = theta.sin_cos();
    let r_checked = r_checks(&pair, s, cos, I * sin, r_list, tol)?;
    Ok(Some(SaturationCertificate {
        kind: CertificateKind::RobertsonMixed,
        theta: Some(theta),
        phi: None,
        mu: None,
        residual,
        r_checked,
    }))
}

/// Schrödinger equality: (cosϑ·Ã + e^{iφ}·sinϑ·B̃)ρ^r = 0, detected on
/// r = 1/2 and re-verified for every r in `r_list`.
pub fn schrodinger_saturation(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
    r_list: &[f64],
) -> Result<Option<SaturationCertificate>> {
    check_tol(tol)?;
    check_r_list(r_list)?;
    let report = schrodinger(a, b, s, tol)?;
    let pair = DeviationPair::new(a, b, s)?;
    let fit = complex_fit(&as_column(&pair.x), &as_column(&pair.y))?;
    let bound = tol.effective(pair.x.norm().max(pair.y.norm()).max(1.0));
    let dependent = fit.sigma_min <= bound && fit.residual <= bound;
    let predicted = (fit.sigma_min * fit.sigma_max).powi(2);
    cross_check(BoundKind::Schrodinger, dependent, &report, predicted)?;
    if !dependent {
        return Ok(None);
    }
    let coeff = Complex64::from_polar(fit.theta.sin(), fit.phi);
    let r_checked = r_checks(&pair, s, fit.theta.cos(), coeff, r_list, tol)?;
    Ok(Some(SaturationCertificate {
        kind: CertificateKind::Schrodinger,
        theta: Some(fit.theta),
        phi: Some(fit.phi),
        mu: None,
        residual: fit.residual,
        r_checked,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSaturation {
    pub report: ChainReport,
    pub steps: [bool; 3],
    /// Step 1: ‖(u₂…, v₂…)‖; step 2: ||c| − |d||; step 3: |c| + |d| − |c + μd|.
    pub residuals: [f64; 3],
    /// ‖(A − μ*B)ψ − (α − μ*β)ψ‖.
    pub eigen_residual: f64,
    pub certificate: Option<SaturationCertificate>,
}

/// Equality in each step of the three-step chain, and in all of them at once.
pub fn mp_chain_saturation(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    phi: &PureState,
    mu: Complex64,
    tol: &Tolerance,
) -> Result<ChainSaturation> {
    let report = mp_chain(a, b, psi, phi, mu, tol)?;
    let f = &report.frame;
    let tail = |w: &[Complex64]| w.iter().skip(1).map(|z| z.norm_sqr()).sum::<f64>();
    let r1 = (tail(&f.u) + tail(&f.v)).sqrt();
    let (nc, nd) = (f.c.norm(), f.d.norm());
    let r2 = (nc - nd).abs();
    let aligned = (f.c + mu * f.d).norm();
    // (|c|+|d|)² − |c+μd|² = 2(|c||d| − Re(c̄μd)), divided by (|c|+|d|) + |c+μd|
    let excess = 2.0 * (nc * nd - (f.c.conj() * mu * f.d).re).max(0.0);
    let r3 = if excess > 0.0 {
        excess / (nc + nd + aligned)
    } else {
        0.0
    };

    let state = QuantumState::Pure(psi.clone());
    let pair = DeviationPair::new(a, b, &state)?;
    let (da, db) = (pair.delta_a(), pair.delta_b());
    let bound = tol.effective((da + db).max(1.0));
    let steps = [r1 <= bound, r2 <= bound, r3 <= bound];
    let predicted = [r1 * r1, 0.5 * r2 * r2, 0.5 * r3 * (nc + nd + aligned)];
    for k in 0..3 {
        cross_check(
            report.steps[k].kind,
            steps[k],
            &report.steps[k],
            predicted[k],
        )?;
    }
    let eigen_residual = (&pair.x - &pair.y * mu.conj()).norm();
    let certificate =
        (steps.iter().all(|&s| s) && eigen_residual <= bound).then(|| SaturationCertificate {
            kind: CertificateKind::MpChainAll,
            theta: None,
            phi: None,
            mu: Some(mu),
            residual: eigen_residual,
            r_checked: Vec::new(),
        });
    Ok(ChainSaturation {
        steps,
        residuals: [r1, r2, r3],
        eigen_residual,
        certificate,
        report,
    })
}

fn check_mu_pm_i(mu: Complex64) -> Result<()> {
    check_mu(mu)?;
    if (mu - I).norm() > NORM_TOL && (mu + I).norm() > NORM_TOL {
        return Err(Error::InvalidConfig(format!("μ must be i or −i, got {mu}")));
    }
    Ok(())
}

/// ‖w‖, |⟨φ|w⟩| and the part of w outside span{ψ, φ}.
fn split_along(w: &ComplexVector, psi: &PureState, phi: &PureState) -> (f64, f64, f64) {
    let along_phi = phi.amplitudes().dotc(w);
    let along_psi = psi.amplitudes().dotc(w);
    let perp = w - phi.amplitudes() * along_phi - psi.amplitudes() * along_psi;
    (w.norm(), along_phi.norm(), perp.norm())
}

fn hypothesis(setup: &MpSetup, mu: Complex64, tol: &Tolerance) -> Result<()> {
    let value = (mu * setup.commutator_expectation()).re;
    if value < -tol.effective(1.0) {
        return Err(Error::HypothesisViolated { value });
    }
    Ok(())
}

/// Equality in the sum bound: (Ã − μB̃)|ψ⟩ must be parallel to |φ⟩, i.e.
/// ‖(Ã − μB̃)ψ‖ = |⟨ψ|A + μB|φ⟩|.
pub fn mp3_saturation(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    phi: &PureState,
    mu: Complex64,
    tol: &Tolerance,
) -> Result<SaturationCheck> {
    check_tol(tol)?;
    check_mu_pm_i(mu)?;
    let setup = MpSetup::new(a, b, psi, phi)?;
    hypothesis(&setup, mu, tol)?;
    let report = crate::relations::mp3_with(&setup, mu, tol, String::new())?;
    let w = &setup.pair.x - &setup.pair.y * mu;
    let (norm, _, perp) = split_along(&w, psi, phi);
    let rhs = (setup.frame.c + mu * setup.frame.d).norm();
    let saturated = perp <= tol.effective(norm.max(1.0));
    cross_check(BoundKind::Mp3, saturated, &report, perp * perp)?;
    Ok(SaturationCheck {
        saturated,
        residual: perp,
        lhs: norm,
        rhs,
    })
}

/// Equality in the product bound: (Ã/Δ(A) − μB̃/Δ(B))|ψ⟩ must be parallel
/// to |φ⟩, i.e. its norm equals |⟨ψ|Q_μ|φ⟩|.
pub fn mp6_saturation(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    phi: &PureState,
    mu: Complex64,
    tol: &Tolerance,
) -> Result<SaturationCheck> {
    check_tol(tol)?;
    check_mu_pm_i(mu)?;
    let setup = MpSetup::new(a, b, psi, phi)?;
    hypothesis(&setup, mu, tol)?;
    let parts = mp6_parts(a, b, &setup, mu, tol)?;
    let report = BoundReport::evaluate(
        BoundKind::Mp6Reformulated,
        parts.denominator,
        parts.half_mu_comm / (parts.delta_a * parts.delta_b),
        1.0,
        tol,
        String::new(),
    )?;
    let w = setup.pair.x.unscale(parts.delta_a) - setup.pair.y.unscale(parts.delta_b) * mu;
    let (norm, _, perp) = split_along(&w, psi, phi);
    let saturated = perp <= tol.effective(norm.max(1.0));
    cross_check(
        BoundKind::Mp6Reformulated,
        saturated,
        &report,
        0.5 * perp * perp,
    )?;
    Ok(SaturationCheck {
        saturated,
        residual: perp,
        lhs: norm,
        rhs: parts.q.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Mp3,
    Mp6,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedPair {
    pub mu: Complex64,
    pub psi: PureState,
    pub phi: PureState,
    pub target: Target,
    /// lhs − rhs of the target inequality at (ψ, φ).
    pub achieved_slack: f64,
    /// |achieved_slack| over the report scale max(1, |lhs|, |rhs|).
    pub relative_gap: f64,
    /// The construction fell back to φ = e₂ because its direction vector vanished.
    pub degenerate: bool,
    pub check: SaturationCheck,
}

impl ConstructedPair {
    pub fn saturates(&self) -> bool {
        self.relative_gap <= CONSTRUCTION_TOL && self.check.saturated
    }
}

/// Tails (entries 2..n) of the first columns of A and B.
fn first_column_tails(a: &Observable, b: &Observable) -> (ComplexVector, ComplexVector) {
    let n = a.dim();
    let am = a.matrix().as_matrix();
    let bm = b.matrix().as_matrix();
    (
        am.view((1, 0), (n - 1, 1)).column(0).into_owned(),
        bm.view((1, 0), (n - 1, 1)).column(0).into_owned(),
    )
}

/// μ from the sign of the (1,1) entry of [A,B].
fn corner_mu(a: &Observable, b: &Observable, tol: &Tolerance) -> Complex64 {
    let comm = commutator(a.matrix().as_matrix(), b.matrix().as_matrix());
    mu_from_commutator(Complex64::new(0.0, comm[(0, 0)].im), tol).mu
}

/// (0, w/‖w‖), or e₂ with the degenerate flag when ‖w‖ is within `cutoff`.
fn lifted(w: &ComplexVector, cutoff: f64) -> Result<(PureState, bool)> {
    let n = w.len() + 1;
    let norm = w.norm();
    if norm <= cutoff {
        return Ok((PureState::basis(n, 1), true));
    }
    let mut v = ComplexVector::zeros(n);
    v.rows_mut(1, n - 1).copy_from(&w.unscale(norm));
    Ok((PureState::normalized(v)?, false))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    a: &Observable,
    b: &Observable,
    target: Target,
    mu: Complex64,
    psi: PureState,
    phi: PureState,
    degenerate: bool,
    tol: &Tolerance,
) -> Result<ConstructedPair> {
    let (report, check) = match target {
        Target::Mp3 => {
            let setup = MpSetup::new(a, b, &psi, &phi)?;
            let report = crate::relations::mp3_with(&setup, mu, tol, String::new())?;
            (report, mp3_saturation(a, b, &psi, &phi, mu, tol)?)
        }
        Target::Mp6 => {
            let setup = MpSetup::new(a, b, &psi, &phi)?;
            let parts = mp6_parts(a, b, &setup, mu, tol)?;
            let report = BoundReport::evaluate(
                BoundKind::Mp6Reformulated,
                parts.denominator,
                parts.half_mu_comm / (parts.delta_a * parts.delta_b),
                1.0,
                tol,
                String::new(),
            )?;
            (report, mp6_saturation(a, b, &psi, &phi, mu, tol)?)
        }
    };
    Ok(ConstructedPair {
        mu,
        psi,
        phi,
        target,
        achieved_slack: report.slack,
        relative_gap: report.slack.abs() / report.scale,
        degenerate,
        check,
    })
}

fn require_dim(
    a: &Observable,
    b: &Observable,
    ok: impl Fn(usize) -> bool,
    expected: usize,
) -> Result<usize> {
    check_dim(a.dim(), b.dim())?;
    let n = a.dim();
    if !ok(n) {
        return Err(Error::DimensionMismatch { expected, found: n });
    }
    Ok(n)
}

/// Qubit pair ψ = e₁, φ = e₂ for the sum bound.
pub fn construct_case1(a: &Observable, b: &Observable, tol: &Tolerance) -> Result<ConstructedPair> {
    check_tol(tol)?;
    require_dim(a, b, |n| n == 2, 2)?;
    let mu = corner_mu(a, b, tol);
    finish(
        a,
        b,
        Target::Mp3,
        mu,
        PureState::basis(2, 0),
        PureState::basis(2, 1),
        false,
        tol,
    )
}

/// ψ = e₁ and φ = (0, u − μv)/‖u − μv‖ for the sum bound, with u, v the
/// first-column tails of A, B. Then (Ã − μB̃)e₁ = (0, u − μv) is parallel to φ
/// by construction, and ⟨φ|(A − μB)|ψ⟩ is real and non-negative.
///
/// Works for every n ≥ 2; for n = 2 it agrees with [`construct_case1`] up to a phase of φ.
pub fn construct_case2(a: &Observable, b: &Observable, tol: &Tolerance) -> Result<ConstructedPair> {
    check_tol(tol)?;
    let n = require_dim(a, b, |n| n >= 2, 2)?;
    let mu = corner_mu(a, b, tol);
    let (u, v) = first_column_tails(a, b);
    let w = &u - &v * mu;
    let (phi, degenerate) = lifted(&w, tol.effective((u.norm() + v.norm()).max(1.0)))?;
    finish(
        a,
        b,
        Target::Mp3,
        mu,
        PureState::basis(n, 0),
        phi,
        degenerate,
        tol,
    )
}

/// Row-based variant of [`construct_case2`]: φ ∝ (0, u + μv), which makes the
/// first row of V†(A − μB)V vanish past its second entry. It coincides with
/// the column-based pair for n = 2 but does not saturate the sum bound in
/// general; kept so the difference can be measured.
pub fn construct_case2_row(
    a: &Observable,
    b: &Observable,
    tol: &Tolerance,
) -> Result<ConstructedPair> {
    check_tol(tol)?;
    let n = require_dim(a, b, |n| n >= 2, 2)?;
    let mu = corner_mu(a, b, tol);
    let (u, v) = first_column_tails(a, b);
    let w = &u + &v * mu;
    let (phi, degenerate) = lifted(&w, tol.effective((u.norm() + v.norm()).max(1.0)))?;
    finish(
        a,
        b,
        Target::Mp3,
        mu,
        PureState::basis(n, 0),
        phi,
        degenerate,
        tol,
    )
}

/// ψ = e₁ and φ ∝ (0, u/‖u‖ − μv/‖v‖) for the product bound.
pub fn construct_w_mp6(a: &Observable, b: &Observable, tol: &Tolerance) -> Result<ConstructedPair> {
    check_tol(tol)?;
    let n = require_dim(a, b, |n| n >= 2, 2)?;
    let (u, v) = first_column_tails(a, b);
    let (nu, nv) = (u.norm(), v.norm());
    if nu <= tol.effective(a.matrix().frobenius_norm().max(1.0)) {
        return Err(Error::ZeroDeviation {
            observable: "A",
            deviation: nu,
        });
    }
    if nv <= tol.effective(b.matrix().frobenius_norm().max(1.0)) {
        return Err(Error::ZeroDeviation {
            observable: "B",
            deviation: nv,
        });
    }
    let mu = corner_mu(a, b, tol);
    let w = u.unscale(nu) - v.unscale(nv) * mu;
    let (phi, degenerate) = lifted(&w, tol.effective(1.0))?;
    finish(
        a,
        b,
        Target::Mp6,
        mu,
        PureState::basis(n, 0),
        phi,
        degenerate,
        tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroWitness {
    A,
    B,
    Both,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroProduct {
    pub product_is_zero: bool,
    pub witness: ZeroWitness,
    pub delta_a: f64,
    pub delta_b: f64,
    /// ‖Ãρ‖_F.
    pub centered_a: f64,
    pub centered_b: f64,
}

struct ZeroTest {
    zero: bool,
    delta: f64,
    centered: f64,
    centered_matrix_norm: f64,
    threshold: f64,
}

/// Decides Δ(A) = 0 and cross-checks it against ‖Ãρ‖_F = 0 using
/// ‖Ãρ‖_F ≤ Δ(A) ≤ (‖Ã‖_F·‖Ãρ‖_F)^{1/2}.
fn zero_test(
    a: &Observable,
    s: &QuantumState,
    rho: &ComplexMatrix,
    tol: &Tolerance,
    label: &str,
) -> Result<ZeroTest> {
    let c = center(a, s)?;
    let delta = s.deviation_vector(&c.matrix).norm();
    let centered = (c.matrix.as_matrix() * rho).norm();
    let norm = c.matrix.frobenius_norm();
    let threshold = tol.effective(a.matrix().frobenius_norm().max(1.0));
    let zero = delta <= threshold;
    if zero != (centered <= threshold)
        && (centered > delta + threshold || delta > (norm * centered).sqrt() + threshold)
    {
        return Err(Error::InconsistentCharacterization {
            detail: format!("{label}: Δ = {delta:.3e} but ‖Ãρ‖ = {centered:.3e}"),
        });
    }
    Ok(ZeroTest {
        zero,
        delta,
        centered,
        centered_matrix_norm: norm,
        threshold,
    })
}

fn zero_tests(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
) -> Result<(ZeroTest, ZeroTest)> {
    check_tol(tol)?;
    check_dim(a.dim(), b.dim())?;
    let rho = s.to_density();
    let rho = rho.matrix().as_matrix();
    Ok((
        zero_test(a, s, rho, tol, "A")?,
        zero_test(b, s, rho, tol, "B")?,
    ))
}

/// Δ(A)Δ(B) = 0 exactly when Ãρ = 0 or B̃ρ = 0.
pub fn zero_product_characterization(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
) -> Result<ZeroProduct> {
    let (ta, tb) = zero_tests(a, b, s, tol)?;
    let witness = match (ta.zero, tb.zero) {
        (true, true) => ZeroWitness::Both,
        (true, false) => ZeroWitness::A,
        (false, true) => ZeroWitness::B,
        (false, false) => ZeroWitness::None,
    };
    Ok(ZeroProduct {
        product_is_zero: ta.zero || tb.zero,
        witness,
        delta_a: ta.delta,
        delta_b: tb.delta,
        centered_a: ta.centered,
        centered_b: tb.centered,
    })
}

/// Δ(A)² + Δ(B)² = 0 exactly when Ãρ = B̃ρ = 0.
pub fn zero_sum_characterization(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
) -> Result<bool> {
    let (ta, tb) = zero_tests(a, b, s, tol)?;
    Ok(ta.zero && tb.zero)
}

/// For qubit observables with Ãρ = B̃ρ = 0, A and B commute. Returns
/// ‖[A,B]‖_F when the precondition holds and `None` otherwise.
///
/// The allowance on ‖[A,B]‖_F propagates the residuals ε = ‖Ãρ‖_F through
/// ‖ÃP‖ ≤ ε/λ, where P projects onto the support of ρ and λ is its smallest
/// nonzero eigenvalue.
pub fn qubit_commutation_witness(
    a: &Observable,
    b: &Observable,
    s: &QuantumState,
    tol: &Tolerance,
) -> Result<Option<f64>> {
    require_dim(a, b, |n| n == 2, 2)?;
    let (ta, tb) = zero_tests(a, b, s, tol)?;
    if !(ta.centered <= ta.threshold && tb.centered <= tb.threshold) {
        return Ok(None);
    }
    let rho = s.to_density();
    let floor = crate::matrix::psd_floor(rho.matrix());
    let lambda = rho
        .eigen()
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l > floor)
        .fold(f64::INFINITY, f64::min);
    let (ea, eb) = (ta.centered, tb.centered);
    let (na, nb) = (ta.centered_matrix_norm, tb.centered_matrix_norm);
    let bound = std::f64::consts::SQRT_2
        * (18.0 * ea * eb / (lambda * lambda) + 6.0 * (na * eb + nb * ea) / lambda)
        + tol.effective((na * nb).max(1.0));
    let commutator_norm = commutator(a.matrix().as_matrix(), b.matrix().as_matrix()).norm();
    if commutator_norm > bound {
        return Err(Error::CorollaryViolation {
            commutator_norm,
            bound,
        });
    }
    Ok(Some(commutator_norm))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::golden::{block4, sigma_x, sigma_y, sigma_z};
    use crate::matrix::HermitianMatrix;
    use crate::sampling::{self, bloch_partner, bloch_state};
    use crate::state::DensityMatrix;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn ket(k: usize) -> PureState {
        PureState::basis(2, k)
    }

    fn plus() -> PureState {
        PureState::from_slice(&[
            Complex64::from(FRAC_1_SQRT_2),
            Complex64::from(FRAC_1_SQRT_2),
        ])
        .unwrap()
    }

    fn minus() -> PureState {
        PureState::from_slice(&[
            Complex64::from(FRAC_1_SQRT_2),
            Complex64::from(-FRAC_1_SQRT_2),
        ])
        .unwrap()
    }

    fn diag(d: &[f64]) -> Observable {
        Observable::from_hermitian(HermitianMatrix::from_real_diagonal(d), "")
    }

    #[test]
    fn robertson_pure_examples() {
        let (x, y) = (sigma_x(), sigma_y());
        let c = robertson_saturation_pure(&x, &y, &ket(0), &tol())
            .unwrap()
            .unwrap();
        assert!((c.theta.unwrap() - FRAC_PI_4).abs() < 1e-12);
        let c = robertson_saturation_pure(&x, &y, &ket(1), &tol())
            .unwrap()
            .unwrap();
        assert!((c.theta.unwrap() - 7.0 * FRAC_PI_4).abs() < 1e-12);
        // Δ(σx) = 0 at |+⟩, so ϑ = 0 works with zero residual
        let c = robertson_saturation_pure(&x, &y, &plus(), &tol())
            .unwrap()
            .unwrap();
        assert_eq!(c.theta, Some(0.0));
        assert!(c.residual < 1e-15);
        assert!(
            robertson_saturation_pure(&x, &y, &bloch_state(1.0, 0.3), &tol())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn robertson_mixed_examples() {
        let (a, b, rho) = block4();
        let c = robertson_saturation_mixed(&a, &b, &rho.into(), &tol(), &DEFAULT_R_LIST)
            .unwrap()
            .unwrap();
        assert!((c.theta.unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert_eq!(c.r_checked.len(), 4);
        assert!(c.r_checked.iter().all(|rc| rc.residual < 1e-12));

        let full = DensityMatrix::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from(0.7),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                Complex64::from(0.3),
            ],
        ))
        .unwrap();
        let (x, y) = (sigma_x(), sigma_y());
        assert!(
            robertson_saturation_mixed(&x, &y, &full.into(), &tol(), &DEFAULT_R_LIST)
                .unwrap()
                .is_none()
        );

        let c =
            robertson_saturation_mixed(&x, &y, &ket(0).projector().into(), &tol(), &DEFAULT_R_LIST)
                .unwrap()
                .unwrap();
        assert!((c.theta.unwrap() - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn schrodinger_examples() {
        let (x, y) = (sigma_x(), sigma_y());
        let c = schrodinger_saturation(&x, &y, &ket(0).projector().into(), &tol(), &DEFAULT_R_LIST)
            .unwrap()
            .unwrap();
        assert!((c.theta.unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert!((c.phi.unwrap() - FRAC_PI_2).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = sampling::random_hermitian_with(3, &mut rng);
        let rho: QuantumState = sampling::random_density_with(3, 3, &mut rng)
            .unwrap()
            .into();
        let c = schrodinger_saturation(&a, &a, &rho, &tol(), &DEFAULT_R_LIST)
            .unwrap()
            .unwrap();
        assert!((c.theta.unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert!((c.phi.unwrap() - PI).abs() < 1e-12);

        let b = sampling::random_hermitian_with(3, &mut rng);
        assert!(
            schrodinger_saturation(&a, &b, &rho, &tol(), &DEFAULT_R_LIST)
                .unwrap()
                .is_none()
        );
        assert!(schrodinger_saturation(&a, &b, &rho, &tol(), &[]).is_err());
    }

    #[test]
    fn chain_examples() {
        let (x, y) = (sigma_x(), sigma_y());
        let s = mp_chain_saturation(
            &x,
            &y,
            &bloch_state(0.0, 1.0),
            &bloch_partner(0.0, 1.0),
            I,
            &tol(),
        )
        .unwrap();
        assert_eq!(s.steps, [true; 3]);
        assert!(s.eigen_residual < 1e-12);
        assert!(s.certificate.is_some());

        for &theta in &[0.4, 1.3, 2.2] {
            let s = mp_chain_saturation(
                &x,
                &y,
                &bloch_state(theta, FRAC_PI_4),
                &bloch_partner(theta, FRAC_PI_4),
                I,
                &tol(),
            )
            .unwrap();
            assert!(s.steps[0] && s.steps[1]);
            assert!(s.residuals[1] < 1e-12);
        }
        let s = mp_chain_saturation(
            &x,
            &y,
            &bloch_state(1.0, 0.3),
            &bloch_partner(1.0, 0.3),
            I,
            &tol(),
        )
        .unwrap();
        assert!(!s.steps[1]);
        assert!(s.certificate.is_none());
    }

    #[test]
    fn chain_certificate_needs_step_one() {
        // in ℂ³ the eigenvector condition alone does not force the tails of u, v to vanish
        let a = diag(&[0.0, 1.0, -1.0]);
        let psi = PureState::from_slice(&[
            Complex64::from(0.0),
            Complex64::from(FRAC_1_SQRT_2),
            Complex64::from(FRAC_1_SQRT_2),
        ])
        .unwrap();
        let phi = PureState::basis(3, 0);
        let s = mp_chain_saturation(&a, &a, &psi, &phi, Complex64::from(1.0), &tol()).unwrap();
        assert!(s.eigen_residual < 1e-15);
        assert!(!s.steps[0]);
        assert!(s.certificate.is_none());
    }

    #[test]
    fn mp3_checker_examples() {
        let (x, y) = (sigma_x(), sigma_y());
        let c = mp3_saturation(&x, &y, &ket(0), &ket(1), -I, &tol()).unwrap();
        assert!(c.saturated && c.lhs < 1e-15 && c.rhs < 1e-15);
        let c = mp3_saturation(&x, &y, &plus(), &minus(), I, &tol()).unwrap();
        assert!(c.saturated);
        assert!((c.lhs - 1.0).abs() < 1e-15 && (c.rhs - 1.0).abs() < 1e-15);
        // n = 2 with ψ ⟂ φ spanning ℂ²: always saturated
        let c = mp3_saturation(&x, &sigma_z(), &ket(0), &ket(1), I, &tol()).unwrap();
        assert!(c.saturated);
        assert!(matches!(
            mp3_saturation(&x, &y, &ket(0), &ket(1), I, &tol()),
            Err(Error::HypothesisViolated { .. })
        ));
        assert!(mp3_saturation(&x, &y, &ket(0), &ket(1), Complex64::from(1.0), &tol()).is_err());
    }

    #[test]
    fn mp6_checker_examples() {
        let (x, y) = (sigma_x(), sigma_y());
        let c = mp6_saturation(&x, &y, &ket(0), &ket(1), -I, &tol()).unwrap();
        assert!(c.saturated && c.lhs < 1e-15 && c.rhs < 1e-15);
        assert!(matches!(
            mp6_saturation(&x, &y, &plus(), &minus(), I, &tol()),
            Err(Error::ZeroDeviation {
                observable: "A",
                ..
            })
        ));
    }

    #[test]
    fn case1_examples() {
        let p = construct_case1(&sigma_x(), &sigma_y(), &tol()).unwrap();
        assert_eq!(p.mu, -I);
        assert!(p.achieved_slack.abs() < 1e-12);
        assert!(p.saturates());
        let p = construct_case1(&sigma_z(), &sigma_z(), &tol()).unwrap();
        assert_eq!(p.mu, I);
        assert_eq!(p.achieved_slack, 0.0);
        assert!(construct_case1(&diag(&[1.0, 2.0, 3.0]), &diag(&[1.0, 2.0, 3.0]), &tol()).is_err());
    }

    /// B with first column −i times that of A, which forces μ = i and u − μv = 0.
    fn degenerate_pair(n: usize, seed: u64) -> (Observable, Observable) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sampling::random_hermitian_with(n, &mut rng);
        let mut bm = sampling::random_hermitian_with(n, &mut rng)
            .matrix()
            .as_matrix()
            .clone();
        let am = a.matrix().as_matrix();
        for k in 1..n {
            bm[(k, 0)] = -I * am[(k, 0)];
            bm[(0, k)] = bm[(k, 0)].conj();
        }
        (a, Observable::new(bm, "").unwrap())
    }

    #[test]
    fn case2_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = sampling::random_hermitian_with(4, &mut rng);
        let b = sampling::random_hermitian_with(4, &mut rng);
        let p = construct_case2(&a, &b, &tol()).unwrap();
        assert!(p.relative_gap <= 1e-8, "{}", p.relative_gap);
        assert!(!p.degenerate && p.saturates());
        assert!(p.psi.overlap(&p.phi).norm() < 1e-12);

        let p = construct_case2(&diag(&[1.0, 2.0, 3.0]), &diag(&[0.0, 5.0, 1.0]), &tol()).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.phi, PureState::basis(3, 1));
        assert!(p.achieved_slack.abs() < 1e-12);

        let (a4, b4, _) = block4();
        assert!(construct_case2(&a4, &b4, &tol()).unwrap().saturates());

        let (a, b) = degenerate_pair(5, 3);
        let p = construct_case2(&a, &b, &tol()).unwrap();
        assert_eq!(p.mu, I);
        assert!(p.degenerate && p.saturates());
    }

    #[test]
    fn case2_row_variant_misses_generically() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = sampling::random_hermitian_with(4, &mut rng);
        let b = sampling::random_hermitian_with(4, &mut rng);
        let p = construct_case2_row(&a, &b, &tol()).unwrap();
        assert!(p.relative_gap > 1e-6);
        // in ℂ² both readings pick φ ∝ e₂
        let a = sampling::random_hermitian_with(2, &mut rng);
        let b = sampling::random_hermitian_with(2, &mut rng);
        assert!(construct_case2_row(&a, &b, &tol()).unwrap().saturates());
    }

    #[test]
    fn w_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = sampling::random_hermitian_with(4, &mut rng);
        let b = sampling::random_hermitian_with(4, &mut rng);
        let p = construct_w_mp6(&a, &b, &tol()).unwrap();
        assert!(p.saturates(), "{}", p.relative_gap);

        let p = construct_w_mp6(&sigma_x(), &sigma_y(), &tol()).unwrap();
        assert!(p.degenerate && p.saturates());

        let (a, b) = degenerate_pair(4, 8);
        let p = construct_w_mp6(&a, &b, &tol()).unwrap();
        assert!(p.degenerate && p.saturates());
        assert!(p.check.residual < 1e-12);

        assert!(matches!(
            construct_w_mp6(&sigma_z(), &sigma_x(), &tol()),
            Err(Error::ZeroDeviation {
                observable: "A",
                ..
            })
        ));
    }

    #[test]
    fn zero_characterization_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (a, b, rho) = sampling::block_scalar_with(5, 2, &mut rng).unwrap();
        let s: QuantumState = rho.into();
        let z = zero_product_characterization(&a, &b, &s, &tol()).unwrap();
        assert!(z.product_is_zero);
        assert_eq!(z.witness, ZeroWitness::Both);
        assert!(zero_sum_characterization(&a, &b, &s, &tol()).unwrap());

        let mixed: QuantumState = DensityMatrix::maximally_mixed(2).into();
        let z = zero_product_characterization(&sigma_x(), &sigma_y(), &mixed, &tol()).unwrap();
        assert!(!z.product_is_zero);
        assert_eq!(z.witness, ZeroWitness::None);
        assert!(!zero_sum_characterization(&sigma_x(), &sigma_y(), &mixed, &tol()).unwrap());

        let scalar = diag(&[2.5, 2.5]);
        let z = zero_product_characterization(&scalar, &sigma_x(), &mixed, &tol()).unwrap();
        assert_eq!(z.witness, ZeroWitness::A);
        assert!(zero_sum_characterization(&scalar, &scalar, &mixed, &tol()).unwrap());
    }

    #[test]
    fn qubit_witness_examples() {
        let zero: QuantumState = ket(0).projector().into();
        let w = qubit_commutation_witness(&diag(&[1.0, 2.0]), &diag(&[3.0, 4.0]), &zero, &tol())
            .unwrap();
        assert_eq!(w, Some(0.0));
        assert_eq!(
            qubit_commutation_witness(&sigma_z(), &sigma_z(), &zero, &tol()).unwrap(),
            Some(0.0)
        );
        assert_eq!(
            qubit_commutation_witness(&sigma_x(), &sigma_y(), &zero, &tol()).unwrap(),
            None
        );
        assert!(qubit_commutation_witness(
            &diag(&[1.0, 2.0, 3.0]),
            &diag(&[1.0, 2.0, 3.0]),
            &zero,
            &tol()
        )
        .is_err());
    }
}
