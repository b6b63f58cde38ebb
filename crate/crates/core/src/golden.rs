//! Closed-form reference instances with known answers.
//!
//! Each golden evaluates one instance through the public API and compares
//! against a value derived by hand. `run_all` is what `reproduce` prints.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{commutator, pauli, ComplexMatrix, HermitianMatrix};
use crate::relations::{mp6, ratio_mu, robertson, schrodinger};
use crate::sampling::{bloch_partner, bloch_state};
use crate::saturation::{
    construct_case1, mp_chain_saturation, robertson_saturation_mixed, robertson_saturation_pure,
    schrodinger_saturation, DEFAULT_R_LIST,
};
use crate::state::{DensityMatrix, Observable, PureState, QuantumState};
use crate::tolerance::Tolerance;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn sigma_x() -> Observable {
    Observable::from_hermitian(pauli::x(), "sigma_x")
}

pub fn sigma_y() -> Observable {
    Observable::from_hermitian(pauli::y(), "sigma_y")
}

pub fn sigma_z() -> Observable {
    Observable::from_hermitian(pauli::z(), "sigma_z")
}

/// A = [[0, I₂], [I₂, 0]], B = [[0, −iI₂], [iI₂, 0]] and ρ = I₂/2 ⊕ 0₂.
pub fn block4() -> (Observable, Observable, DensityMatrix) {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let a = ComplexMatrix::from_row_slice(4, 4, &[
        z, z, o, z,
        z, z, z, o,
        o, z, z, z,
        z, o, z, z,
    ]);
    #[rustfmt::skip]
    let b = ComplexMatrix::from_row_slice(4, 4, &[
        z, z, -I, z,
        z, z, z, -I,
        I, z, z, z,
        z, I, z, z,
    ]);
    let rho =
        DensityMatrix::from_hermitian(HermitianMatrix::from_real_diagonal(&[0.5, 0.5, 0.0, 0.0]))
            .expect("valid density");
    (
        Observable::new(a, "block_a").expect("Hermitian"),
        Observable::new(b, "block_b").expect("Hermitian"),
        rho,
    )
}

/// `count` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (end - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenOutcome {
    pub id: String,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    /// Human-readable reason when `passed` is false.
    pub detail: String,
}

struct Check {
    id: &'static str,
    measured: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Check {
    fn new(id: &'static str) -> Self {
        Self {
            id,
            measured: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn close(&mut self, name: &str, got: f64, want: f64, within: f64) {
        self.measured.insert(name.to_string(), got);
        let err = (got - want).abs();
        if err.is_nan() || err > within {
            self.failures
                .push(format!("{name} = {got} (want {want} ± {within:e})"));
        }
    }

    fn holds(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(format!("{name} failed"));
        }
    }

    fn finish(self) -> GoldenOutcome {
        GoldenOutcome {
            id: self.id.to_string(),
            passed: self.failures.is_empty(),
            measured: self.measured,
            detail: self.failures.join("; "),
        }
    }
}

/// Smallest distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn robertson_pole(
    id: &'static str,
    theta: f64,
    want: f64,
    tol: &Tolerance,
) -> Result<GoldenOutcome> {
    let mut c = Check::new(id);
    let psi = bloch_state(theta, 0.0);
    let report = robertson(&sigma_x(), &sigma_y(), &psi.clone().into(), tol)?;
    c.close("slack", report.slack, 0.0, 1e-12);
    match robertson_saturation_pure(&sigma_x(), &sigma_y(), &psi, tol)? {
        Some(cert) => {
            let got = cert.theta.unwrap_or(f64::NAN);
            c.measured.insert("theta".into(), got);
            c.holds("theta", angle_distance(got, want) <= 1e-9);
        }
        None => c.holds("certificate present", false),
    }
    Ok(c.finish())
}

fn block4_robertson(tol: &Tolerance) -> Result<GoldenOutcome> {
    let mut c = Check::new("block4-mixed-robertson");
    let (a, b, rho) = block4();
    let am = a.matrix().as_matrix();
    let bm = b.matrix().as_matrix();
    let s = QuantumState::Mixed(rho);
    let a2 = s.expect_operator(&(am * am))?.re;
    let b2 = s.expect_operator(&(bm * bm))?.re;
    c.close("tr(A2 rho) tr(B2 rho)", a2 * b2, 1.0, 1e-12);
    let comm = s.expect_operator(&commutator(am, bm))?;
    // the product of second moments matches |tr([A,B]ρ)|²/4; the commutator
    // expectation itself is 2i here, so its squared modulus is 4
    c.measured
        .insert("|tr([A,B] rho)|^2".into(), comm.norm_sqr());
    c.close("|tr([A,B] rho)|^2 / 4", comm.norm_sqr() / 4.0, 1.0, 1e-12);
    let report = robertson(&a, &b, &s, tol)?;
    c.close("lhs", report.lhs, 1.0, 1e-12);
    c.close("rhs", report.rhs, 1.0, 1e-12);
    match robertson_saturation_mixed(&a, &b, &s, tol, &DEFAULT_R_LIST)? {
        Some(cert) => {
            c.close("theta", cert.theta.unwrap_or(f64::NAN), FRAC_PI_4, 1e-9);
            for rc in &cert.r_checked {
                c.close(&format!("residual r={}", rc.r), rc.residual, 0.0, 1e-9);
            }
            c.holds(
                "all r checked",
                cert.r_checked.len() == DEFAULT_R_LIST.len(),
            );
        }
        None => c.holds("certificate present", false),
    }
    Ok(c.finish())
}

fn block4_schrodinger(tol: &Tolerance) -> Result<GoldenOutcome> {
    let mut c = Check::new("block4-schrodinger");
    let (a, b, rho) = block4();
    let report = schrodinger(&a, &b, &rho.into(), tol)?;
    c.close("lhs", report.lhs, 1.0, 1e-12);
    c.close("rhs", report.rhs, 1.0, 1e-12);
    c.holds("saturated", report.saturated);
    Ok(c.finish())
}

fn pauli_schrodinger(tol: &Tolerance) -> Result<GoldenOutcome> {
    let mut c = Check::new("pauli-schrodinger-north");
    let s = QuantumState::Pure(PureState::basis(2, 0));
    let report = schrodinger(&sigma_x(), &sigma_y(), &s, tol)?;
    c.close("lhs", report.lhs, 1.0, 1e-12);
    c.close("rhs", report.rhs, 1.0, 1e-12);
    match schrodinger_saturation(&sigma_x(), &sigma_y(), &s, tol, &DEFAULT_R_LIST)? {
        Some(cert) => {
            c.close("theta", cert.theta.unwrap_or(f64::NAN), FRAC_PI_4, 1e-9);
            c.close("phi", cert.phi.unwrap_or(f64::NAN), FRAC_PI_2, 1e-9);
        }
        None => c.holds("certificate present", false),
    }
    Ok(c.finish())
}

/// Quantities of the σx, σy chain over the Bloch grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub theta: f64,
    pub phi: f64,
    pub step1_residual: f64,
    pub step2_residual: f64,
    /// |c|² − |d|² with c = ⟨ψ|σx|φ⟩, d = ⟨ψ|σy|φ⟩.
    pub c2_minus_d2: f64,
}

/// On-grid angles where |c| = |d|: the poles and the odd multiples of π/4.
pub fn on_step2_solution(theta: f64, phi: f64) -> bool {
    let pole = theta.abs() < 1e-12 || (theta - PI).abs() < 1e-12;
    let diagonal = (1..8)
        .step_by(2)
        .any(|k| angle_distance(phi, k as f64 * FRAC_PI_4) < 1e-12);
    pole || diagonal
}

/// Distance from (θ, φ) to the set where |c| = |d|.
pub fn distance_to_step2_solutions(theta: f64, phi: f64) -> f64 {
    let pole = theta.min((PI - theta).abs());
    let diagonal = (1..8)
        .step_by(2)
        .map(|k| angle_distance(phi, k as f64 * FRAC_PI_4))
        .fold(f64::INFINITY, f64::min);
    pole.min(diagonal)
}

/// Evaluates the σx, σy chain with ψ = bloch(θ, φ) and its orthogonal partner over
/// θ ∈ linspace(0, π, size), φ ∈ linspace(0, 2π, size).
pub fn bloch_chain_grid(size: usize, tol: &Tolerance) -> Result<Vec<GridPoint>> {
    let (x, y) = (sigma_x(), sigma_y());
    let mut out = Vec::with_capacity(size * size);
    for &theta in &linspace(0.0, PI, size) {
        for &phi in &linspace(0.0, TAU, size) {
            let psi = bloch_state(theta, phi);
            let partner = bloch_partner(theta, phi);
            let sat = mp_chain_saturation(&x, &y, &psi, &partner, I, tol)?;
            let f = &sat.report.frame;
            out.push(GridPoint {
                theta,
                phi,
                step1_residual: sat.residuals[0],
                step2_residual: sat.residuals[1],
                c2_minus_d2: f.c.norm_sqr() - f.d.norm_sqr(),
            });
        }
    }
    Ok(out)
}

fn chain_grid(tol: &Tolerance) -> Result<GoldenOutcome> {
    let mut c = Check::new("pauli-chain-grid");
    let grid = bloch_chain_grid(25, tol)?;
    let worst_step1 = grid.iter().map(|p| p.step1_residual).fold(0.0, f64::max);
    c.close("max step1 residual", worst_step1, 0.0, 1e-12);
    let mut worst_on: f64 = 0.0;
    let mut best_off = f64::INFINITY;
    let mut worst_formula: f64 = 0.0;
    for p in &grid {
        if on_step2_solution(p.theta, p.phi) {
            worst_on = worst_on.max(p.step2_residual);
        } else if distance_to_step2_solutions(p.theta, p.phi) >= 0.1 {
            best_off = best_off.min(p.step2_residual);
        }
        let closed = -(p.theta.sin().powi(2)) * (2.0 * p.phi).cos();
        worst_formula = worst_formula.max((p.c2_minus_d2 - closed).abs());
    }
    c.close("max step2 residual on solutions", worst_on, 0.0, 1e-10);
    c.measured
        .insert("min step2 residual off solutions".into(), best_off);
    c.holds("step2 fails off solutions", best_off > 1e-6);
    c.close("max |c|^2-|d|^2 formula error", worst_formula, 0.0, 1e-12);
    Ok(c.finish())
}

fn chain_ratio_mu() -> Result<GoldenOutcome> {
    let mut c = Check::new("pauli-chain-ratio-mu");
    let (x, y) = (sigma_x(), sigma_y());
    for (name, theta, want) in [("theta=0", 0.0, I), ("theta=pi", PI, -I)] {
        for &phi in &[0.0, 0.9, 2.5] {
            let got = ratio_mu(&x, &y, &bloch_state(theta, phi), &bloch_partner(theta, phi))?;
            let err = got.map_or(f64::INFINITY, |m| (m - want).norm());
            c.close(&format!("|mu - want| {name} phi={phi}"), err, 0.0, 1e-12);
        }
    }
    Ok(c.finish())
}

fn chain_north(tol: &Tolerance) -> Result<GoldenOutcome> {
    let mut c = Check::new("pauli-chain-north-all");
    let sat = mp_chain_saturation(
        &sigma_x(),
        &sigma_y(),
        &bloch_state(0.0, 0.3),
        &bloch_partner(0.0, 0.3),
        I,
        tol,
    )?;
    c.holds("all steps", sat.steps.iter().all(|&s| s));
    c.holds(
        "all reports saturated",
        sat.report.steps.iter().all(|r| r.saturated),
    );
    c.close("eigen residual", sat.eigen_residual, 0.0, 1e-12);
    c.holds("certificate present", sat.certificate.is_some());
    Ok(c.finish())
}

fn pauli_case1(tol: &Tolerance) -> Result<GoldenOutcome> {
    let mut c = Check::new("pauli-case1-mp3");
    let pair = construct_case1(&sigma_x(), &sigma_y(), tol)?;
    c.holds("mu = -i", pair.mu == -I);
    c.close("slack", pair.achieved_slack, 0.0, 1e-12);
    c.holds("saturates", pair.saturates());
    Ok(c.finish())
}

fn pauli_mp6(tol: &Tolerance) -> Result<GoldenOutcome> {
    let mut c = Check::new("pauli-mp6-basis");
    let r = mp6(
        &sigma_x(),
        &sigma_y(),
        &PureState::basis(2, 0),
        &PureState::basis(2, 1),
        tol,
    )?;
    match r.product.report() {
        Some(p) => {
            c.close("lhs", p.lhs, 1.0, 1e-12);
            c.close("rhs", p.rhs, 1.0, 1e-12);
        }
        None => c.holds("product form present", false),
    }
    c.holds("reformulated saturated", r.reformulated.saturated);
    Ok(c.finish())
}

/// Evaluates every golden instance. An evaluation error counts as a failure.
pub fn run_all(tol: &Tolerance) -> Vec<GoldenOutcome> {
    type Golden<'a> = (&'static str, Box<dyn Fn() -> Result<GoldenOutcome> + 'a>);
    let goldens: Vec<Golden> = vec![
        (
            "pauli-robertson-north",
            Box::new(|| robertson_pole("pauli-robertson-north", 0.0, FRAC_PI_4, tol)),
        ),
        (
            "pauli-robertson-south",
            Box::new(|| robertson_pole("pauli-robertson-south", PI, -FRAC_PI_4, tol)),
        ),
        ("block4-mixed-robertson", Box::new(|| block4_robertson(tol))),
        ("block4-schrodinger", Box::new(|| block4_schrodinger(tol))),
        (
            "pauli-schrodinger-north",
            Box::new(|| pauli_schrodinger(tol)),
        ),
        ("pauli-chain-grid", Box::new(|| chain_grid(tol))),
        ("pauli-chain-ratio-mu", Box::new(chain_ratio_mu)),
        ("pauli-chain-north-all", Box::new(|| chain_north(tol))),
        ("pauli-case1-mp3", Box::new(|| pauli_case1(tol))),
        ("pauli-mp6-basis", Box::new(|| pauli_mp6(tol))),
    ];
    goldens
        .into_iter()
        .map(|(id, run)| {
            run().unwrap_or_else(|e| GoldenOutcome {
                id: id.to_string(),
                passed: false,
                measured: BTreeMap::new(),
                detail: e.to_string(),
            })
        })
        .collect()
}
