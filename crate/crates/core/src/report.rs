//! Drivers behind the `verify`, `reproduce` and `saturate` subcommands, and
//! the serializable reports they produce.
//!
//! Reports carry a [`RunManifest`] that pins down a rerun. Timestamps are the
//! only nondeterministic part; [`deterministic_body`] drops them.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::golden::{self, GoldenOutcome};
use crate::io::VectorFile;
use crate::relations::{self, BoundReport};
use crate::sampling::{self, trial_rng, SampleConfig};
use crate::saturation::{
    self, ChainSaturation, ConstructedPair, SaturationCertificate, SaturationCheck, Target,
    ZeroProduct, DEFAULT_R_LIST,
};
use crate::state::{Observable, PureState, QuantumState};
use crate::tolerance::Tolerance;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<SampleConfig>,
    pub tolerance: Tolerance,
    pub execution: Execution,
    pub input: Option<String>,
    pub seed: Option<u64>,
    pub artifact_version: String,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

impl RunManifest {
    fn start(command: &str, tolerance: Tolerance, execution: Execution) -> Self {
        let now = Utc::now();
        Self {
            command: command.to_owned(),
            config: None,
            tolerance,
            execution,
            input: None,
            seed: None,
            artifact_version: ARTIFACT_VERSION.to_owned(),
            started_at: now,
            finished_at: now,
        }
    }

    fn finish(&mut self) {
        self.finished_at = Utc::now();
    }
}

/// JSON of `report` with the manifest timestamps removed.
pub fn deterministic_body<T: Serialize>(report: &T) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    if let Some(manifest) = value.get_mut("manifest").and_then(|m| m.as_object_mut()) {
        manifest.remove("started_at");
        manifest.remove("finished_at");
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

fn csv_string(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w).map_err(|e| Error::Io(e.to_string()))?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn render<T: Serialize>(
    report: &T,
    format: OutputFormat,
    csv: impl FnOnce() -> Result<String>,
) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        OutputFormat::Csv => csv(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    Pure,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBound {
    pub state: StateLabel,
    pub report: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionRecord {
    pub method: String,
    pub target: Target,
    pub mu: Complex64,
    pub achieved_slack: f64,
    pub relative_gap: f64,
    pub degenerate: bool,
    pub saturated: bool,
}

impl ConstructionRecord {
    fn new(method: &str, p: &ConstructedPair) -> Self {
        Self {
            method: method.to_owned(),
            target: p.target,
            mu: p.mu,
            achieved_slack: p.achieved_slack,
            relative_gap: p.relative_gap,
            degenerate: p.degenerate,
            saturated: p.saturates(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub bounds: Vec<TrialBound>,
    pub robertson_pure: Option<SaturationCertificate>,
    pub robertson_mixed: Option<SaturationCertificate>,
    pub schrodinger_pure: Option<SaturationCertificate>,
    pub schrodinger_mixed: Option<SaturationCertificate>,
    pub chain: ChainSaturation,
    pub mp3: SaturationCheck,
    pub mp6: SaturationCheck,
    pub constructions: Vec<ConstructionRecord>,
    pub zero_product: ZeroProduct,
    pub zero_sum: bool,
    /// ‖[A,B]‖_F when n = 2 and both centered products vanish.
    pub commutation_witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEntry {
    pub index: usize,
    pub record: Option<TrialRecord>,
    pub error: Option<String>,
    pub invariant_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundSummary {
    pub evaluated: usize,
    pub saturated: usize,
    pub min_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub trials: usize,
    pub completed: usize,
    /// Keyed by "<bound>/<pure|mixed>".
    pub bounds: BTreeMap<String, BoundSummary>,
    pub certificates: BTreeMap<String, usize>,
    pub constructions_total: usize,
    pub constructions_saturated: usize,
    /// Invariant violations; any entry makes the run exit with code 2.
    pub failures: Vec<FailureRecord>,
    /// Other per-trial errors (numerical degeneracies of a sample).
    pub errors: Vec<FailureRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub manifest: RunManifest,
    pub trials: Vec<TrialEntry>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.failures.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        render(self, format, || {
            csv_string(|w| {
                w.write_record(["bound", "evaluated", "saturated", "min_slack"])?;
                for (k, s) in &self.summary.bounds {
                    let min = s.min_slack.map(|v| v.to_string()).unwrap_or_default();
                    w.write_record([
                        k.clone(),
                        s.evaluated.to_string(),
                        s.saturated.to_string(),
                        min,
                    ])?;
                }
                Ok(())
            })
        })
    }
}

fn run_trial(
    n: usize,
    rank: usize,
    seed: u64,
    index: usize,
    tol: &Tolerance,
) -> Result<TrialRecord> {
    let mut rng = trial_rng(seed, index as u64);
    let a = sampling::random_hermitian_with(n, &mut rng);
    let b = sampling::random_hermitian_with(n, &mut rng);
    let (psi, phi) = sampling::random_orthonormal_pair_with(n, &mut rng)?;
    let rho = sampling::random_density_with(n, rank, &mut rng)?;
    let pure = QuantumState::Pure(psi.clone());
    let mixed = QuantumState::Mixed(rho);

    let mut bounds = Vec::new();
    for (label, s) in [(StateLabel::Pure, &pure), (StateLabel::Mixed, &mixed)] {
        bounds.push(TrialBound {
            state: label,
            report: relations::robertson(&a, &b, s, tol)?,
        });
        bounds.push(TrialBound {
            state: label,
            report: relations::schrodinger(&a, &b, s, tol)?,
        });
    }
    let mu = relations::choose_mu(&a, &b, &psi, tol)?.mu;
    let chain = saturation::mp_chain_saturation(&a, &b, &psi, &phi, mu, tol)?;
    for step in &chain.report.steps {
        bounds.push(TrialBound {
            state: StateLabel::Pure,
            report: step.clone(),
        });
    }
    let (mp3, _) = relations::mp3(&a, &b, &psi, &phi, tol)?;
    bounds.push(TrialBound {
        state: StateLabel::Pure,
        report: mp3,
    });
    let mp6 = relations::mp6(&a, &b, &psi, &phi, tol)?;
    bounds.push(TrialBound {
        state: StateLabel::Pure,
        report: mp6.reformulated.clone(),
    });
    if let Some(r) = mp6.product.report() {
        bounds.push(TrialBound {
            state: StateLabel::Pure,
            report: r.clone(),
        });
    }

    let mut constructions = Vec::new();
    if n == 2 {
        constructions.push(ConstructionRecord::new(
            "case1",
            &saturation::construct_case1(&a, &b, tol)?,
        ));
    }
    constructions.push(ConstructionRecord::new(
        "case2",
        &saturation::construct_case2(&a, &b, tol)?,
    ));
    constructions.push(ConstructionRecord::new(
        "w_mp6",
        &saturation::construct_w_mp6(&a, &b, tol)?,
    ));

    Ok(TrialRecord {
        robertson_pure: saturation::robertson_saturation_pure(&a, &b, &psi, tol)?,
        robertson_mixed: saturation::robertson_saturation_mixed(
            &a,
            &b,
            &mixed,
            tol,
            &DEFAULT_R_LIST,
        )?,
        schrodinger_pure: saturation::schrodinger_saturation(&a, &b, &pure, tol, &DEFAULT_R_LIST)?,
        schrodinger_mixed: saturation::schrodinger_saturation(
            &a,
            &b,
            &mixed,
            tol,
            &DEFAULT_R_LIST,
        )?,
        mp3: saturation::mp3_saturation(&a, &b, &psi, &phi, mu, tol)?,
        mp6: saturation::mp6_saturation(&a, &b, &psi, &phi, mu, tol)?,
        chain,
        bounds,
        constructions,
        zero_product: saturation::zero_product_characterization(&a, &b, &mixed, tol)?,
        zero_sum: saturation::zero_sum_characterization(&a, &b, &mixed, tol)?,
        commutation_witness: if n == 2 {
            saturation::qubit_commutation_witness(&a, &b, &mixed, tol)?
        } else {
            None
        },
    })
}

fn summarize(trials: &[TrialEntry]) -> SuiteSummary {
    let mut s = SuiteSummary {
        trials: trials.len(),
        ..SuiteSummary::default()
    };
    for t in trials {
        if let Some(message) = &t.error {
            let f = FailureRecord {
                trial: t.index,
                message: message.clone(),
            };
            if t.invariant_violation {
                s.failures.push(f);
            } else {
                s.errors.push(f);
            }
        }
        let Some(r) = &t.record else { continue };
        s.completed += 1;
        for b in &r.bounds {
            let label = match b.state {
                StateLabel::Pure => "pure",
                StateLabel::Mixed => "mixed",
            };
            let e = s
                .bounds
                .entry(format!("{}/{label}", b.report.kind))
                .or_default();
            e.evaluated += 1;
            e.saturated += usize::from(b.report.saturated);
            e.min_slack = Some(
                e.min_slack
                    .map_or(b.report.slack, |m| m.min(b.report.slack)),
            );
        }
        let certs = [
            ("robertson/pure", r.robertson_pure.is_some()),
            ("robertson/mixed", r.robertson_mixed.is_some()),
            ("schrodinger/pure", r.schrodinger_pure.is_some()),
            ("schrodinger/mixed", r.schrodinger_mixed.is_some()),
            ("mp_chain", r.chain.certificate.is_some()),
            ("mp3", r.mp3.saturated),
            ("mp6", r.mp6.saturated),
        ];
        for (k, present) in certs {
            *s.certificates.entry(k.to_owned()).or_default() += usize::from(present);
        }
        for c in &r.constructions {
            s.constructions_total += 1;
            if c.saturated {
                s.constructions_saturated += 1;
            } else {
                s.failures.push(FailureRecord {
                    trial: t.index,
                    message: format!(
                        "{} construction misses saturation (relative gap {:e})",
                        c.method, c.relative_gap
                    ),
                });
            }
        }
    }
    s
}

/// Samples `config.count` instances and runs every bound, checker,
/// constructor and zero characterization on each.
///
/// Config errors are returned as `Err`; per-trial errors land in the report.
pub fn cmd_verify(
    config: &SampleConfig,
    tol: &Tolerance,
    execution: Execution,
) -> Result<SuiteReport> {
    config.validate()?;
    if config.dimension < 2 {
        return Err(Error::InvalidConfig("verify needs dimension n ≥ 2".into()));
    }
    if !tol.is_valid() {
        return Err(Error::InvalidConfig(format!("invalid tolerance {tol:?}")));
    }
    let mut manifest = RunManifest::start("verify", *tol, execution);
    manifest.config = Some(*config);
    manifest.seed = Some(config.seed);
    let trials = execution.map_indexed(config.count, |i| {
        match run_trial(config.dimension, config.rank, config.seed, i, tol) {
            Ok(record) => TrialEntry {
                index: i,
                record: Some(record),
                error: None,
                invariant_violation: false,
            },
            Err(e) => TrialEntry {
                index: i,
                record: None,
                invariant_violation: e.is_invariant_violation(),
                error: Some(e.to_string()),
            },
        }
    });
    let summary = summarize(&trials);
    manifest.finish();
    Ok(SuiteReport {
        manifest,
        trials,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub manifest: RunManifest,
    pub goldens: Vec<GoldenOutcome>,
    pub failed: Vec<String>,
}

impl ReproduceReport {
    pub fn exit_code(&self) -> i32 {
        if self.failed.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        render(self, format, || {
            csv_string(|w| {
                w.write_record(["id", "passed", "detail"])?;
                for g in &self.goldens {
                    w.write_record([
                        g.id.as_str(),
                        if g.passed { "true" } else { "false" },
                        g.detail.as_str(),
                    ])?;
                }
                Ok(())
            })
        })
    }
}

/// Evaluates every golden instance.
pub fn cmd_reproduce(tol: &Tolerance) -> Result<ReproduceReport> {
    if !tol.is_valid() {
        return Err(Error::InvalidConfig(format!("invalid tolerance {tol:?}")));
    }
    let mut manifest = RunManifest::start("reproduce", *tol, Execution::Sequential);
    let goldens = golden::run_all(tol);
    let failed = goldens
        .iter()
        .filter(|g| !g.passed)
        .map(|g| g.id.clone())
        .collect();
    manifest.finish();
    Ok(ReproduceReport {
        manifest,
        goldens,
        failed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturateReport {
    pub manifest: RunManifest,
    pub method: String,
    pub target: Target,
    pub mu: Complex64,
    pub psi: VectorFile,
    pub phi: VectorFile,
    pub achieved_slack: f64,
    pub relative_gap: f64,
    pub degenerate: bool,
    pub saturated: bool,
    pub check: SaturationCheck,
}

impl SaturateReport {
    pub fn exit_code(&self) -> i32 {
        if self.saturated {
            0
        } else {
            2
        }
    }

    pub fn psi(&self) -> Result<PureState> {
        PureState::new(self.psi.to_vector()?)
    }

    pub fn phi(&self) -> Result<PureState> {
        PureState::new(self.phi.to_vector()?)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        render(self, format, || {
            csv_string(|w| {
                w.write_record([
                    "method",
                    "target",
                    "mu_re",
                    "mu_im",
                    "achieved_slack",
                    "relative_gap",
                    "degenerate",
                    "saturated",
                ])?;
                w.write_record([
                    self.method.clone(),
                    match self.target {
                        Target::Mp3 => "mp3".into(),
                        Target::Mp6 => "mp6".into(),
                    },
                    self.mu.re.to_string(),
                    self.mu.im.to_string(),
                    self.achieved_slack.to_string(),
                    self.relative_gap.to_string(),
                    self.degenerate.to_string(),
                    self.saturated.to_string(),
                ])
            })
        })
    }
}

/// Builds a saturating orthonormal pair for (A, B): Case 1 for n = 2 and
/// Case 2 otherwise when targeting the sum bound, the W construction for the
/// product bound.
pub fn cmd_saturate(
    a: &Observable,
    b: &Observable,
    target: Target,
    tol: &Tolerance,
    input: Option<String>,
) -> Result<SaturateReport> {
    if !tol.is_valid() {
        return Err(Error::InvalidConfig(format!("invalid tolerance {tol:?}")));
    }
    let mut manifest = RunManifest::start("saturate", *tol, Execution::Sequential);
    manifest.input = input;
    let (method, pair) = match target {
        Target::Mp3 if a.dim() == 2 => ("case1", saturation::construct_case1(a, b, tol)?),
        Target::Mp3 => ("case2", saturation::construct_case2(a, b, tol)?),
        Target::Mp6 => ("w_mp6", saturation::construct_w_mp6(a, b, tol)?),
    };
    manifest.finish();
    Ok(SaturateReport {
        manifest,
        method: method.to_owned(),
        target,
        mu: pair.mu,
        psi: VectorFile::from_state(&pair.psi),
        phi: VectorFile::from_state(&pair.phi),
        achieved_slack: pair.achieved_slack,
        relative_gap: pair.relative_gap,
        degenerate: pair.degenerate,
        saturated: pair.saturates(),
        check: pair.check,
    })
}
