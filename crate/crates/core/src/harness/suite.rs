//! The acceptance battery: one configured experiment per criterion plus a
//! replay criterion, written as flat files with a `summary.json` index.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{Experiment, ExperimentConfig, SCHEMA_VERSION};
use super::experiments::run;
use super::report::{strip_wall_time, to_json_string, write_atomic, ExperimentReport};
use crate::error::Result;

/// Seed used by `qclab suite run` when none is given.
pub const DEFAULT_SUITE_SEED: u64 = 42;

/// One criterion of the battery backed by a single experiment.
#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub config: ExperimentConfig,
}

impl Criterion {
    pub fn file_name(&self) -> String {
        format!("criterion-{:02}-{}.json", self.id, self.config.experiment)
    }
}

fn criterion(id: u32, title: &'static str, e: Experiment, seed: u64, params: serde_json::Value) -> Result<Criterion> {
    let mut config = ExperimentConfig::new(e, seed).with_params(params)?;
    config.trials = e.default_trials();
    Ok(Criterion { id, title, config })
}

/// Criteria 1 to 11, all seeded with `seed`.
pub fn criteria(seed: u64) -> Result<Vec<Criterion>> {
    use Experiment::*;
    Ok(vec![
        criterion(
            1,
            "random-key adversary on Haar-toy schemes",
            OwsgTrivial,
            seed,
            json!({"n": [3, 4, 6], "m": [1, 2, 3]}),
        )?,
        criterion(2, "Welch sweep and equality cases", Welch, seed, json!({}))?,
        criterion(
            3,
            "fingerprint overlaps and OWSG",
            Fingerprint,
            seed,
            json!({"ell": 8, "eta": 0.5}),
        )?,
        criterion(
            4,
            "phase-state weak OWSG",
            PhaseOwsg,
            seed,
            json!({"lam": 16, "ell": 8}),
        )?,
        criterion(5, "PRG-based EFI pair", EfiBuild, seed, json!({"n": [2, 3, 4]}))?,
        criterion(6, "spectral EFI distinguisher", EfiAttack, seed, json!({"n": 3}))?,
        criterion(
            7,
            "sampled Pauli tomography",
            TomographyBench,
            seed,
            json!({"qubits": 1, "delta": 0.1, "beta": 0.05}),
        )?,
        criterion(
            8,
            "tomography-and-net key recovery",
            OwsgNet,
            seed,
            json!({"n": 3, "m": 1, "delta": 0.2}),
        )?,
        criterion(
            9,
            "Haar overlap tail",
            BoundsSuite,
            seed,
            json!({"suites": ["haar_tail"]}),
        )?,
        criterion(
            10,
            "trace-product, projector and mixture inequalities",
            BoundsSuite,
            seed,
            json!({"suites": ["trace_product_fidelity", "projector", "fidelity_mix"]}),
        )?,
        criterion(
            11,
            "PRG commitment, conversion and swap attack",
            CommitAttack,
            seed,
            json!({"n": 2}),
        )?,
    ])
}

/// Summary line for one criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub pass: bool,
    /// Left side of the headline check: the first failing one, else the first.
    pub estimate: Option<f64>,
    pub bound: Option<f64>,
    pub check: Option<String>,
    pub checks: usize,
    pub failed: usize,
    pub report: String,
}

impl CriterionResult {
    fn from_report(c: &Criterion, r: &ExperimentReport) -> Self {
        let headline = r.first_failure().or(r.checks.first());
        CriterionResult {
            id: c.id,
            title: c.title.to_string(),
            pass: r.pass,
            estimate: headline.map(|h| h.lhs),
            bound: headline.map(|h| h.rhs),
            check: headline.map(|h| h.name.clone()),
            checks: r.checks.len(),
            failed: r.checks.iter().filter(|c| !c.holds).count(),
            report: c.file_name(),
        }
    }
}

/// Replay outcome for one report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub id: u32,
    pub report: String,
    pub identical: bool,
}

/// Report of the replay criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub schema_version: u32,
    pub seed: u64,
    pub pass: bool,
    pub entries: Vec<ReplayEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub schema_version: u32,
    pub qclab_version: String,
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub all_pass: bool,
    pub wall_time: f64,
}

/// Re-runs the echoed config of `report` and compares the JSON renderings
/// with `wall_time` removed.
pub fn replay_matches(report: &ExperimentReport) -> Result<bool> {
    let again = run(&report.config)?;
    Ok(strip_wall_time(&report.to_json()?) == strip_wall_time(&again.to_json()?))
}

/// Runs the battery, writes every report and `summary.json` into `out`,
/// and returns the summary. `progress` sees each criterion as it finishes.
pub fn run_suite(seed: u64, out: &Path, mut progress: impl FnMut(&CriterionResult)) -> Result<SuiteSummary> {
    let start = Instant::now();
    let list = criteria(seed)?;
    let mut results = Vec::new();
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    let mut entries = Vec::new();
    for c in &list {
        let report = run(&c.config)?;
        let result = CriterionResult::from_report(c, &report);
        progress(&result);
        results.push(result);
        entries.push(ReplayEntry {
            id: c.id,
            report: c.file_name(),
            identical: replay_matches(&report)?,
        });
        files.push((out.join(c.file_name()), report.to_json()?));
    }
    let replay = ReplayReport {
        schema_version: SCHEMA_VERSION,
        seed,
        pass: entries.iter().all(|e| e.identical),
        entries,
    };
    let name = "criterion-12-replay.json".to_string();
    let failed = replay.entries.iter().filter(|e| !e.identical).count();
    let result = CriterionResult {
        id: 12,
        title: "replay reproduces every report modulo wall_time".into(),
        pass: replay.pass,
        estimate: Some((replay.entries.len() - failed) as f64),
        bound: Some(replay.entries.len() as f64),
        check: Some("identical replays".into()),
        checks: replay.entries.len(),
        failed,
        report: name.clone(),
    };
    progress(&result);
    results.push(result);
    files.push((out.join(name), to_json_string(&replay)?));
    let summary = SuiteSummary {
        schema_version: SCHEMA_VERSION,
        qclab_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        all_pass: results.iter().all(|r| r.pass),
        criteria: results,
        wall_time: start.elapsed().as_secs_f64(),
    };
    for (path, text) in &files {
        write_atomic(path, text.as_bytes())?;
    }
    write_atomic(&out.join("summary.json"), to_json_string(&summary)?.as_bytes())?;
    Ok(summary)
}
