//! Experiment configuration files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::attacks::{EstimateReuse, PairPerturbation, DEFAULT_NET_CEILING, DEFAULT_SHOT_CEILING};
use crate::error::{Error, Result};
use crate::primitives::{OwfKind, PrgKind, Scoring};
use crate::qcore::cap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Welch,
    OwsgTrivial,
    OwsgNet,
    EfiBuild,
    EfiAttack,
    Fingerprint,
    PhaseOwsg,
    PrsgOwsg,
    CommitBuild,
    CommitConvert,
    CommitAttack,
    TomographyBench,
    BoundsSuite,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::Welch,
        Experiment::OwsgTrivial,
        Experiment::OwsgNet,
        Experiment::EfiBuild,
        Experiment::EfiAttack,
        Experiment::Fingerprint,
        Experiment::PhaseOwsg,
        Experiment::PrsgOwsg,
        Experiment::CommitBuild,
        Experiment::CommitConvert,
        Experiment::CommitAttack,
        Experiment::TomographyBench,
        Experiment::BoundsSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Welch => "welch",
            Experiment::OwsgTrivial => "owsg-trivial",
            Experiment::OwsgNet => "owsg-net",
            Experiment::EfiBuild => "efi-build",
            Experiment::EfiAttack => "efi-attack",
            Experiment::Fingerprint => "fingerprint",
            Experiment::PhaseOwsg => "phase-owsg",
            Experiment::PrsgOwsg => "prsg-owsg",
            Experiment::CommitBuild => "commit-build",
            Experiment::CommitConvert => "commit-convert",
            Experiment::CommitAttack => "commit-attack",
            Experiment::TomographyBench => "tomography-bench",
            Experiment::BoundsSuite => "bounds-suite",
        }
    }

    /// Trial count used when the config leaves `trials` out; `None` for
    /// experiments that are exact and ignore it.
    pub fn default_trials(self) -> Option<u64> {
        match self {
            Experiment::Welch => Some(100),
            Experiment::OwsgTrivial => Some(10_000),
            Experiment::OwsgNet => Some(500),
            Experiment::EfiAttack => Some(2_000),
            Experiment::PhaseOwsg | Experiment::PrsgOwsg => Some(2_000),
            Experiment::CommitAttack => Some(10_000),
            Experiment::TomographyBench => Some(200),
            Experiment::BoundsSuite => Some(1_000),
            Experiment::EfiBuild | Experiment::Fingerprint | Experiment::CommitBuild | Experiment::CommitConvert => {
                None
            }
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_qubits: Option<usize>,
}

fn config_error(e: serde_json::Error) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            experiment,
            params: Map::new(),
            trials: None,
            seed,
            output: None,
            format: Format::Json,
            plot: None,
            max_qubits: None,
        }
    }

    pub fn with_params(mut self, params: Value) -> Result<Self> {
        match params {
            Value::Object(map) => {
                self.params = map;
                Ok(self)
            }
            other => Err(Error::Config(format!("params must be an object, got {other}"))),
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = Some(trials);
        self
    }

    /// Parses and validates a config document.
    pub fn from_value(value: Value) -> Result<Self> {
        if let Some(v) = value.get("schema_version") {
            if v.as_u64() != Some(SCHEMA_VERSION as u64) {
                return Err(Error::Config(format!(
                    "unsupported schema_version {v}; expected {SCHEMA_VERSION}"
                )));
            }
        }
        let config: ExperimentConfig = serde_json::from_value(value).map_err(config_error)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text).map_err(config_error)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {}; expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if let Some(n) = self.max_qubits {
            if n == 0 || n > cap::HARD_LIMIT {
                return Err(Error::Config(format!(
                    "max_qubits must be in 1..={}, got {n}",
                    cap::HARD_LIMIT
                )));
            }
        }
        if self.trials == Some(0) {
            return Err(Error::Config("trials must be positive".into()));
        }
        Params::parse(self.experiment, &self.params)?;
        Ok(())
    }

    pub fn trials_or_default(&self) -> Option<u64> {
        self.trials.or(self.experiment.default_trials())
    }

    /// The config with every default made explicit; this is what reports
    /// echo.
    pub fn resolved(&self) -> Result<Self> {
        let params = Params::parse(self.experiment, &self.params)?;
        let mut out = self.clone();
        out.params = params.to_map()?;
        out.trials = self.trials_or_default();
        Ok(out)
    }
}

/// A scalar or a list of values swept over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }

    pub fn is_list(&self) -> bool {
        matches!(self, OneOrMany::Many(_))
    }
}

/// Pairs two swept parameters: lists are zipped, scalars broadcast.
pub fn zip_sweep<A: Clone, B: Clone>(a: &OneOrMany<A>, b: &OneOrMany<B>) -> Result<Vec<(A, B)>> {
    let (va, vb) = (a.values(), b.values());
    let len = match (a.is_list(), b.is_list()) {
        (true, true) if va.len() != vb.len() => {
            return Err(Error::Config(format!(
                "swept lists have different lengths {} and {}",
                va.len(),
                vb.len()
            )))
        }
        (true, _) => va.len(),
        (_, true) => vb.len(),
        _ => 1,
    };
    if len == 0 {
        return Err(Error::Config("empty sweep".into()));
    }
    Ok((0..len)
        .map(|i| (va[i.min(va.len() - 1)].clone(), vb[i.min(vb.len() - 1)].clone()))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WelchParams {
    /// Also check orthonormal bases with uniform weights for `m = 1..=3`.
    pub equality_cases: bool,
    /// Moment orders checked on the equality cases.
    pub moments: Vec<u32>,
}

impl Default for WelchParams {
    fn default() -> Self {
        WelchParams {
            equality_cases: true,
            moments: vec![1, 2, 3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OwsgTrivialParams {
    /// Key bits.
    pub n: OneOrMany<usize>,
    /// Output qubits.
    pub m: OneOrMany<usize>,
    pub scoring: Scoring,
}

impl Default for OwsgTrivialParams {
    fn default() -> Self {
        OwsgTrivialParams {
            n: OneOrMany::One(3),
            m: OneOrMany::One(1),
            scoring: Scoring::Sampled,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TomographyMode {
    #[default]
    Oracle,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OwsgNetParams {
    pub n: usize,
    pub m: usize,
    /// `Δ`, swept.
    pub delta: OneOrMany<f64>,
    pub lam: u64,
    pub tomography: TomographyMode,
    /// Random oracle perturbation as a fraction of `γ` (0 disables it).
    pub perturbation: f64,
    pub beta: f64,
    pub shot_ceiling: u64,
    pub net_ceiling: u64,
    pub iterations: Option<u64>,
}

impl Default for OwsgNetParams {
    fn default() -> Self {
        OwsgNetParams {
            n: 3,
            m: 1,
            delta: OneOrMany::One(0.2),
            lam: 16,
            tomography: TomographyMode::Oracle,
            perturbation: 0.0,
            beta: 0.05,
            shot_ceiling: DEFAULT_SHOT_CEILING as u64,
            net_ceiling: DEFAULT_NET_CEILING as u64,
            iterations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EfiBuildParams {
    /// PRG seed bits, swept.
    pub n: OneOrMany<usize>,
    pub prg: PrgKind,
}

impl Default for EfiBuildParams {
    fn default() -> Self {
        EfiBuildParams {
            n: OneOrMany::Many(vec![2, 3, 4]),
            prg: PrgKind::RandomInjection,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EfiAttackParams {
    pub n: usize,
    pub prg: PrgKind,
    /// Inverse-polynomial parameter with `TD ≥ 1/p`; defaults to `1/TD`.
    pub p: Option<f64>,
    pub perturbation: PairPerturbation,
    pub tomography: TomographyMode,
    pub beta: f64,
    pub shot_ceiling: u64,
    pub reuse: EstimateReuse,
    /// Also run the unperturbed distinguisher and compare it with `TD`.
    pub baseline: bool,
}

impl Default for EfiAttackParams {
    fn default() -> Self {
        EfiAttackParams {
            n: 3,
            prg: PrgKind::RandomInjection,
            p: None,
            perturbation: PairPerturbation::Adversarial,
            tomography: TomographyMode::Oracle,
            beta: 0.05,
            shot_ceiling: DEFAULT_SHOT_CEILING as u64,
            reuse: EstimateReuse::Cached,
            baseline: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerprintParams {
    pub ell: usize,
    /// Code length.
    pub m: usize,
    pub eta: f64,
    /// Code search target; by default the largest `δ` for which the
    /// repetition count still fits the qubit cap.
    pub target_delta: Option<f64>,
    pub max_tries: usize,
    /// OWF input bits; defaults to `ell`.
    pub owf_bits: Option<usize>,
    pub owf: OwfKind,
}

impl Default for FingerprintParams {
    fn default() -> Self {
        FingerprintParams {
            ell: 8,
            m: 32,
            eta: 0.5,
            target_delta: None,
            max_tries: 20_000,
            owf_bits: None,
            owf: OwfKind::RandomInjection,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseOwsgParams {
    pub n: usize,
    pub ell: usize,
    pub lam: u64,
    pub owf: OwfKind,
}

impl Default for PhaseOwsgParams {
    fn default() -> Self {
        PhaseOwsgParams {
            n: 8,
            ell: 8,
            lam: 16,
            owf: OwfKind::RandomInjection,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrsgOwsgParams {
    pub n: usize,
    /// Output qubits, swept.
    pub m: OneOrMany<usize>,
    /// Overlap threshold.
    pub h: f64,
}

impl Default for PrsgOwsgParams {
    fn default() -> Self {
        PrsgOwsgParams {
            n: 4,
            m: OneOrMany::Many(vec![4, 5, 6]),
            h: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommitParams {
    pub n: usize,
    pub prg: PrgKind,
}

impl Default for CommitParams {
    fn default() -> Self {
        CommitParams {
            n: 2,
            prg: PrgKind::RandomInjection,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommitAttackParams {
    pub n: usize,
    pub prg: PrgKind,
    /// Attack the flavor-converted scheme instead of the original.
    pub convert: bool,
}

impl Default for CommitAttackParams {
    fn default() -> Self {
        CommitAttackParams {
            n: 2,
            prg: PrgKind::RandomInjection,
            convert: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographyBenchParams {
    pub qubits: usize,
    /// Target trace-norm error, swept.
    pub delta: OneOrMany<f64>,
    pub beta: f64,
    /// Security parameter for the reference copy count.
    pub lam: u64,
    pub shot_ceiling: u64,
}

impl Default for TomographyBenchParams {
    fn default() -> Self {
        TomographyBenchParams {
            qubits: 1,
            delta: OneOrMany::One(0.1),
            beta: 0.05,
            lam: 16,
            shot_ceiling: DEFAULT_SHOT_CEILING as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSuite {
    TraceProductFidelity,
    Projector,
    FidelityMix,
    HaarTail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSuiteParams {
    pub suites: Vec<BoundSuite>,
    /// Register size of the random matrices.
    pub qubits: usize,
    /// `2^mix_n` states of `mix_m` qubits.
    pub mix_n: usize,
    pub mix_m: usize,
    pub haar_m: Vec<usize>,
    pub haar_h: Vec<f64>,
    pub haar_samples: u64,
}

impl Default for BoundsSuiteParams {
    fn default() -> Self {
        BoundsSuiteParams {
            suites: vec![
                BoundSuite::TraceProductFidelity,
                BoundSuite::Projector,
                BoundSuite::FidelityMix,
                BoundSuite::HaarTail,
            ],
            qubits: 2,
            mix_n: 2,
            mix_m: 3,
            haar_m: vec![1, 2],
            haar_h: vec![0.1, 0.5],
            haar_samples: 100_000,
        }
    }
}

/// Typed parameters of every experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Welch(WelchParams),
    OwsgTrivial(OwsgTrivialParams),
    OwsgNet(OwsgNetParams),
    EfiBuild(EfiBuildParams),
    EfiAttack(EfiAttackParams),
    Fingerprint(FingerprintParams),
    PhaseOwsg(PhaseOwsgParams),
    PrsgOwsg(PrsgOwsgParams),
    CommitBuild(CommitParams),
    CommitConvert(CommitParams),
    CommitAttack(CommitAttackParams),
    TomographyBench(TomographyBenchParams),
    BoundsSuite(BoundsSuiteParams),
}

fn typed<T: DeserializeOwned>(experiment: Experiment, map: &Map<String, Value>) -> Result<T> {
    serde_json::from_value(Value::Object(map.clone())).map_err(|e| Error::Config(format!("{experiment} params: {e}")))
}

impl Params {
    pub fn parse(experiment: Experiment, map: &Map<String, Value>) -> Result<Self> {
        Ok(match experiment {
            Experiment::Welch => Params::Welch(typed(experiment, map)?),
            Experiment::OwsgTrivial => Params::OwsgTrivial(typed(experiment, map)?),
            Experiment::OwsgNet => Params::OwsgNet(typed(experiment, map)?),
            Experiment::EfiBuild => Params::EfiBuild(typed(experiment, map)?),
            Experiment::EfiAttack => Params::EfiAttack(typed(experiment, map)?),
            Experiment::Fingerprint => Params::Fingerprint(typed(experiment, map)?),
            Experiment::PhaseOwsg => Params::PhaseOwsg(typed(experiment, map)?),
            Experiment::PrsgOwsg => Params::PrsgOwsg(typed(experiment, map)?),
            Experiment::CommitBuild => Params::CommitBuild(typed(experiment, map)?),
            Experiment::CommitConvert => Params::CommitConvert(typed(experiment, map)?),
            Experiment::CommitAttack => Params::CommitAttack(typed(experiment, map)?),
            Experiment::TomographyBench => Params::TomographyBench(typed(experiment, map)?),
            Experiment::BoundsSuite => Params::BoundsSuite(typed(experiment, map)?),
        })
    }

    pub fn to_map(&self) -> Result<Map<String, Value>> {
        let v = match self {
            Params::Welch(p) => serde_json::to_value(p),
            Params::OwsgTrivial(p) => serde_json::to_value(p),
            Params::OwsgNet(p) => serde_json::to_value(p),
            Params::EfiBuild(p) => serde_json::to_value(p),
            Params::EfiAttack(p) => serde_json::to_value(p),
            Params::Fingerprint(p) => serde_json::to_value(p),
            Params::PhaseOwsg(p) => serde_json::to_value(p),
            Params::PrsgOwsg(p) => serde_json::to_value(p),
            Params::CommitBuild(p) | Params::CommitConvert(p) => serde_json::to_value(p),
            Params::CommitAttack(p) => serde_json::to_value(p),
            Params::TomographyBench(p) => serde_json::to_value(p),
            Params::BoundsSuite(p) => serde_json::to_value(p),
        }?;
        match v {
            Value::Object(m) => Ok(m),
            _ => unreachable!("params structs serialize to objects"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn minimal_config() {
        let c = ExperimentConfig::from_json(r#"{"schema_version": 1, "experiment": "welch", "seed": 1}"#).unwrap();
        assert_eq!(c.experiment, Experiment::Welch);
        assert_eq!(c.trials_or_default(), Some(100));
        let r = c.resolved().unwrap();
        assert_eq!(r.params["equality_cases"], json!(true));
        assert_eq!(r.resolved().unwrap(), r);
    }

    #[test]
    fn rejections() {
        let base = json!({"schema_version": 1, "experiment": "owsg-trivial", "seed": 7});
        let mut v = base.clone();
        v["params"] = json!({"m": 1, "bogus": 2});
        assert!(matches!(ExperimentConfig::from_value(v), Err(Error::Config(_))));
        let mut v = base.clone();
        v["schema_version"] = json!(2);
        assert!(matches!(ExperimentConfig::from_value(v), Err(Error::Config(_))));
        let mut v = base.clone();
        v.as_object_mut().unwrap().remove("seed");
        assert!(matches!(ExperimentConfig::from_value(v), Err(Error::Config(_))));
        let mut v = base.clone();
        v["extra"] = json!(1);
        assert!(ExperimentConfig::from_value(v).is_err());
        let mut v = base.clone();
        v["max_qubits"] = json!(17);
        assert!(matches!(ExperimentConfig::from_value(v), Err(Error::Config(_))));
        let mut v = base;
        v["experiment"] = json!("nope");
        assert!(ExperimentConfig::from_value(v).is_err());
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert_eq!(serde_json::to_value(e).unwrap(), json!(e.name()));
        }
    }

    #[test]
    fn sweeps_zip_and_broadcast() {
        let z = zip_sweep(&OneOrMany::Many(vec![3, 4, 6]), &OneOrMany::Many(vec![1, 2, 3])).unwrap();
        assert_eq!(z, vec![(3, 1), (4, 2), (6, 3)]);
        let z = zip_sweep(&OneOrMany::One(3), &OneOrMany::Many(vec![1, 2])).unwrap();
        assert_eq!(z, vec![(3, 1), (3, 2)]);
        assert!(zip_sweep(&OneOrMany::Many(vec![1]), &OneOrMany::Many(vec![1, 2])).is_err());
        assert!(zip_sweep(&OneOrMany::<usize>::Many(vec![]), &OneOrMany::One(1)).is_err());
    }
}
