//! One-way state generators and the one-wayness game.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde_json::Value;

use super::report::{CopyMode, GameReport, Scoring, TrialRecord};
use crate::error::{Error, Result};
use crate::qcore::{cap, measure_counts, trace_distance, DensityMatrix, Operator, Projector, PureState, Rng};

/// Largest key space that may be enumerated.
pub const MAX_ENUMERABLE_KEY_BITS: usize = 16;

/// Total amplitude count below which a scheme caches all of its states.
const TABLE_AMPLITUDE_LIMIT: usize = 1 << 22;

pub type PureStateFn = Arc<dyn Fn(u64) -> Result<PureState> + Send + Sync>;
pub type MixedStateFn = Arc<dyn Fn(u64) -> Result<DensityMatrix> + Send + Sync>;
pub type VerifierFn = Arc<dyn Fn(u64, &DensityMatrix) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub enum StateGen {
    Pure(PureStateFn),
    Mixed(MixedStateFn),
}

/// `Ver(k', ρ)` returns an acceptance probability.
#[derive(Clone)]
pub enum Verifier {
    /// Project onto `|φ_{k'}⟩`; requires pure outputs.
    Projection,
    Custom(VerifierFn),
}

#[derive(Clone, Debug, PartialEq)]
pub enum KeyDistribution {
    Uniform,
    /// Explicit probabilities for each of the `2^n` keys.
    Weighted(Arc<Vec<f64>>),
}

/// `(KeyGen, StateGen, Ver)` over `n`-bit keys and `m`-qubit outputs.
#[derive(Clone)]
pub struct OwsgScheme {
    name: String,
    key_bits: usize,
    output_qubits: usize,
    keys: KeyDistribution,
    gen: StateGen,
    verifier: Verifier,
    correctness_slack: f64,
    metadata: BTreeMap<String, Value>,
    table: Arc<OnceLock<Arc<Vec<PureState>>>>,
}

impl fmt::Debug for OwsgScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OwsgScheme")
            .field("name", &self.name)
            .field("key_bits", &self.key_bits)
            .field("output_qubits", &self.output_qubits)
            .field("keys", &self.keys)
            .field("metadata", &self.metadata)
            .finish_non_exhaustive()
    }
}

impl OwsgScheme {
    /// Pure-output scheme with uniform keys and the projection verifier.
    pub fn pure<F>(name: impl Into<String>, key_bits: usize, output_qubits: usize, f: F) -> Result<Self>
    where
        F: Fn(u64) -> Result<PureState> + Send + Sync + 'static,
    {
        Self::build(
            name.into(),
            key_bits,
            output_qubits,
            StateGen::Pure(Arc::new(f)),
            Verifier::Projection,
        )
    }

    /// Mixed-output scheme; the verifier must be supplied.
    pub fn mixed<F, V>(
        name: impl Into<String>,
        key_bits: usize,
        output_qubits: usize,
        f: F,
        verifier: V,
    ) -> Result<Self>
    where
        F: Fn(u64) -> Result<DensityMatrix> + Send + Sync + 'static,
        V: Fn(u64, &DensityMatrix) -> Result<f64> + Send + Sync + 'static,
    {
        Self::build(
            name.into(),
            key_bits,
            output_qubits,
            StateGen::Mixed(Arc::new(f)),
            Verifier::Custom(Arc::new(verifier)),
        )
    }

    fn build(name: String, key_bits: usize, output_qubits: usize, gen: StateGen, verifier: Verifier) -> Result<Self> {
        if key_bits > 63 {
            return Err(Error::ParamTooLarge(format!("{key_bits}-bit keys")));
        }
        cap::check(output_qubits)?;
        Ok(OwsgScheme {
            name,
            key_bits,
            output_qubits,
            keys: KeyDistribution::Uniform,
            gen,
            verifier,
            correctness_slack: 0.0,
            metadata: BTreeMap::new(),
            table: Arc::new(OnceLock::new()),
        })
    }

    /// Replaces the verifier (e.g. a custom test on pure outputs).
    pub fn with_verifier<V>(mut self, v: V) -> Self
    where
        V: Fn(u64, &DensityMatrix) -> Result<f64> + Send + Sync + 'static,
    {
        self.verifier = Verifier::Custom(Arc::new(v));
        self
    }

    pub fn with_key_distribution(mut self, weights: Vec<f64>) -> Result<Self> {
        if self.key_bits > MAX_ENUMERABLE_KEY_BITS {
            return Err(Error::ParamTooLarge(format!(
                "weighted keys need key_bits <= {MAX_ENUMERABLE_KEY_BITS}"
            )));
        }
        if weights.len() != 1usize << self.key_bits {
            return Err(Error::BadDistribution(format!(
                "{} weights for {} keys",
                weights.len(),
                1u64 << self.key_bits
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::BadDistribution("negative or NaN weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > crate::qcore::EPS {
            return Err(Error::BadDistribution(format!("weights sum to {total}")));
        }
        self.keys = KeyDistribution::Weighted(Arc::new(weights));
        Ok(self)
    }

    pub fn with_correctness_slack(mut self, slack: f64) -> Self {
        self.correctness_slack = slack;
        self
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn key_bits(&self) -> usize {
        self.key_bits
    }

    pub fn output_qubits(&self) -> usize {
        self.output_qubits
    }

    pub fn key_distribution(&self) -> &KeyDistribution {
        &self.keys
    }

    pub fn correctness_slack(&self) -> f64 {
        self.correctness_slack
    }

    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.gen, StateGen::Pure(_))
    }

    pub fn uses_projection_verifier(&self) -> bool {
        matches!(self.verifier, Verifier::Projection)
    }

    pub fn num_keys(&self) -> u64 {
        1u64 << self.key_bits
    }

    /// `KeyGen`.
    pub fn sample_key(&self, rng: &mut Rng) -> u64 {
        match &self.keys {
            KeyDistribution::Uniform => {
                if self.key_bits == 0 {
                    0
                } else {
                    rng.below(self.num_keys())
                }
            }
            KeyDistribution::Weighted(w) => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (k, p) in w.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return k as u64;
                    }
                }
                // rounding: last key with positive weight
                w.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
            }
        }
    }

    pub fn key_probability(&self, key: u64) -> f64 {
        if key >= self.num_keys() {
            return 0.0;
        }
        match &self.keys {
            KeyDistribution::Uniform => 1.0 / self.num_keys() as f64,
            KeyDistribution::Weighted(w) => w[key as usize],
        }
    }

    fn check_key(&self, key: u64) -> Result<()> {
        if key >= self.num_keys() {
            return Err(Error::InvalidParam(format!(
                "key {key} outside a {}-bit key space",
                self.key_bits
            )));
        }
        Ok(())
    }

    fn cacheable(&self) -> bool {
        self.is_pure()
            && self.key_bits <= MAX_ENUMERABLE_KEY_BITS
            && (1usize << self.key_bits).saturating_mul(1usize << self.output_qubits) <= TABLE_AMPLITUDE_LIMIT
    }

    /// All output states, indexed by key. Cached when small.
    pub fn states_table(&self) -> Result<Arc<Vec<PureState>>> {
        if let Some(t) = self.table.get() {
            return Ok(t.clone());
        }
        let StateGen::Pure(f) = &self.gen else {
            return Err(Error::InvalidParam("states_table needs pure outputs".into()));
        };
        if self.key_bits > MAX_ENUMERABLE_KEY_BITS {
            return Err(Error::ParamTooLarge(format!("enumerating {} key bits", self.key_bits)));
        }
        let states = (0..self.num_keys())
            .map(|k| self.checked_output(f(k)?))
            .collect::<Result<Vec<_>>>()?;
        let states = Arc::new(states);
        if self.cacheable() {
            let _ = self.table.set(states.clone());
        }
        Ok(states)
    }

    fn checked_output(&self, psi: PureState) -> Result<PureState> {
        if psi.num_qubits() != self.output_qubits {
            return Err(Error::DimensionMismatch {
                left: psi.num_qubits(),
                right: self.output_qubits,
            });
        }
        Ok(psi)
    }

    /// `StateGen(k)` for pure schemes.
    pub fn pure_state(&self, key: u64) -> Result<PureState> {
        self.check_key(key)?;
        let StateGen::Pure(f) = &self.gen else {
            return Err(Error::InvalidParam(format!("scheme {} has mixed outputs", self.name)));
        };
        if self.cacheable() {
            return Ok(self.states_table()?[key as usize].clone());
        }
        self.checked_output(f(key)?)
    }

    /// `StateGen(k)` as a density matrix.
    pub fn state(&self, key: u64) -> Result<DensityMatrix> {
        self.check_key(key)?;
        match &self.gen {
            StateGen::Pure(_) => Ok(self.pure_state(key)?.density()),
            StateGen::Mixed(f) => {
                let rho = f(key)?;
                if rho.num_qubits() != self.output_qubits {
                    return Err(Error::DimensionMismatch {
                        left: rho.num_qubits(),
                        right: self.output_qubits,
                    });
                }
                Ok(rho)
            }
        }
    }

    /// `Ver(k', ρ)`.
    pub fn verify(&self, candidate: u64, rho: &DensityMatrix) -> Result<f64> {
        self.check_key(candidate)?;
        match &self.verifier {
            Verifier::Projection => {
                let phi = self.pure_state(candidate)?;
                if phi.dim() != rho.dim() {
                    return Err(Error::DimensionMismatch {
                        left: phi.dim(),
                        right: rho.dim(),
                    });
                }
                let v = phi.amplitudes();
                Ok((v.adjoint() * rho.matrix() * v)[(0, 0)].re.clamp(0.0, 1.0))
            }
            Verifier::Custom(f) => Ok(f(candidate, rho)?.clamp(0.0, 1.0)),
        }
    }

    /// `Ver(k', |ψ⟩)` for a pure challenge.
    pub fn verify_pure(&self, candidate: u64, psi: &PureState) -> Result<f64> {
        self.check_key(candidate)?;
        match &self.verifier {
            Verifier::Projection => Ok(self.pure_state(candidate)?.overlap_sq(psi)?.min(1.0)),
            Verifier::Custom(f) => Ok(f(candidate, &psi.density())?.clamp(0.0, 1.0)),
        }
    }

    /// Acceptance probability of `candidate` on one copy of `φ_key`.
    pub fn accept(&self, candidate: u64, key: u64) -> Result<f64> {
        if self.is_pure() {
            self.verify_pure(candidate, &self.pure_state(key)?)
        } else {
            self.verify(candidate, &self.state(key)?)
        }
    }

    /// `E_k Ver(k, φ_k)` by enumeration.
    pub fn correctness(&self) -> Result<f64> {
        if self.key_bits > MAX_ENUMERABLE_KEY_BITS {
            return Err(Error::ParamTooLarge(format!("enumerating {} key bits", self.key_bits)));
        }
        let mut acc = 0.0;
        for k in 0..self.num_keys() {
            let p = self.key_probability(k);
            if p > 0.0 {
                acc += p * self.accept(k, k)?;
            }
        }
        Ok(acc)
    }
}

/// The adversary's view of one trial: `t` copies of `φ_k` plus the public
/// scheme description.
pub struct Challenge<'a> {
    scheme: &'a OwsgScheme,
    target: Target,
    copies: u64,
    mode: CopyMode,
    used: Cell<u64>,
}

enum Target {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl<'a> Challenge<'a> {
    pub fn for_key(scheme: &'a OwsgScheme, key: u64, copies: u64, mode: CopyMode) -> Result<Self> {
        let target = if scheme.is_pure() {
            Target::Pure(scheme.pure_state(key)?)
        } else {
            Target::Mixed(scheme.state(key)?)
        };
        Ok(Challenge {
            scheme,
            target,
            copies,
            mode,
            used: Cell::new(0),
        })
    }

    pub fn scheme(&self) -> &OwsgScheme {
        self.scheme
    }

    pub fn copies(&self) -> u64 {
        self.copies
    }

    pub fn mode(&self) -> CopyMode {
        self.mode
    }

    /// Copies consumed so far by [`Challenge::measure_copies`].
    pub fn copies_used(&self) -> u64 {
        self.used.get()
    }

    fn single_copy(&self) -> DensityMatrix {
        match &self.target {
            Target::Pure(p) => p.density(),
            Target::Mixed(r) => r.clone(),
        }
    }

    /// The literal joint state `φ^{⊗t}`.
    pub fn joint(&self) -> Result<DensityMatrix> {
        let total = (self.copies as usize).saturating_mul(self.scheme.output_qubits);
        cap::check(total)?;
        self.single_copy().power(self.copies as usize)
    }

    /// The exact single-copy state; only in oracle mode.
    pub fn exact_state(&self) -> Result<DensityMatrix> {
        match self.mode {
            CopyMode::Oracle => Ok(self.single_copy()),
            CopyMode::Sampled => Err(Error::AdversaryFailure(
                "exact state access requires oracle mode".into(),
            )),
        }
    }

    /// Measures `{Π, I-Π}` on `shots` fresh copies and returns the number of
    /// `Π` outcomes. In sampled mode the total is limited to `t` copies.
    pub fn measure_copies(&self, projector: &Projector, shots: u64, rng: &mut Rng) -> Result<u64> {
        let used = self.used.get().saturating_add(shots);
        if self.mode == CopyMode::Sampled && used > self.copies {
            return Err(Error::AdversaryFailure(format!(
                "requested {used} copies, only {} available",
                self.copies
            )));
        }
        self.used.set(used);
        measure_counts(&self.single_copy(), projector, shots, rng)
    }
}

/// An algorithm that tries to recover an accepting key. `Ok(None)` is ⊥.
pub trait Adversary: Sync {
    fn name(&self) -> String;

    fn attack(&self, challenge: &Challenge<'_>, rng: &mut Rng) -> Result<Option<u64>>;
}

/// Adapter turning a closure into an [`Adversary`].
pub struct FnAdversary<F> {
    name: String,
    f: F,
}

impl<F> FnAdversary<F>
where
    F: Fn(&Challenge<'_>, &mut Rng) -> Result<Option<u64>> + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnAdversary { name: name.into(), f }
    }
}

impl<F> Adversary for FnAdversary<F>
where
    F: Fn(&Challenge<'_>, &mut Rng) -> Result<Option<u64>> + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn attack(&self, challenge: &Challenge<'_>, rng: &mut Rng) -> Result<Option<u64>> {
        (self.f)(challenge, rng)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameOptions {
    pub copies: u64,
    pub trials: u64,
    pub mode: CopyMode,
    pub scoring: Scoring,
    /// Record `||φ_k - φ_{k'}||_tr` for every non-⊥ guess.
    pub record_td: bool,
}

impl Default for GameOptions {
    fn default() -> Self {
        GameOptions {
            copies: 1,
            trials: 1000,
            mode: CopyMode::Sampled,
            scoring: Scoring::Exact,
            record_td: false,
        }
    }
}

/// Plays the one-wayness game `trials` times.
///
/// Trial `i` uses the child stream `("trial", i)` of `rng`, so the report
/// does not depend on scheduling. Adversary errors other than
/// [`Error::CapExceeded`] count as losses and are tallied in `failures`.
pub fn run_onewayness_game(
    scheme: &OwsgScheme,
    adversary: &dyn Adversary,
    opts: &GameOptions,
    rng: &Rng,
) -> Result<GameReport> {
    let records = (0..opts.trials)
        .into_par_iter()
        .map(|i| play_trial(scheme, adversary, opts, rng.child_indexed("trial", i), i))
        .collect::<Result<Vec<_>>>()?;
    Ok(GameReport::from_records(
        format!("onewayness/{}/{}", scheme.name(), adversary.name()),
        records,
        opts.mode,
        opts.scoring,
    ))
}

fn play_trial(
    scheme: &OwsgScheme,
    adversary: &dyn Adversary,
    opts: &GameOptions,
    trial_rng: Rng,
    trial: u64,
) -> Result<TrialRecord> {
    let key = scheme.sample_key(&mut trial_rng.child("key"));
    let challenge = Challenge::for_key(scheme, key, opts.copies, opts.mode)?;
    let mut record = TrialRecord {
        trial,
        key,
        guess: None,
        accept_prob: 0.0,
        score: 0.0,
        bot: false,
        failure: None,
        td_to_target: None,
    };
    match adversary.attack(&challenge, &mut trial_rng.child("adversary")) {
        Ok(Some(guess)) => {
            record.guess = Some(guess);
            let p = match &challenge.target {
                Target::Pure(psi) => scheme.verify_pure(guess, psi),
                Target::Mixed(rho) => scheme.verify(guess, rho),
            };
            match p {
                Ok(p) => record.accept_prob = p,
                Err(e) => record.failure = Some(e.to_string()),
            }
            if opts.record_td && record.failure.is_none() {
                record.td_to_target = Some(match &challenge.target {
                    Target::Pure(psi) => {
                        let ov = scheme.pure_state(guess)?.overlap_sq(psi)?;
                        (1.0 - ov).max(0.0).sqrt()
                    }
                    Target::Mixed(rho) => trace_distance(rho, &scheme.state(guess)?)?,
                });
            }
        }
        Ok(None) => record.bot = true,
        Err(e @ Error::CapExceeded { .. }) => return Err(e),
        Err(e) => record.failure = Some(e.to_string()),
    }
    record.score = match opts.scoring {
        Scoring::Exact => record.accept_prob,
        Scoring::Sampled => {
            if trial_rng.child("verify").bernoulli(record.accept_prob) {
                1.0
            } else {
                0.0
            }
        }
    };
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_scheme(n: usize) -> OwsgScheme {
        OwsgScheme::pure("basis", n, n, move |k| PureState::basis(n, k as usize)).unwrap()
    }

    #[test]
    fn honest_key_wins_with_certainty() {
        let s = basis_scheme(3);
        let adv = FnAdversary::new("oracle-key", |ch: &Challenge<'_>, _: &mut Rng| {
            let rho = ch.exact_state()?;
            let k = (0..8).max_by(|a, b| rho.matrix()[(*a, *a)].re.total_cmp(&rho.matrix()[(*b, *b)].re));
            Ok(k.map(|k| k as u64))
        });
        let opts = GameOptions {
            trials: 200,
            mode: CopyMode::Oracle,
            ..Default::default()
        };
        let r = run_onewayness_game(&s, &adv, &opts, &Rng::from_seed(1)).unwrap();
        assert_eq!(r.estimate, 1.0);
    }

    #[test]
    fn fixed_wrong_key_never_wins() {
        // key 7 is orthogonal to every state the game samples
        let s = OwsgScheme::pure("basis", 3, 3, |k| PureState::basis(3, k as usize))
            .unwrap()
            .with_key_distribution((0..8).map(|k| if k < 7 { 1.0 / 7.0 } else { 0.0 }).collect())
            .unwrap();
        let adv = FnAdversary::new("fixed", |_: &Challenge<'_>, _: &mut Rng| Ok(Some(7)));
        let r = run_onewayness_game(&s, &adv, &GameOptions::default(), &Rng::from_seed(2)).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn failures_and_bots_are_losses() {
        let s = basis_scheme(1);
        let adv = FnAdversary::new("flaky", |ch: &Challenge<'_>, _: &mut Rng| {
            ch.exact_state()?;
            Ok(Some(0))
        });
        let r = run_onewayness_game(&s, &adv, &GameOptions::default(), &Rng::from_seed(3)).unwrap();
        assert_eq!(r.failures, r.trials);
        assert_eq!(r.wins, 0.0);

        let bot = FnAdversary::new("bot", |_: &Challenge<'_>, _: &mut Rng| Ok(None));
        let r = run_onewayness_game(&s, &bot, &GameOptions::default(), &Rng::from_seed(3)).unwrap();
        assert_eq!(r.bots, r.trials);
        assert_eq!(r.bot_rate(), 1.0);
    }

    #[test]
    fn joint_copies_respect_cap() {
        let s = basis_scheme(4);
        let ch = Challenge::for_key(&s, 3, 4, CopyMode::Sampled).unwrap();
        assert!(matches!(ch.joint(), Err(Error::CapExceeded { .. })));
        let ch = Challenge::for_key(&s, 3, 2, CopyMode::Sampled).unwrap();
        assert_eq!(ch.joint().unwrap().num_qubits(), 8);
    }

    #[test]
    fn sampled_copy_budget_is_enforced() {
        let s = basis_scheme(1);
        let ch = Challenge::for_key(&s, 1, 10, CopyMode::Sampled).unwrap();
        let p = Projector::onto(&PureState::basis(1, 1).unwrap());
        let mut rng = Rng::from_seed(0);
        assert_eq!(ch.measure_copies(&p, 10, &mut rng).unwrap(), 10);
        assert!(ch.measure_copies(&p, 1, &mut rng).is_err());
    }

    #[test]
    fn reports_are_schedule_independent() {
        let s = basis_scheme(2);
        let adv = FnAdversary::new("random", |_: &Challenge<'_>, rng: &mut Rng| Ok(Some(rng.below(4))));
        let opts = GameOptions {
            trials: 300,
            scoring: Scoring::Sampled,
            ..Default::default()
        };
        let a = run_onewayness_game(&s, &adv, &opts, &Rng::from_seed(9)).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool
            .install(|| run_onewayness_game(&s, &adv, &opts, &Rng::from_seed(9)))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_keys_are_validated() {
        let s = basis_scheme(1);
        assert!(matches!(
            s.clone().with_key_distribution(vec![0.5, 0.6]),
            Err(Error::BadDistribution(_))
        ));
        let s = s.with_key_distribution(vec![0.0, 1.0]).unwrap();
        let mut rng = Rng::from_seed(4);
        assert!((0..50).all(|_| s.sample_key(&mut rng) == 1));
    }

    #[test]
    fn projection_verifier_is_squared_overlap() {
        let s = OwsgScheme::pure("plus", 1, 1, |k| {
            Ok(PureState::plus_phase(std::f64::consts::PI * k as f64))
        })
        .unwrap();
        assert!((s.accept(0, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(s.accept(1, 0).unwrap() < 1e-12);
        assert!((s.correctness().unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((s.verify(0, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }
}
