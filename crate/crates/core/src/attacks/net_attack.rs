//! Tomography-plus-net attack on OWSGs with short outputs.
//!
//! With `γ = Δ/6`: estimate `M` from the challenge, collect the net elements
//! `𝒩` within `γ` of `M`, then sample keys `k_i` until the estimate of
//! `φ_{k_i}` lies within `γ` of some element of `𝒩`. Net elements are tried
//! in ascending index order and the first qualifying iteration wins; after
//! `T` iterations the attack outputs ⊥.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::net::{build_net, EpsNet, DEFAULT_NET_CEILING};
use super::tomography::{shots_per_pauli, tomography_oracle, tomography_sampled, Perturbation, TomographyEstimate};
use crate::error::{Error, Result};
use crate::primitives::{Adversary, Challenge, CopyMode, OwsgScheme};
use crate::qcore::{DensityMatrix, Rng};

/// How the attack estimates states.
#[derive(Clone, Debug)]
pub enum AttackTomography {
    /// Exact states plus the given perturbation (norm at most `γ`).
    Oracle(Perturbation),
    /// Pauli tomography on copies with failure probability `beta`.
    Sampled { beta: f64, shot_ceiling: u128 },
}

impl Default for AttackTomography {
    fn default() -> Self {
        AttackTomography::Oracle(Perturbation::None)
    }
}

/// Optional settings of [`net_attack`]. `γ` is always `Δ/6`.
#[derive(Clone, Debug)]
pub struct NetAttackConfig {
    /// Security parameter used only in the `T` and copy-count formulas.
    pub lam: u64,
    /// Per-trial failure budget; defaults to `1/λ`.
    pub failure_budget: Option<f64>,
    /// Overrides `T`.
    pub iterations: Option<u64>,
    pub tomography: AttackTomography,
    pub net_ceiling: u128,
}

impl Default for NetAttackConfig {
    fn default() -> Self {
        NetAttackConfig {
            lam: 16,
            failure_budget: None,
            iterations: None,
            tomography: AttackTomography::default(),
            net_ceiling: DEFAULT_NET_CEILING,
        }
    }
}

/// Derived parameters of the attack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetAttackParams {
    #[serde(rename = "delta")]
    pub big_delta: f64,
    pub gamma: f64,
    pub lam: u64,
    pub net_size: u64,
    /// `γ / |Net|`.
    pub eps_bad: f64,
    pub failure_budget: f64,
    /// `T`.
    pub iterations: u64,
    /// `⌈|Net| log₂(1/failure_budget) / γ⌉`.
    pub required_iterations: u64,
    pub c_impl: f64,
    pub mode: CopyMode,
    /// Copies the challenge must provide in sampled mode.
    pub copies_required: u64,
}

/// How one invocation ended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetAttackOutcome {
    pub key: Option<u64>,
    /// 0-based iteration that produced the key.
    pub iteration: Option<u64>,
    pub net_index: Option<usize>,
    /// `|𝒩|`.
    pub near_count: usize,
}

pub struct NetAttack {
    name: String,
    params: NetAttackParams,
    net: EpsNet,
    tomography: AttackTomography,
    /// Keys with positive probability, if enumerable.
    support: Option<usize>,
}

/// Builds the attack for `scheme` with advantage gap `big_delta ∈ (0, 1)`.
pub fn net_attack(scheme: &OwsgScheme, big_delta: f64, config: &NetAttackConfig) -> Result<NetAttack> {
    if !(big_delta > 0.0 && big_delta < 1.0) {
        return Err(Error::InvalidParam(format!("advantage gap {big_delta} outside (0, 1)")));
    }
    let gamma = big_delta / 6.0;
    let d = 1usize << scheme.output_qubits();
    let net = build_net(d, gamma, config.net_ceiling)?;
    let failure_budget = config.failure_budget.unwrap_or(1.0 / config.lam as f64);
    if !(failure_budget > 0.0 && failure_budget < 1.0) {
        return Err(Error::InvalidParam(format!("failure budget {failure_budget}")));
    }
    let net_size = net.len() as u64;
    let required = (net_size as f64 * (1.0 / failure_budget).log2() / gamma).ceil() as u64;
    let (mode, copies_required) = match &config.tomography {
        AttackTomography::Oracle(p) => {
            if let Perturbation::Random { norm } = p {
                if *norm > gamma {
                    return Err(Error::InvalidParam(format!("perturbation {norm} exceeds γ = {gamma}")));
                }
            }
            (CopyMode::Oracle, 0)
        }
        AttackTomography::Sampled { beta, .. } => {
            let per = shots_per_pauli(d, gamma, *beta)?;
            let total = per.saturating_mul((d * d - 1) as u128);
            (CopyMode::Sampled, total.min(u64::MAX as u128) as u64)
        }
    };
    let support = (scheme.num_keys() <= 1 << 16).then(|| {
        (0..scheme.num_keys())
            .filter(|&k| scheme.key_probability(k) > 0.0)
            .count()
    });
    Ok(NetAttack {
        name: format!("net/{}", scheme.name()),
        params: NetAttackParams {
            big_delta,
            gamma,
            lam: config.lam,
            net_size,
            eps_bad: gamma / net_size as f64,
            failure_budget,
            iterations: config.iterations.unwrap_or(required),
            required_iterations: required,
            c_impl: net.grid().c_impl,
            mode,
            copies_required,
        },
        net,
        tomography: config.tomography.clone(),
        support,
    })
}

impl NetAttack {
    pub fn params(&self) -> &NetAttackParams {
        &self.params
    }

    pub fn net(&self) -> &EpsNet {
        &self.net
    }

    fn estimate_challenge(&self, ch: &Challenge<'_>, rng: &mut Rng) -> Result<TomographyEstimate> {
        let g = self.params.gamma;
        match &self.tomography {
            AttackTomography::Oracle(p) => tomography_oracle(&ch.exact_state()?, g, p, rng),
            AttackTomography::Sampled { beta, shot_ceiling } => tomography_sampled(ch, g, *beta, *shot_ceiling, rng),
        }
    }

    fn estimate_state(&self, rho: &DensityMatrix, rng: &mut Rng) -> Result<TomographyEstimate> {
        let g = self.params.gamma;
        match &self.tomography {
            AttackTomography::Oracle(p) => tomography_oracle(rho, g, p, rng),
            AttackTomography::Sampled { beta, shot_ceiling } => tomography_sampled(rho, g, *beta, *shot_ceiling, rng),
        }
    }

    /// Runs the attack and reports where it stopped.
    pub fn run(&self, ch: &Challenge<'_>, rng: &mut Rng) -> Result<NetAttackOutcome> {
        let scheme = ch.scheme();
        let gamma = self.params.gamma;
        let m = self.estimate_challenge(ch, rng)?;
        let near = self.net.within(&m.estimate, gamma);
        let mut outcome = NetAttackOutcome {
            key: None,
            iteration: None,
            net_index: None,
            near_count: near.len(),
        };
        if near.is_empty() {
            // no iteration can terminate
            return Ok(outcome);
        }
        // exact estimates depend only on the key
        let deterministic = matches!(self.tomography, AttackTomography::Oracle(Perturbation::None));
        let mut cache: HashMap<u64, Option<usize>> = HashMap::new();
        for i in 0..self.params.iterations {
            let k = scheme.sample_key(rng);
            let hit = match cache.get(&k) {
                Some(&h) => h,
                None => {
                    let est = self.estimate_state(&scheme.state(k)?, rng)?;
                    let h = self.net.first_within(&est.estimate, &near, gamma);
                    if deterministic {
                        cache.insert(k, h);
                    }
                    h
                }
            };
            if let Some(j) = hit {
                outcome.key = Some(k);
                outcome.iteration = Some(i);
                outcome.net_index = Some(j);
                return Ok(outcome);
            }
            if deterministic && Some(cache.len()) == self.support {
                // every key has been seen and none qualifies
                return Ok(outcome);
            }
        }
        Ok(outcome)
    }
}

impl Adversary for NetAttack {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn attack(&self, challenge: &Challenge<'_>, rng: &mut Rng) -> Result<Option<u64>> {
        Ok(self.run(challenge, rng)?.key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::tomography::DEFAULT_SHOT_CEILING;
    use crate::primitives::{run_onewayness_game, GameOptions, Scoring};
    use crate::qcore::{haar_sample, PureState};

    fn haar_scheme(n: usize, m: usize, seed: u64) -> OwsgScheme {
        OwsgScheme::pure("haar", n, m, move |k| {
            haar_sample(m, &mut Rng::from_seed(seed).child_indexed("key", k))
        })
        .unwrap()
    }

    fn oracle_opts(trials: u64) -> GameOptions {
        GameOptions {
            trials,
            mode: CopyMode::Oracle,
            scoring: Scoring::Exact,
            record_td: true,
            ..Default::default()
        }
    }

    #[test]
    fn parameters() {
        let s = haar_scheme(3, 1, 1);
        let a = net_attack(&s, 0.2, &NetAttackConfig::default()).unwrap();
        let p = a.params();
        assert_eq!(p.gamma, 0.2 / 6.0);
        assert_eq!(p.failure_budget, 1.0 / 16.0);
        let need = (p.net_size as f64 * 4.0 / p.gamma).ceil() as u64;
        assert_eq!(p.iterations, need);
        assert!(p.iterations as f64 >= (1.0 / p.failure_budget).log2() / p.eps_bad - 1.0);
        assert!(net_attack(&s, 1.5, &NetAttackConfig::default()).is_err());
    }

    #[test]
    fn single_key_scheme_is_broken_immediately() {
        let s = OwsgScheme::pure("one", 0, 1, |_| PureState::basis(1, 0)).unwrap();
        let a = net_attack(&s, 0.5, &NetAttackConfig::default()).unwrap();
        let r = run_onewayness_game(&s, &a, &oracle_opts(50), &Rng::from_seed(2)).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.bots, 0);
    }

    #[test]
    fn haar_toy_scheme_is_broken() {
        let s = haar_scheme(3, 1, 5);
        let a = net_attack(&s, 0.2, &NetAttackConfig::default()).unwrap();
        let r = run_onewayness_game(&s, &a, &oracle_opts(100), &Rng::from_seed(3)).unwrap();
        assert!(r.estimate >= 0.8);
        let g = a.params().gamma;
        for rec in &r.records {
            if let Some(td) = rec.td_to_target {
                assert!(td <= 4.0 * g + 1e-9);
            }
        }
    }

    #[test]
    fn perturbed_oracle_still_succeeds() {
        let s = haar_scheme(2, 1, 8);
        let cfg = NetAttackConfig {
            tomography: AttackTomography::Oracle(Perturbation::Random { norm: 0.2 / 6.0 }),
            ..Default::default()
        };
        let a = net_attack(&s, 0.2, &cfg).unwrap();
        let r = run_onewayness_game(&s, &a, &oracle_opts(30), &Rng::from_seed(4)).unwrap();
        assert!(r.estimate >= 0.7);
    }

    #[test]
    fn transcripts_are_deterministic() {
        let s = haar_scheme(3, 1, 5);
        let a = net_attack(&s, 0.3, &NetAttackConfig::default()).unwrap();
        let r1 = run_onewayness_game(&s, &a, &oracle_opts(40), &Rng::from_seed(9)).unwrap();
        let r2 = run_onewayness_game(&s, &a, &oracle_opts(40), &Rng::from_seed(9)).unwrap();
        assert_eq!(r1.records, r2.records);
    }

    #[test]
    fn sampled_mode_needs_copies() {
        let s = OwsgScheme::pure("one", 0, 1, |_| PureState::basis(1, 1)).unwrap();
        let cfg = NetAttackConfig {
            tomography: AttackTomography::Sampled {
                beta: 0.01,
                shot_ceiling: DEFAULT_SHOT_CEILING,
            },
            ..Default::default()
        };
        let a = net_attack(&s, 0.6, &cfg).unwrap();
        let copies = a.params().copies_required;
        let opts = GameOptions {
            trials: 5,
            copies,
            mode: CopyMode::Sampled,
            ..Default::default()
        };
        let r = run_onewayness_game(&s, &a, &opts, &Rng::from_seed(1)).unwrap();
        assert_eq!(r.estimate, 1.0);
        let short = GameOptions {
            copies: copies - 1,
            ..opts
        };
        let r = run_onewayness_game(&s, &a, &short, &Rng::from_seed(1)).unwrap();
        assert_eq!(r.failures, 5);
    }
}
