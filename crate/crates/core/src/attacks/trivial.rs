//! The random-key adversary and the pairwise quantities that bound it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{Adversary, Challenge, OwsgScheme};
use crate::qcore::{trace_distance, Rng};

/// Largest key space enumerated pair by pair.
pub const MAX_PAIR_ENUMERATION_KEYS: u64 = 1 << 12;

/// Ignores its copies and outputs a fresh key from `KeyGen`.
#[derive(Clone, Debug)]
pub struct TrivialAdversary {
    name: String,
}

pub fn trivial_adversary(scheme: &OwsgScheme) -> TrivialAdversary {
    TrivialAdversary {
        name: format!("trivial/{}", scheme.name()),
    }
}

impl Adversary for TrivialAdversary {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn attack(&self, challenge: &Challenge<'_>, rng: &mut Rng) -> Result<Option<u64>> {
        Ok(Some(challenge.scheme().sample_key(rng)))
    }
}

fn support(scheme: &OwsgScheme) -> Result<Vec<(u64, f64)>> {
    if scheme.num_keys() > MAX_PAIR_ENUMERATION_KEYS {
        return Err(Error::ParamTooLarge(format!(
            "{} keys exceed the pair enumeration limit {MAX_PAIR_ENUMERATION_KEYS}",
            scheme.num_keys()
        )));
    }
    Ok((0..scheme.num_keys())
        .map(|k| (k, scheme.key_probability(k)))
        .filter(|&(_, p)| p > 0.0)
        .collect())
}

/// Exact win probability of [`TrivialAdversary`]:
/// `Σ_{k,k'} p_k p_{k'} Ver(k', φ_k)`, which for pure outputs with the
/// projection verifier is `E |⟨φ_k|φ_{k'}⟩|²`.
pub fn trivial_win_probability(scheme: &OwsgScheme) -> Result<f64> {
    let keys = support(scheme)?;
    if scheme.is_pure() && scheme.uses_projection_verifier() {
        let table = scheme.states_table()?;
        let mut acc = 0.0;
        for &(k, p) in &keys {
            for &(k2, p2) in &keys {
                acc += p * p2 * table[k as usize].overlap_sq(&table[k2 as usize])?;
            }
        }
        return Ok(acc);
    }
    let mut acc = 0.0;
    for &(k, p) in &keys {
        for &(k2, p2) in &keys {
            acc += p * p2 * scheme.accept(k2, k)?;
        }
    }
    Ok(acc)
}

/// Pairwise statistics over independent key pairs `(k, k')`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseQuantities {
    /// `E ||φ_k - φ_{k'}||_tr`.
    pub expected_td: f64,
    /// `E |⟨φ_k|φ_{k'}⟩|²` for pure outputs.
    pub expected_overlap: Option<f64>,
    /// `√(1 - 2^{-m})`.
    pub bound: f64,
    /// `E_k Ver(k, φ_k)`.
    pub correctness: f64,
    /// `correctness - expected_td`, a lower bound on the trivial win rate.
    pub win_lb: f64,
    /// `correctness - bound`.
    pub bound_lb: f64,
    /// `2^{-m-1}`, below `bound_lb` whenever correctness is 1.
    pub floor: f64,
    pub pairs: u64,
    pub exact: bool,
}

/// Computes [`PairwiseQuantities`] exactly when the key space has at most
/// [`MAX_PAIR_ENUMERATION_KEYS`] keys, otherwise from `samples` random pairs
/// drawn from `rng`. Correctness is then estimated on the same samples.
pub fn expected_pairwise_quantities(scheme: &OwsgScheme, samples: u64, rng: &Rng) -> Result<PairwiseQuantities> {
    let m = scheme.output_qubits();
    let bound = (1.0 - (-(m as f64)).exp2()).sqrt();
    let pure = scheme.is_pure();
    let pair_td = |k: u64, k2: u64| -> Result<(f64, Option<f64>)> {
        if pure {
            let ov = scheme.pure_state(k)?.overlap_sq(&scheme.pure_state(k2)?)?;
            Ok(((1.0 - ov).max(0.0).sqrt(), Some(ov)))
        } else {
            Ok((trace_distance(&scheme.state(k)?, &scheme.state(k2)?)?, None))
        }
    };
    let (mut td, mut ov, mut corr) = (0.0, 0.0, 0.0);
    let (pairs, exact) = if scheme.num_keys() <= MAX_PAIR_ENUMERATION_KEYS {
        let keys = support(scheme)?;
        for &(k, p) in &keys {
            corr += p * scheme.accept(k, k)?;
            for &(k2, p2) in &keys {
                let (t, o) = pair_td(k, k2)?;
                td += p * p2 * t;
                ov += p * p2 * o.unwrap_or(0.0);
            }
        }
        ((keys.len() * keys.len()) as u64, true)
    } else {
        if samples == 0 {
            return Err(Error::InvalidParam("zero pair samples".into()));
        }
        let mut r = rng.child("pairs");
        for _ in 0..samples {
            let k = scheme.sample_key(&mut r);
            let k2 = scheme.sample_key(&mut r);
            let (t, o) = pair_td(k, k2)?;
            td += t;
            ov += o.unwrap_or(0.0);
            corr += scheme.accept(k, k)?;
        }
        let n = samples as f64;
        td /= n;
        ov /= n;
        corr /= n;
        (samples, false)
    };
    Ok(PairwiseQuantities {
        expected_td: td,
        expected_overlap: pure.then_some(ov),
        bound,
        correctness: corr,
        win_lb: corr - td,
        bound_lb: corr - bound,
        floor: (-(m as f64) - 1.0).exp2(),
        pairs,
        exact,
    })
}
