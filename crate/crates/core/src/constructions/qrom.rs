//! Fingerprinting from a random oracle: `|h_x⟩ = 2^{-m/2} Σ_z (-1)^{H(x‖z)} |z⟩`.

use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::qcore::linalg::{c, CVector};
use crate::qcore::{cap, PureState, Rng};

/// Largest oracle domain, in bits.
pub const MAX_ORACLE_INPUT_BITS: usize = 24;

/// A seeded random function `{0,1}^k → {0,1}`, stored as a bit table.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomOracle {
    input_bits: usize,
    bits: Arc<Vec<u64>>,
    seed: Option<u64>,
}

impl RandomOracle {
    pub fn new(input_bits: usize, seed: u64) -> Result<Self> {
        Self::check_size(input_bits)?;
        let words = (1usize << input_bits).div_ceil(64);
        let mut rng = Rng::from_seed(seed).child("oracle");
        let bits = (0..words).map(|_| rng.next_u64()).collect();
        Ok(RandomOracle {
            input_bits,
            bits: Arc::new(bits),
            seed: Some(seed),
        })
    }

    /// The degenerate oracle that always returns `value`.
    pub fn constant(input_bits: usize, value: bool) -> Result<Self> {
        Self::check_size(input_bits)?;
        let words = (1usize << input_bits).div_ceil(64);
        let fill = if value { u64::MAX } else { 0 };
        Ok(RandomOracle {
            input_bits,
            bits: Arc::new(vec![fill; words]),
            seed: None,
        })
    }

    fn check_size(input_bits: usize) -> Result<()> {
        if input_bits > MAX_ORACLE_INPUT_BITS {
            return Err(Error::ParamTooLarge(format!(
                "oracle on {input_bits} input bits (max {MAX_ORACLE_INPUT_BITS})"
            )));
        }
        Ok(())
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn eval(&self, input: u64) -> bool {
        let i = input as usize & ((1usize << self.input_bits) - 1);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }
}

/// `|h_x⟩` on `m` qubits for an `ℓ`-bit `x`, where the oracle input is
/// `x‖z` (`x` in the high bits).
pub fn qrom_fingerprint(oracle: &RandomOracle, ell: usize, m: usize, x: u64) -> Result<PureState> {
    cap::check(m)?;
    if ell + m != oracle.input_bits() {
        return Err(Error::DimensionMismatch {
            left: ell + m,
            right: oracle.input_bits(),
        });
    }
    if x >> ell != 0 {
        return Err(Error::InvalidParam(format!("message {x} wider than {ell} bits")));
    }
    let amp = ((1u64 << m) as f64).sqrt().recip();
    let v = CVector::from_fn(1 << m, |z, _| {
        let sign = if oracle.eval((x << m) | z as u64) { -amp } else { amp };
        c(sign, 0.0)
    });
    PureState::new(v)
}

/// Exhaustive scan of `|⟨h_x|h_y⟩|` over all `x ≠ y`.
#[derive(Clone, Debug, PartialEq)]
pub struct QromScan {
    pub pairs: u64,
    pub max_abs_overlap: f64,
    /// Set when some pair is indistinguishable (overlap 1).
    pub degenerate: bool,
    pub eta: f64,
    pub within_eta: bool,
}

pub fn qrom_overlap_scan(oracle: &RandomOracle, ell: usize, m: usize, eta: f64) -> Result<QromScan> {
    if ell > 10 {
        return Err(Error::ParamTooLarge(format!("exhaustive scan over {ell} message bits")));
    }
    let states = (0..1u64 << ell)
        .map(|x| qrom_fingerprint(oracle, ell, m, x))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = 0;
    let mut max = 0.0f64;
    for x in 0..states.len() {
        for y in (x + 1)..states.len() {
            pairs += 1;
            max = max.max(states[x].inner(&states[y])?.norm());
        }
    }
    Ok(QromScan {
        pairs,
        max_abs_overlap: max,
        degenerate: max >= 1.0 - 1e-12,
        eta,
        within_eta: max <= eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_overlap_fully() {
        let o = RandomOracle::new(5, 1).unwrap();
        let a = qrom_fingerprint(&o, 2, 3, 2).unwrap();
        assert!((a.overlap_sq(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_is_signed_agreement() {
        let o = RandomOracle::new(5, 9).unwrap();
        for x in 0..4u64 {
            for y in 0..4u64 {
                let a = qrom_fingerprint(&o, 2, 3, x).unwrap();
                let b = qrom_fingerprint(&o, 2, 3, y).unwrap();
                let formula: f64 = (0..8u64)
                    .map(|z| {
                        if o.eval(x << 3 | z) ^ o.eval(y << 3 | z) {
                            -1.0
                        } else {
                            1.0
                        }
                    })
                    .sum::<f64>()
                    / 8.0;
                assert!((a.inner(&b).unwrap().re - formula).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scan_covers_all_pairs() {
        let o = RandomOracle::new(5, 3).unwrap();
        let s = qrom_overlap_scan(&o, 2, 3, 0.9).unwrap();
        assert_eq!(s.pairs, 6);
        assert!(s.max_abs_overlap <= 1.0);
    }

    #[test]
    fn constant_oracle_is_flagged() {
        let o = RandomOracle::constant(5, true).unwrap();
        let s = qrom_overlap_scan(&o, 2, 3, 0.5).unwrap();
        assert!(s.degenerate);
        assert!(!s.within_eta);
    }
}
