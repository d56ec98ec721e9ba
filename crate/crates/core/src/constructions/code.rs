//! Binary linear codes with exhaustively certified minimum distance.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::Rng;

pub const MAX_MESSAGE_BITS: usize = 16;
pub const MAX_CODEWORD_BITS: usize = 64;

/// Default relative-agreement target: codes must satisfy `δ < 11/12`.
pub const DEFAULT_TARGET_DELTA: f64 = 11.0 / 12.0;

const SEARCH_BATCH: usize = 32;

/// `E: {0,1}^ℓ → {0,1}^m`, `E(x) = x G`.
///
/// Bit `i` of a message and bit `j` of a codeword are counted from the most
/// significant end, so row `i` of the generator is the image of the `i`-th
/// message bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    ell: usize,
    m: usize,
    rows: Vec<u64>,
    d_min: usize,
}

fn mask(bits: usize) -> u64 {
    if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Minimum weight over nonzero messages, by Gray-code enumeration.
fn min_distance(rows: &[u64]) -> usize {
    let ell = rows.len();
    let mut cw = 0u64;
    let mut best = usize::MAX;
    for g in 1u64..(1u64 << ell) {
        // flip the row whose message bit changes between Gray codes g-1 and g
        let changed = g.trailing_zeros() as usize;
        cw ^= rows[ell - 1 - changed];
        best = best.min(cw.count_ones() as usize);
    }
    if ell == 0 {
        0
    } else {
        best
    }
}

impl LinearCode {
    /// Builds a code from generator rows (`ℓ` rows of `m` bits each) and
    /// certifies its minimum distance.
    pub fn from_generator(m: usize, rows: Vec<u64>) -> Result<Self> {
        let ell = rows.len();
        if ell == 0 || ell > MAX_MESSAGE_BITS {
            return Err(Error::ParamTooLarge(format!(
                "{ell} message bits (allowed 1..={MAX_MESSAGE_BITS})"
            )));
        }
        if m == 0 || m > MAX_CODEWORD_BITS {
            return Err(Error::ParamTooLarge(format!(
                "{m} codeword bits (allowed 1..={MAX_CODEWORD_BITS})"
            )));
        }
        if rows.iter().any(|&r| r & !mask(m) != 0) {
            return Err(Error::InvalidParam(format!("generator row wider than {m} bits")));
        }
        let d_min = min_distance(&rows);
        Ok(LinearCode { ell, m, rows, d_min })
    }

    /// `ℓ = 1` repetition code of length `m`.
    pub fn repetition(m: usize) -> Result<Self> {
        Self::from_generator(m, vec![mask(m.min(64))])
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    /// `δ = 1 - d_min / m`: distinct codewords agree on at most `δ m`
    /// positions.
    pub fn delta(&self) -> f64 {
        1.0 - self.d_min as f64 / self.m as f64
    }

    pub fn encode(&self, x: u64) -> u64 {
        (0..self.ell)
            .filter(|i| x >> (self.ell - 1 - i) & 1 == 1)
            .fold(0u64, |acc, i| acc ^ self.rows[i])
    }

    /// `E_j(x)`, `j` counted from 0.
    pub fn bit(&self, codeword: u64, j: usize) -> bool {
        codeword >> (self.m - 1 - j) & 1 == 1
    }

    /// Number of positions where `E(x)` and `E(y)` agree.
    pub fn agreement(&self, x: u64, y: u64) -> usize {
        self.m - (self.encode(x) ^ self.encode(y)).count_ones() as usize
    }

    /// Generator rows as zero-padded hex strings.
    pub fn generator_hex(&self) -> Vec<String> {
        let width = self.m.div_ceil(4);
        self.rows.iter().map(|r| format!("{r:0width$x}")).collect()
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        CodeDescriptor {
            ell: self.ell,
            m: self.m,
            generator: self.generator_hex(),
            d_min: self.d_min,
            delta: self.delta(),
            r: None,
            eta: None,
            seed: None,
        }
    }

    /// Rebuilds and re-certifies a code; the recorded `d_min` and `delta`
    /// must match.
    pub fn from_descriptor(d: &CodeDescriptor) -> Result<Self> {
        if d.generator.len() != d.ell {
            return Err(Error::InvalidParam(format!(
                "{} generator rows for ell = {}",
                d.generator.len(),
                d.ell
            )));
        }
        let rows = d
            .generator
            .iter()
            .map(|h| u64::from_str_radix(h, 16).map_err(|e| Error::InvalidParam(format!("generator row {h:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let code = Self::from_generator(d.m, rows)?;
        if code.d_min != d.d_min || code.delta().to_bits() != d.delta.to_bits() {
            return Err(Error::InvalidParam(format!(
                "recorded d_min {} does not match certified {}",
                d.d_min, code.d_min
            )));
        }
        Ok(code)
    }
}

/// Serialized code, optionally with the fingerprint parameters built on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescriptor {
    pub ell: usize,
    pub m: usize,
    pub generator: Vec<String>,
    pub d_min: usize,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Outcome of a code search.
#[derive(Clone, Debug)]
pub struct CodeSearch {
    pub code: LinearCode,
    /// Index of the accepted candidate.
    pub tries: usize,
    pub seed: u64,
}

fn random_candidate(ell: usize, m: usize, rng: &mut Rng) -> LinearCode {
    let rows = (0..ell).map(|_| rng.next_u64() & mask(m)).collect();
    LinearCode::from_generator(m, rows).expect("validated sizes")
}

/// Draws random generator matrices until one has `δ < target_delta`.
///
/// Candidate `i` comes from the child stream `("candidate", i)`, so the
/// result does not depend on how the search is parallelized. On failure the
/// error reports the best `δ` seen.
pub fn build_linear_code(ell: usize, m: usize, target_delta: f64, max_tries: usize, rng: &Rng) -> Result<CodeSearch> {
    if ell == 0 || ell > MAX_MESSAGE_BITS || m == 0 || m > MAX_CODEWORD_BITS {
        return Err(Error::ParamTooLarge(format!(
            "code [{m}, {ell}] outside ell <= {MAX_MESSAGE_BITS}, m <= {MAX_CODEWORD_BITS}"
        )));
    }
    let mut best = f64::INFINITY;
    let mut start = 0;
    while start < max_tries {
        let end = (start + SEARCH_BATCH).min(max_tries);
        let batch: Vec<LinearCode> = (start..end)
            .into_par_iter()
            .map(|i| random_candidate(ell, m, &mut rng.child_indexed("candidate", i as u64)))
            .collect();
        for (offset, code) in batch.into_iter().enumerate() {
            let delta = code.delta();
            if delta < target_delta {
                return Ok(CodeSearch {
                    code,
                    tries: start + offset + 1,
                    seed: rng.seed(),
                });
            }
            best = best.min(delta);
        }
        start = end;
    }
    Err(Error::SearchExhausted {
        tries: max_tries,
        best_delta: best,
    })
}
