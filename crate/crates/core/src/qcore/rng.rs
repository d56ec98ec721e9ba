//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha20 generator keyed by a 32-byte key. A child
//! stream's key is a hash of the parent key and a label, so children never
//! depend on how much of the parent (or of a sibling) has been consumed.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    key: [u8; 32],
    inner: ChaCha20Rng,
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"qclab/root");
        h.update(seed.to_le_bytes());
        Self::from_key(seed, h.finalize().into())
    }

    fn from_key(seed: u64, key: [u8; 32]) -> Self {
        Self {
            seed,
            key,
            inner: ChaCha20Rng::from_seed(key),
        }
    }

    /// Root seed this stream descends from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// 64-bit tag identifying this stream; logged as the per-trial seed.
    pub fn stream_id(&self) -> u64 {
        u64::from_le_bytes(self.key[..8].try_into().expect("8 bytes"))
    }

    /// Child stream for `label`. Independent of the parent's position.
    pub fn child(&self, label: &str) -> Rng {
        self.derive(label.as_bytes(), None)
    }

    /// Child stream for `(label, index)`, e.g. one per trial.
    pub fn child_indexed(&self, label: &str, index: u64) -> Rng {
        self.derive(label.as_bytes(), Some(index))
    }

    fn derive(&self, label: &[u8], index: Option<u64>) -> Rng {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label);
        if let Some(i) = index {
            h.update([1u8]);
            h.update(i.to_le_bytes());
        } else {
            h.update([0u8]);
        }
        Self::from_key(self.seed, h.finalize().into())
    }

    /// Bernoulli draw: `true` with probability `p` (clamped to [0, 1]).
    pub fn bernoulli(&mut self, p: f64) -> bool {
        let p = p.clamp(0.0, 1.0);
        self.inner.random::<f64>() < p
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        self.inner.random_range(0..bound)
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
