//! Seeded toy stand-ins for one-way functions, PRGs and PRSGs.
//!
//! They expose only the interfaces (deterministic evaluation, output
//! lengths, injectivity) and make no hardness claims.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{cap, haar_sample, PureState, Rng};

/// Largest OWF input length (exhaustive injectivity scan).
pub const MAX_OWF_INPUT_BITS: usize = 20;
/// Largest PRG seed length (exhaustive injectivity scan).
pub const MAX_PRG_SEED_BITS: usize = 16;
/// Largest PRSG key length.
pub const MAX_PRSG_KEY_BITS: usize = 16;
const MAX_PRSG_AMPLITUDES: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    OwfRandomTable,
    OwfRandomInjection,
    OwfArx,
    PrgRandomInjection,
    PrgRandomTable,
    PrgDuplicate,
    PrsgHaar,
}

/// JSON description from which a back-end is rebuilt exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendDescriptor {
    pub kind: BackendKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub seed: u64,
    #[serde(default)]
    pub flags: BTreeMap<String, bool>,
}

impl BackendDescriptor {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn check_flags(&self, actual: &BTreeMap<String, bool>) -> Result<()> {
        for (k, v) in &self.flags {
            if actual.get(k) != Some(v) {
                return Err(Error::InvalidParam(format!(
                    "descriptor flag {k}={v} does not match the rebuilt back-end"
                )));
            }
        }
        Ok(())
    }
}

/// A rebuilt back-end of any kind.
#[derive(Clone, Debug)]
pub enum Backend {
    Owf(ToyOwf),
    Prg(ToyPrg),
    Prsg(HaarPrsg),
}

impl Backend {
    pub fn from_descriptor(d: &BackendDescriptor) -> Result<Self> {
        let need = |x: Option<usize>, name: &str| {
            x.ok_or_else(|| Error::InvalidParam(format!("{:?} descriptor needs {name}", d.kind)))
        };
        let out = match d.kind {
            BackendKind::OwfRandomTable => {
                Backend::Owf(ToyOwf::new(OwfKind::RandomTable, d.n, need(d.ell, "ell")?, d.seed)?)
            }
            BackendKind::OwfRandomInjection => {
                Backend::Owf(ToyOwf::new(OwfKind::RandomInjection, d.n, need(d.ell, "ell")?, d.seed)?)
            }
            BackendKind::OwfArx => Backend::Owf(ToyOwf::new(OwfKind::Arx, d.n, need(d.ell, "ell")?, d.seed)?),
            BackendKind::PrgRandomInjection => Backend::Prg(ToyPrg::new(PrgKind::RandomInjection, d.n, d.seed)?),
            BackendKind::PrgRandomTable => Backend::Prg(ToyPrg::new(PrgKind::RandomTable, d.n, d.seed)?),
            BackendKind::PrgDuplicate => Backend::Prg(ToyPrg::new(PrgKind::Duplicate, d.n, d.seed)?),
            BackendKind::PrsgHaar => Backend::Prsg(HaarPrsg::new(d.n, need(d.m, "m")?, d.seed)?),
        };
        d.check_flags(&out.descriptor().flags)?;
        Ok(out)
    }

    pub fn descriptor(&self) -> BackendDescriptor {
        match self {
            Backend::Owf(f) => f.descriptor(),
            Backend::Prg(g) => g.descriptor(),
            Backend::Prsg(p) => p.descriptor(),
        }
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// `count` distinct values below `2^bits`, uniformly among injections.
fn random_injection(count: usize, bits: usize, rng: &mut Rng) -> Vec<u64> {
    if bits <= 20 && count * 4 >= 1usize << bits {
        // dense case: partial Fisher-Yates over the whole range
        let mut pool: Vec<u64> = (0..1u64 << bits).collect();
        for i in 0..count {
            let j = i + rng.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    } else {
        let mut seen = HashSet::with_capacity(count);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let v = rng.next_u64() & mask(bits);
            if seen.insert(v) {
                out.push(v);
            }
        }
        out
    }
}

fn table_is_injective(table: &[u64]) -> bool {
    let mut sorted = table.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OwfKind {
    RandomTable,
    RandomInjection,
    /// Small add-rotate-xor mixer keyed by the seed.
    Arx,
}

/// Deterministic `f: {0,1}^n → {0,1}^ℓ`, stored as a table.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyOwf {
    kind: OwfKind,
    input_bits: usize,
    output_bits: usize,
    seed: u64,
    table: Arc<Vec<u64>>,
    injective: bool,
}

fn arx_round_keys(seed: u64) -> [u32; 8] {
    let mut rng = Rng::from_seed(seed).child("arx");
    let mut k = [0u32; 8];
    for x in k.iter_mut() {
        *x = rng.next_u32();
    }
    k
}

fn arx_eval(x: u64, keys: &[u32; 8]) -> u64 {
    let mut hi = (x >> 32) as u32;
    let mut lo = x as u32;
    for &k in keys {
        hi = (hi.rotate_right(8).wrapping_add(lo)) ^ k;
        lo = lo.rotate_left(3) ^ hi;
    }
    ((hi as u64) << 32) | lo as u64
}

impl ToyOwf {
    pub fn new(kind: OwfKind, input_bits: usize, output_bits: usize, seed: u64) -> Result<Self> {
        if input_bits > MAX_OWF_INPUT_BITS {
            return Err(Error::ParamTooLarge(format!(
                "OWF input of {input_bits} bits (max {MAX_OWF_INPUT_BITS})"
            )));
        }
        if output_bits == 0 || output_bits > 63 {
            return Err(Error::InvalidParam(format!("OWF output of {output_bits} bits")));
        }
        let count = 1usize << input_bits;
        let mut rng = Rng::from_seed(seed).child("owf");
        let table: Vec<u64> = match kind {
            OwfKind::RandomTable => (0..count).map(|_| rng.next_u64() & mask(output_bits)).collect(),
            OwfKind::RandomInjection => {
                if output_bits < input_bits {
                    return Err(Error::InvalidParam(format!(
                        "no injection from {input_bits} to {output_bits} bits"
                    )));
                }
                random_injection(count, output_bits, &mut rng)
            }
            OwfKind::Arx => {
                let keys = arx_round_keys(seed);
                (0..count as u64)
                    .map(|x| arx_eval(x, &keys) & mask(output_bits))
                    .collect()
            }
        };
        let injective = table_is_injective(&table);
        Ok(ToyOwf {
            kind,
            input_bits,
            output_bits,
            seed,
            table: Arc::new(table),
            injective,
        })
    }

    pub fn kind(&self) -> OwfKind {
        self.kind
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Exhaustively verified at construction.
    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        self.table
            .get(x as usize)
            .copied()
            .ok_or_else(|| Error::InvalidParam(format!("input {x} outside {} bits", self.input_bits)))
    }

    pub fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            kind: match self.kind {
                OwfKind::RandomTable => BackendKind::OwfRandomTable,
                OwfKind::RandomInjection => BackendKind::OwfRandomInjection,
                OwfKind::Arx => BackendKind::OwfArx,
            },
            n: self.input_bits,
            ell: Some(self.output_bits),
            m: None,
            seed: self.seed,
            flags: BTreeMap::from([("injective".to_string(), self.injective)]),
        }
    }
}

/// Draws the back-end seed from `rng`.
pub fn make_toy_owf(kind: OwfKind, input_bits: usize, output_bits: usize, rng: &mut Rng) -> Result<ToyOwf> {
    ToyOwf::new(kind, input_bits, output_bits, rng.next_u64())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrgKind {
    RandomInjection,
    RandomTable,
    /// `G(x) = x || x`.
    Duplicate,
}

/// Length-doubling `G: {0,1}^n → {0,1}^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyPrg {
    kind: PrgKind,
    seed_bits: usize,
    seed: u64,
    table: Arc<Vec<u64>>,
    injective: bool,
}

impl ToyPrg {
    pub fn new(kind: PrgKind, seed_bits: usize, seed: u64) -> Result<Self> {
        if seed_bits == 0 || seed_bits > MAX_PRG_SEED_BITS {
            return Err(Error::ParamTooLarge(format!(
                "PRG seed of {seed_bits} bits (allowed 1..={MAX_PRG_SEED_BITS})"
            )));
        }
        let count = 1usize << seed_bits;
        let out_bits = 2 * seed_bits;
        let mut rng = Rng::from_seed(seed).child("prg");
        let table: Vec<u64> = match kind {
            PrgKind::RandomInjection => random_injection(count, out_bits, &mut rng),
            PrgKind::RandomTable => (0..count).map(|_| rng.next_u64() & mask(out_bits)).collect(),
            PrgKind::Duplicate => (0..count as u64).map(|x| (x << seed_bits) | x).collect(),
        };
        let injective = table_is_injective(&table);
        Ok(ToyPrg {
            kind,
            seed_bits,
            seed,
            table: Arc::new(table),
            injective,
        })
    }

    pub fn kind(&self) -> PrgKind {
        self.kind
    }

    pub fn seed_bits(&self) -> usize {
        self.seed_bits
    }

    pub fn output_bits(&self) -> usize {
        2 * self.seed_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        self.table
            .get(x as usize)
            .copied()
            .ok_or_else(|| Error::InvalidParam(format!("seed {x} outside {} bits", self.seed_bits)))
    }

    /// Number of distinct outputs.
    pub fn image_size(&self) -> usize {
        self.table.iter().collect::<HashSet<_>>().len()
    }

    pub fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            kind: match self.kind {
                PrgKind::RandomInjection => BackendKind::PrgRandomInjection,
                PrgKind::RandomTable => BackendKind::PrgRandomTable,
                PrgKind::Duplicate => BackendKind::PrgDuplicate,
            },
            n: self.seed_bits,
            ell: Some(2 * self.seed_bits),
            m: None,
            seed: self.seed,
            flags: BTreeMap::from([("injective".to_string(), self.injective)]),
        }
    }
}

pub fn make_toy_prg(kind: PrgKind, seed_bits: usize, rng: &mut Rng) -> Result<ToyPrg> {
    ToyPrg::new(kind, seed_bits, rng.next_u64())
}

/// Each key gets an independent Haar-random `m`-qubit state.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarPrsg {
    key_bits: usize,
    output_qubits: usize,
    seed: u64,
    states: Arc<Vec<PureState>>,
}

impl HaarPrsg {
    pub fn new(key_bits: usize, output_qubits: usize, seed: u64) -> Result<Self> {
        cap::check(output_qubits)?;
        if key_bits > MAX_PRSG_KEY_BITS
            || (1usize << key_bits).saturating_mul(1usize << output_qubits) > MAX_PRSG_AMPLITUDES
        {
            return Err(Error::ParamTooLarge(format!(
                "PRSG with {key_bits} key bits and {output_qubits} qubits"
            )));
        }
        let root = Rng::from_seed(seed);
        let states = (0..1u64 << key_bits)
            .map(|k| haar_sample(output_qubits, &mut root.child_indexed("key", k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(HaarPrsg {
            key_bits,
            output_qubits,
            seed,
            states: Arc::new(states),
        })
    }

    pub fn key_bits(&self) -> usize {
        self.key_bits
    }

    pub fn output_qubits(&self) -> usize {
        self.output_qubits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn state(&self, key: u64) -> Result<&PureState> {
        self.states
            .get(key as usize)
            .ok_or_else(|| Error::InvalidParam(format!("key {key} outside {} bits", self.key_bits)))
    }

    pub fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            kind: BackendKind::PrsgHaar,
            n: self.key_bits,
            ell: None,
            m: Some(self.output_qubits),
            seed: self.seed,
            flags: BTreeMap::new(),
        }
    }
}

pub fn make_haar_prsg(key_bits: usize, output_qubits: usize, rng: &mut Rng) -> Result<HaarPrsg> {
    HaarPrsg::new(key_bits, output_qubits, rng.next_u64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injective_prg_has_full_image() {
        let g = ToyPrg::new(PrgKind::RandomInjection, 2, 5).unwrap();
        assert!(g.is_injective());
        assert_eq!(g.image_size(), 4);
        assert!(g.table().iter().all(|&y| y < 16));
    }

    #[test]
    fn random_table_owf_is_total() {
        let f = ToyOwf::new(OwfKind::RandomTable, 3, 3, 8).unwrap();
        assert_eq!(f.table().len(), 8);
        for x in 0..8 {
            assert!(f.eval(x).unwrap() < 8);
        }
        assert!(f.eval(8).is_err());
    }

    #[test]
    fn injectivity_flag_is_accurate() {
        for seed in 0..20 {
            let f = ToyOwf::new(OwfKind::RandomTable, 4, 4, seed).unwrap();
            let distinct = f.table().iter().collect::<HashSet<_>>().len();
            assert_eq!(f.is_injective(), distinct == 16);
        }
        let f = ToyOwf::new(OwfKind::RandomInjection, 6, 6, 1).unwrap();
        assert!(f.is_injective());
        let d = ToyPrg::new(PrgKind::Duplicate, 3, 0).unwrap();
        assert!(d.is_injective());
        assert_eq!(d.eval(5).unwrap(), 0b101101);
    }

    #[test]
    fn arx_is_deterministic_per_seed() {
        let a = ToyOwf::new(OwfKind::Arx, 10, 12, 3).unwrap();
        let b = ToyOwf::new(OwfKind::Arx, 10, 12, 3).unwrap();
        let c = ToyOwf::new(OwfKind::Arx, 10, 12, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.table(), c.table());
    }

    #[test]
    fn prsg_states_are_normalized() {
        let p = HaarPrsg::new(4, 2, 11).unwrap();
        assert_eq!(p.states().len(), 16);
        for s in p.states() {
            assert!((s.amplitudes().norm_squared() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_params_are_rejected() {
        assert!(matches!(
            ToyOwf::new(OwfKind::RandomTable, 21, 21, 0),
            Err(Error::ParamTooLarge(_))
        ));
        assert!(matches!(
            ToyPrg::new(PrgKind::RandomInjection, 17, 0),
            Err(Error::ParamTooLarge(_))
        ));
        assert!(ToyOwf::new(OwfKind::RandomInjection, 5, 4, 0).is_err());
    }

    #[test]
    fn descriptors_round_trip() {
        let backends = vec![
            Backend::Owf(ToyOwf::new(OwfKind::RandomTable, 5, 7, 1).unwrap()),
            Backend::Owf(ToyOwf::new(OwfKind::RandomInjection, 5, 7, u64::MAX).unwrap()),
            Backend::Owf(ToyOwf::new(OwfKind::Arx, 8, 8, 2).unwrap()),
            Backend::Prg(ToyPrg::new(PrgKind::RandomInjection, 3, 3).unwrap()),
            Backend::Prg(ToyPrg::new(PrgKind::Duplicate, 2, 4).unwrap()),
            Backend::Prsg(HaarPrsg::new(3, 2, 5).unwrap()),
        ];
        for b in backends {
            let json = b.descriptor().to_json();
            let d = BackendDescriptor::from_json(&json).unwrap();
            let rebuilt = Backend::from_descriptor(&d).unwrap();
            assert_eq!(rebuilt.descriptor().to_json(), json);
            match (&b, &rebuilt) {
                (Backend::Owf(x), Backend::Owf(y)) => assert_eq!(x, y),
                (Backend::Prg(x), Backend::Prg(y)) => assert_eq!(x, y),
                (Backend::Prsg(x), Backend::Prsg(y)) => assert_eq!(x, y),
                _ => panic!("kind changed"),
            }
        }
    }

    #[test]
    fn tampered_flags_are_detected() {
        let mut d = ToyOwf::new(OwfKind::RandomTable, 4, 2, 1).unwrap().descriptor();
        d.flags.insert("injective".into(), true);
        assert!(Backend::from_descriptor(&d).is_err());
        assert!(BackendDescriptor::from_json(r#"{"kind":"prg_duplicate","n":2,"seed":1,"x":3}"#).is_err());
    }
}
