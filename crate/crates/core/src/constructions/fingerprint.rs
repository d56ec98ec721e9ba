//! Code-based quantum fingerprints and the fingerprint OWSG.

use rayon::prelude::*;

use super::code::{CodeDescriptor, LinearCode};
use crate::error::{Error, Result};
use crate::primitives::{OwsgScheme, ToyOwf};
use crate::qcore::linalg::{c, CVector, ZERO};
use crate::qcore::{cap, PureState};

/// `|h_x⟩ = ((1/√m) Σ_i |i⟩|E_i(x)⟩)^{⊗r}`.
///
/// The index register has `⌈log₂ m⌉` qubits; basis states `i ≥ m` carry
/// zero amplitude. `r` is the least integer with `δ^r ≤ η`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fingerprint {
    code: LinearCode,
    r: usize,
    eta: f64,
    index_qubits: usize,
    seed: Option<u64>,
}

/// `⌊ln η / ln δ⌋ + 1`, bumped if rounding leaves `δ^r > η`.
pub fn repetitions_for(delta: f64, eta: f64) -> Result<usize> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParam(format!("eta = {eta} must lie in (0, 1)")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParam(format!(
            "delta = {delta}: the code has repeated codewords"
        )));
    }
    if delta == 0.0 {
        return Ok(1);
    }
    let mut r = (eta.ln() / delta.ln()).floor() as usize + 1;
    while delta.powi(r as i32) > eta {
        r += 1;
    }
    Ok(r)
}

impl Fingerprint {
    pub fn new(code: LinearCode, eta: f64) -> Result<Self> {
        let r = repetitions_for(code.delta(), eta)?;
        let index_qubits = (code.m() as f64).log2().ceil() as usize;
        Ok(Fingerprint {
            code,
            r,
            eta,
            index_qubits,
            seed: None,
        })
    }

    /// Records the seed the code was searched with (descriptor only).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.code.delta()
    }

    /// `δ^r`, the certified overlap bound.
    pub fn overlap_bound(&self) -> f64 {
        self.delta().powi(self.r as i32)
    }

    pub fn qubits_per_block(&self) -> usize {
        self.index_qubits + 1
    }

    /// `r (⌈log₂ m⌉ + 1)`.
    pub fn total_qubits(&self) -> usize {
        self.r * self.qubits_per_block()
    }

    /// One block `(1/√m) Σ_i |i⟩|E_i(x)⟩`.
    pub fn block_state(&self, x: u64) -> Result<PureState> {
        self.check_message(x)?;
        let cw = self.code.encode(x);
        let m = self.code.m();
        let amp = c((m as f64).sqrt().recip(), 0.0);
        let mut v = CVector::from_element(1 << self.qubits_per_block(), ZERO);
        for i in 0..m {
            v[(i << 1) | self.code.bit(cw, i) as usize] = amp;
        }
        PureState::new(v)
    }

    /// `|h_x⟩`.
    pub fn state(&self, x: u64) -> Result<PureState> {
        cap::check(self.total_qubits())?;
        self.block_state(x)?.power(self.r)
    }

    /// `⟨h_x|h_y⟩ = (agree(x, y) / m)^r`.
    pub fn overlap(&self, x: u64, y: u64) -> Result<f64> {
        self.check_message(x)?;
        self.check_message(y)?;
        Ok((self.code.agreement(x, y) as f64 / self.code.m() as f64).powi(self.r as i32))
    }

    fn check_message(&self, x: u64) -> Result<()> {
        if x >> self.code.ell() != 0 {
            return Err(Error::InvalidParam(format!(
                "message {x} wider than {} bits",
                self.code.ell()
            )));
        }
        Ok(())
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        CodeDescriptor {
            r: Some(self.r),
            eta: Some(self.eta),
            seed: self.seed,
            ..self.code.descriptor()
        }
    }

    pub fn from_descriptor(d: &CodeDescriptor) -> Result<Self> {
        let code = LinearCode::from_descriptor(d)?;
        let eta = d
            .eta
            .ok_or_else(|| Error::InvalidParam("fingerprint descriptor needs eta".into()))?;
        let mut fp = Fingerprint::new(code, eta)?;
        if let Some(r) = d.r {
            if r != fp.r {
                return Err(Error::InvalidParam(format!(
                    "recorded r = {r} but the code requires r = {}",
                    fp.r
                )));
            }
        }
        fp.seed = d.seed;
        Ok(fp)
    }
}

/// Exhaustive pairwise overlap audit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OverlapAudit {
    pub pairs: u64,
    /// Largest `|⟨h_x|h_y⟩|` over `x ≠ y`, from the simulated states.
    pub max_overlap: f64,
    /// Largest deviation between simulated and analytic overlaps.
    pub max_formula_error: f64,
    /// Pairs whose simulated overlap exceeds `δ^r` by more than `1e-9`.
    pub violations: u64,
    /// Pairs attaining `δ^r` (within `1e-9`) that are not at distance `d_min`,
    /// plus pairs at distance `d_min` that miss it.
    pub equality_mismatches: u64,
}

/// Builds every `|h_x⟩` and compares all pairs against `δ^r`.
pub fn audit_overlaps(fp: &Fingerprint) -> Result<OverlapAudit> {
    let ell = fp.code().ell();
    if ell > 8 {
        return Err(Error::ParamTooLarge(format!(
            "exhaustive audit over {ell} message bits"
        )));
    }
    let states = (0..1u64 << ell).map(|x| fp.state(x)).collect::<Result<Vec<_>>>()?;
    let bound = fp.overlap_bound();
    let d_min = fp.code().d_min();
    let m = fp.code().m();
    let rows: Vec<OverlapAudit> = (0..states.len())
        .into_par_iter()
        .map(|x| {
            let mut a = OverlapAudit::default();
            for y in (x + 1)..states.len() {
                let sim = states[x].amplitudes().dotc(states[y].amplitudes()).norm();
                let formula = fp.overlap(x as u64, y as u64).expect("in range");
                let at_dmin = m - fp.code().agreement(x as u64, y as u64) == d_min;
                a.pairs += 1;
                a.max_overlap = a.max_overlap.max(sim);
                a.max_formula_error = a.max_formula_error.max((sim - formula).abs());
                if sim > bound + 1e-9 {
                    a.violations += 1;
                }
                if ((sim - bound).abs() <= 1e-9) != at_dmin {
                    a.equality_mismatches += 1;
                }
            }
            a
        })
        .collect();
    Ok(rows.into_iter().fold(OverlapAudit::default(), |acc, a| OverlapAudit {
        pairs: acc.pairs + a.pairs,
        max_overlap: acc.max_overlap.max(a.max_overlap),
        max_formula_error: acc.max_formula_error.max(a.max_formula_error),
        violations: acc.violations + a.violations,
        equality_mismatches: acc.equality_mismatches + a.equality_mismatches,
    }))
}

/// `φ_k = |h_{f(k)}⟩` with the projection verifier.
pub fn fingerprint_owsg(owf: &ToyOwf, fp: &Fingerprint) -> Result<OwsgScheme> {
    if owf.output_bits() != fp.code().ell() {
        return Err(Error::DimensionMismatch {
            left: owf.output_bits(),
            right: fp.code().ell(),
        });
    }
    cap::check(fp.total_qubits())?;
    let (f, fp2) = (owf.clone(), fp.clone());
    Ok(OwsgScheme::pure(
        format!("fingerprint-n{}-l{}", owf.input_bits(), owf.output_bits()),
        owf.input_bits(),
        fp.total_qubits(),
        move |k| fp2.state(f.eval(k)?),
    )?
    .with_metadata("eta", fp.eta())
    .with_metadata("r", fp.r())
    .with_metadata("delta", fp.delta())
    .with_metadata("d_min", fp.code().d_min())
    .with_metadata("ell", fp.code().ell())
    .with_metadata("m", fp.code().m())
    .with_metadata("owf", serde_json::to_value(owf.descriptor())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::code::build_linear_code;
    use crate::primitives::OwfKind;
    use crate::qcore::Rng;

    #[test]
    fn repetition_fingerprints_are_orthogonal() {
        let fp = Fingerprint::new(LinearCode::repetition(3).unwrap(), 0.5).unwrap();
        assert_eq!(fp.r(), 1);
        assert_eq!(fp.total_qubits(), 3);
        let a = fp.state(0).unwrap();
        let b = fp.state(1).unwrap();
        assert!(a.inner(&b).unwrap().norm() < 1e-15);
        assert!((a.overlap_sq(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repetition_count_formula() {
        assert_eq!(repetitions_for(0.5, 0.5).unwrap(), 2);
        assert_eq!(repetitions_for(0.5, 0.25).unwrap(), 3);
        // δ = 11/12, η = 1/2: ln(0.5)/ln(11/12) = 7.966...
        assert_eq!(repetitions_for(11.0 / 12.0, 0.5).unwrap(), 8);
        assert!(repetitions_for(1.0, 0.5).is_err());
        assert!(repetitions_for(0.5, 1.0).is_err());
        for delta in [0.1, 0.3, 0.7, 0.9, 0.99] {
            let r = repetitions_for(delta, 0.3).unwrap();
            assert!(delta.powi(r as i32) <= 0.3);
        }
    }

    #[test]
    fn overlaps_match_agreement_formula() {
        let code = build_linear_code(4, 8, 0.8, 200, &Rng::from_seed(1)).unwrap().code;
        let fp = Fingerprint::new(code, 0.6).unwrap();
        assert!(fp.total_qubits() <= 12);
        let audit = audit_overlaps(&fp).unwrap();
        assert_eq!(audit.pairs, 120);
        assert!(audit.max_formula_error < 1e-12);
        assert_eq!(audit.violations, 0);
        assert_eq!(audit.equality_mismatches, 0);
        assert!(audit.max_overlap <= fp.eta());
    }

    #[test]
    fn padded_index_register() {
        let code = build_linear_code(2, 5, 0.9, 100, &Rng::from_seed(2)).unwrap().code;
        let fp = Fingerprint::new(code, 0.5).unwrap();
        assert_eq!(fp.qubits_per_block(), 4);
        let b = fp.block_state(3).unwrap();
        // indices i >= 5 carry nothing
        for idx in 10..16 {
            assert_eq!(b.amplitudes()[idx], ZERO);
        }
    }

    #[test]
    fn owsg_correctness_and_cross_images() {
        let code = build_linear_code(4, 8, 0.8, 500, &Rng::from_seed(3)).unwrap().code;
        let fp = Fingerprint::new(code, 0.5).unwrap();
        let owf = ToyOwf::new(OwfKind::RandomTable, 5, 4, 7).unwrap();
        let s = fingerprint_owsg(&owf, &fp).unwrap();
        assert!((s.correctness().unwrap() - 1.0).abs() < 1e-9);
        for k in 0..32 {
            for k2 in 0..32 {
                let p = s.accept(k2, k).unwrap();
                if owf.eval(k).unwrap() == owf.eval(k2).unwrap() {
                    assert!((p - 1.0).abs() < 1e-9);
                } else {
                    assert!(p <= fp.eta().powi(2) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let s = build_linear_code(4, 8, 0.8, 500, &Rng::from_seed(3)).unwrap();
        let fp = Fingerprint::new(s.code, 0.5).unwrap().with_seed(s.seed);
        let json = serde_json::to_string(&fp.descriptor()).unwrap();
        let back = Fingerprint::from_descriptor(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, fp);
        assert_eq!(serde_json::to_string(&back.descriptor()).unwrap(), json);
    }
}
