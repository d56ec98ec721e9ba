//! Canonical quantum bit commitments `(Q_0, Q_1)` on registers `R ⊗ C`.

use std::collections::BTreeMap;

use serde_json::Value;

use super::circuit::Circuit;
use super::efi::{run_efi_game, Distinguisher, EfiPair};
use super::report::GameReport;
use crate::error::{Error, Result};
use crate::qcore::linalg::{CMatrix, CVector};
use crate::qcore::{cap, DensityMatrix, Operator, PureState, Rng};

/// Largest reveal register for which the Uhlmann unitary is returned.
pub const UHLMANN_UNITARY_MAX_QUBITS: usize = 6;

/// `|Ψ_b⟩ = Q_b|0…0⟩` with the reveal register `R` first, then `C`.
#[derive(Clone, Debug)]
pub struct CanonicalCommitment {
    label: String,
    reveal_qubits: usize,
    commit_qubits: usize,
    q: [Circuit; 2],
    metadata: BTreeMap<String, Value>,
}

/// Optimal honest-binding success and (for small `R`) the achieving
/// unitary on `R`.
#[derive(Clone, Debug)]
pub struct BindingOptimum {
    pub fidelity: f64,
    pub unitary: Option<CMatrix>,
}

impl CanonicalCommitment {
    pub fn new(
        label: impl Into<String>,
        reveal_qubits: usize,
        commit_qubits: usize,
        q0: Circuit,
        q1: Circuit,
    ) -> Result<Self> {
        let n = reveal_qubits + commit_qubits;
        cap::check(n)?;
        for q in [&q0, &q1] {
            if q.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    left: q.num_qubits(),
                    right: n,
                });
            }
        }
        Ok(CanonicalCommitment {
            label: label.into(),
            reveal_qubits,
            commit_qubits,
            q: [q0, q1],
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn metadata(&self) -> &BTreeMap<String, Value> {
        &self.metadata
    }

    pub fn reveal_qubits(&self) -> usize {
        self.reveal_qubits
    }

    pub fn commit_qubits(&self) -> usize {
        self.commit_qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.reveal_qubits + self.commit_qubits
    }

    pub fn unitary(&self, b: bool) -> &Circuit {
        &self.q[b as usize]
    }

    /// `|Ψ_b⟩`.
    pub fn state(&self, b: bool) -> Result<PureState> {
        self.q[b as usize].prepare()
    }

    fn commit_register(&self) -> Vec<usize> {
        (self.reveal_qubits..self.num_qubits()).collect()
    }

    /// `Tr_R |Ψ_b⟩⟨Ψ_b|`, the state the receiver holds after the commit phase.
    pub fn commit_marginal(&self, b: bool) -> Result<DensityMatrix> {
        self.state(b)?.reduced(&self.commit_register())
    }

    /// `Tr_C |Ψ_b⟩⟨Ψ_b|`.
    pub fn reveal_marginal(&self, b: bool) -> Result<DensityMatrix> {
        self.state(b)?.reduced(&(0..self.reveal_qubits).collect::<Vec<_>>())
    }

    /// Acceptance probability of opening `b` on a pure joint state:
    /// `|⟨0…0|Q_b†|σ⟩|²`.
    pub fn reveal_verify_pure(&self, b: bool, joint: &PureState) -> Result<f64> {
        let mut v = joint.amplitudes().clone();
        self.q[b as usize].apply_adjoint(&mut v)?;
        Ok(v[0].norm_sqr().min(1.0))
    }

    /// Acceptance probability `⟨0…0|Q_b† σ Q_b|0…0⟩ = ⟨Ψ_b|σ|Ψ_b⟩`.
    pub fn reveal_verify(&self, b: bool, joint: &DensityMatrix) -> Result<f64> {
        if joint.dim() != 1usize << self.num_qubits() {
            return Err(Error::DimensionMismatch {
                left: joint.dim(),
                right: 1usize << self.num_qubits(),
            });
        }
        let psi = self.state(b)?;
        let v = psi.amplitudes();
        Ok((v.adjoint() * joint.matrix() * v)[(0, 0)].re.clamp(0.0, 1.0))
    }

    /// `A_b[r, c] = ⟨r, c|Ψ_b⟩`.
    pub fn amplitude_matrix(&self, b: bool) -> Result<CMatrix> {
        let psi = self.state(b)?;
        let cd = 1usize << self.commit_qubits;
        let rd = 1usize << self.reveal_qubits;
        Ok(CMatrix::from_fn(rd, cd, |r, col| psi.amplitudes()[r * cd + col]))
    }

    /// Best success probability of the honest-binding game: the sender
    /// commits 0 honestly, applies a unitary on `R` and opens 1. Equals the
    /// fidelity of the two commit-register marginals.
    pub fn honest_binding_optimum(&self) -> Result<BindingOptimum> {
        let a0 = self.amplitude_matrix(false)?;
        let a1 = self.amplitude_matrix(true)?;
        let x = &a0 * a1.adjoint();
        let svd = x.svd(true, true);
        let nuclear: f64 = svd.singular_values.iter().sum();
        let unitary = if self.reveal_qubits <= UHLMANN_UNITARY_MAX_QUBITS {
            let u = svd.u.expect("requested");
            let v_t = svd.v_t.expect("requested");
            Some(v_t.adjoint() * u.adjoint())
        } else {
            None
        };
        Ok(BindingOptimum {
            fidelity: (nuclear * nuclear).min(1.0),
            unitary,
        })
    }

    /// `(V ⊗ I_C)|σ⟩` for a unitary `V` on the reveal register.
    pub fn apply_on_reveal(&self, v: &CMatrix, joint: &PureState) -> Result<PureState> {
        let rd = 1usize << self.reveal_qubits;
        let cd = 1usize << self.commit_qubits;
        if v.nrows() != rd || v.ncols() != rd || joint.dim() != rd * cd {
            return Err(Error::DimensionMismatch {
                left: v.nrows(),
                right: rd,
            });
        }
        let a = CMatrix::from_fn(rd, cd, |r, col| joint.amplitudes()[r * cd + col]);
        let out = v * a;
        let amps = CVector::from_fn(rd * cd, |i, _| out[(i / cd, i % cd)]);
        PureState::normalized(amps)
    }

    /// The commit-register marginals as a two-state ensemble.
    pub fn hiding_pair(&self) -> Result<EfiPair> {
        EfiPair::new(
            format!("{}/commit", self.label),
            self.commit_marginal(false)?,
            self.commit_marginal(true)?,
        )
    }

    /// Hiding game on the commit register.
    pub fn hiding_advantage(
        &self,
        distinguisher: &dyn Distinguisher,
        trials_per_arm: u64,
        rng: &Rng,
    ) -> Result<GameReport> {
        run_efi_game(&self.hiding_pair()?, distinguisher, trials_per_arm, rng)
    }

    /// Swaps the roles of `Q_0` and `Q_1`.
    pub fn relabeled(&self) -> Self {
        let mut out = self.clone();
        out.q.swap(0, 1);
        out
    }
}

/// Commitment whose unitaries prepare two given states.
pub fn commitment_from_states(
    label: impl Into<String>,
    reveal_qubits: usize,
    psi0: &PureState,
    psi1: &PureState,
) -> Result<CanonicalCommitment> {
    let n = psi0.num_qubits();
    if psi1.num_qubits() != n || reveal_qubits > n {
        return Err(Error::DimensionMismatch {
            left: psi1.num_qubits(),
            right: n,
        });
    }
    let q0 = Circuit::new(n).then(Circuit::preparation(psi0))?;
    let q1 = Circuit::new(n).then(Circuit::preparation(psi1))?;
    CanonicalCommitment::new(label, reveal_qubits, n - reveal_qubits, q0, q1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{fidelity, haar_sample};

    fn random_commitment(seed: u64, r: usize, cq: usize) -> CanonicalCommitment {
        let mut rng = Rng::from_seed(seed);
        let a = haar_sample(r + cq, &mut rng).unwrap();
        let b = haar_sample(r + cq, &mut rng).unwrap();
        commitment_from_states("rand", r, &a, &b).unwrap()
    }

    #[test]
    fn honest_reveal_accepts() {
        let com = random_commitment(1, 2, 2);
        for b in [false, true] {
            let psi = com.state(b).unwrap();
            assert!((com.reveal_verify_pure(b, &psi).unwrap() - 1.0).abs() < 1e-9);
            assert!((com.reveal_verify(b, &psi.density()).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn maximally_mixed_joint_state() {
        let com = random_commitment(2, 1, 2);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!((com.reveal_verify(false, &mixed).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn identical_unitaries_bind_trivially() {
        let mut rng = Rng::from_seed(3);
        let a = haar_sample(3, &mut rng).unwrap();
        let com = commitment_from_states("same", 1, &a, &a).unwrap();
        assert!((com.honest_binding_optimum().unwrap().fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_commit_marginals_cannot_be_opened() {
        let zero = PureState::basis(2, 0).unwrap();
        let one = PureState::basis(2, 1).unwrap();
        let com = commitment_from_states("orth", 1, &zero, &one).unwrap();
        assert!(com.honest_binding_optimum().unwrap().fidelity < 1e-12);
    }

    #[test]
    fn uhlmann_optimum_matches_marginal_fidelity_and_is_attained() {
        for seed in 0..10 {
            let com = random_commitment(100 + seed, 2, 1);
            let opt = com.honest_binding_optimum().unwrap();
            let f = fidelity(
                &com.commit_marginal(false).unwrap(),
                &com.commit_marginal(true).unwrap(),
            )
            .unwrap();
            assert!((opt.fidelity - f).abs() < 1e-7, "{} {}", opt.fidelity, f);
            let v = opt.unitary.unwrap();
            let d = v.nrows();
            assert!((v.adjoint() * &v - CMatrix::identity(d, d)).norm() < 1e-9);
            let attacked = com.apply_on_reveal(&v, &com.state(false).unwrap()).unwrap();
            let p = com.reveal_verify_pure(true, &attacked).unwrap();
            assert!((p - opt.fidelity).abs() < 1e-9);
            let swapped = com.relabeled().honest_binding_optimum().unwrap().fidelity;
            assert!((swapped - opt.fidelity).abs() < 1e-9);
        }
    }

    #[test]
    fn mismatched_circuits_rejected() {
        assert!(CanonicalCommitment::new("bad", 1, 1, Circuit::new(2), Circuit::new(3)).is_err());
    }
}
