//! Swap-test attack on the hiding of a canonical commitment.
//!
//! The distinguisher prepares `ρ̃_0` (an honest commitment to 0 with the
//! reveal register discarded) and runs the swap test against the challenge
//! `ρ̃_b`. It outputs 1 ("ρ̃_0") on acceptance, which happens with
//! probability `(1 + Tr ρ̃_0 ρ̃_b)/2`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::primitives::{CanonicalCommitment, Distinguisher};
use crate::qcore::linalg::trace_product;
use crate::qcore::{swap_test_accept_prob, swap_test_sample, DensityMatrix, Operator, Rng};

/// Exact quantities behind the swap-test attack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapAnalysis {
    /// `Tr ρ̃_0²`.
    pub purity0: f64,
    /// `Tr ρ̃_0 ρ̃_1`.
    pub overlap01: f64,
    /// `(Tr ρ̃_0² - Tr ρ̃_0 ρ̃_1)/2`.
    pub predicted_advantage: f64,
    /// `2^{-|R|}`, a lower bound on `Tr ρ̃_0²` since `rank ρ̃_0 ≤ 2^{|R|}`.
    pub rank_bound: f64,
    /// Acceptance probabilities on `ρ̃_0` and `ρ̃_1`.
    pub accept0: f64,
    pub accept1: f64,
    pub reveal_qubits: usize,
    pub commit_qubits: usize,
}

pub struct SwapDistinguisher {
    reference: DensityMatrix,
    label: String,
}

impl SwapDistinguisher {
    pub fn reference(&self) -> &DensityMatrix {
        &self.reference
    }
}

impl Distinguisher for SwapDistinguisher {
    fn name(&self) -> String {
        format!("swap/{}", self.label)
    }

    fn distinguish(&self, challenge: &DensityMatrix, rng: &mut Rng) -> Result<bool> {
        swap_test_sample(&self.reference, challenge, rng)
    }
}

pub fn swap_hiding_attack(c: &CanonicalCommitment) -> Result<(SwapDistinguisher, SwapAnalysis)> {
    let rho0 = c.commit_marginal(false)?;
    let rho1 = c.commit_marginal(true)?;
    let purity0 = trace_product(rho0.matrix(), rho0.matrix()).re;
    let overlap01 = trace_product(rho0.matrix(), rho1.matrix()).re;
    let analysis = SwapAnalysis {
        purity0,
        overlap01,
        predicted_advantage: (purity0 - overlap01) / 2.0,
        rank_bound: (-(c.reveal_qubits() as f64)).exp2(),
        accept0: swap_test_accept_prob(&rho0, &rho0)?,
        accept1: swap_test_accept_prob(&rho0, &rho1)?,
        reveal_qubits: c.reveal_qubits(),
        commit_qubits: c.commit_qubits(),
    };
    Ok((
        SwapDistinguisher {
            reference: rho0,
            label: c.label().to_string(),
        },
        analysis,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{commitment_from_states, run_efi_game};
    use crate::qcore::PureState;

    #[test]
    fn pure_orthogonal_commitments() {
        // |R| = 0: Ψ_b = |b⟩ on the commit register
        let c = commitment_from_states(
            "orth",
            0,
            &PureState::basis(1, 0).unwrap(),
            &PureState::basis(1, 1).unwrap(),
        )
        .unwrap();
        let (d, a) = swap_hiding_attack(&c).unwrap();
        assert!((a.predicted_advantage - 0.5).abs() < 1e-12);
        assert_eq!(a.rank_bound, 1.0);
        let r = run_efi_game(&c.hiding_pair().unwrap(), &d, 4000, &Rng::from_seed(1)).unwrap();
        assert!((r.estimate - 0.5).abs() <= 3.0 * r.sigma());
        assert_eq!(r.arms.unwrap().ones0, 4000);
    }

    #[test]
    fn purity_meets_rank_bound() {
        let mut rng = Rng::from_seed(5);
        for _ in 0..10 {
            let a = crate::qcore::haar_sample(4, &mut rng).unwrap();
            let b = crate::qcore::haar_sample(4, &mut rng).unwrap();
            let c = commitment_from_states("haar", 2, &a, &b).unwrap();
            let (_, an) = swap_hiding_attack(&c).unwrap();
            assert!(an.purity0 >= an.rank_bound - 1e-12);
            assert!((an.accept0 - an.accept1 - an.predicted_advantage).abs() < 1e-12);
        }
    }
}
