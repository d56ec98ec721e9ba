//! `Tr(ρσ) ≤ F(ρ, σ)` and `F(2^{-n} Σ_k |ψ_k⟩⟨ψ_k|, I/2^m) ≤ 2^{n-m}`.

use rayon::prelude::*;

use super::{BoundCheck, SweepSummary, Witness, MARGIN_TOL};
use crate::error::{Error, Result};
use crate::primitives::Relation;
use crate::qcore::linalg::trace_product;
use crate::qcore::state::{MatrixRepr, VectorRepr};
use crate::qcore::{cap, fidelity, haar_sample, random_density, DensityMatrix, Operator, PureState, Rng};

pub(crate) fn evaluate_trf(rho: &MatrixRepr, sigma: &MatrixRepr) -> Result<(f64, f64)> {
    let rho = DensityMatrix::new(rho.to_matrix())?;
    let sigma = DensityMatrix::new(sigma.to_matrix())?;
    Ok((trace_product(rho.matrix(), sigma.matrix()).re, fidelity(&rho, &sigma)?))
}

pub(crate) fn evaluate_mix(states: &[VectorRepr], n: usize, m: usize) -> Result<(f64, f64)> {
    if states.len() != 1 << n {
        return Err(Error::InvalidParam(format!("{} states for n = {n}", states.len())));
    }
    let states = states
        .iter()
        .map(|v| PureState::new(v.to_vector()))
        .collect::<Result<Vec<_>>>()?;
    if let Some(s) = states.iter().find(|s| s.num_qubits() != m) {
        return Err(Error::DimensionMismatch {
            left: s.num_qubits(),
            right: m,
        });
    }
    let dens: Vec<DensityMatrix> = states.iter().map(PureState::density).collect();
    let w = 1.0 / dens.len() as f64;
    let parts: Vec<(f64, &DensityMatrix)> = dens.iter().map(|d| (w, d)).collect();
    let avg = DensityMatrix::mixture(&parts)?;
    let f = fidelity(&avg, &DensityMatrix::maximally_mixed(m)?)?;
    Ok((f, (n as f64 - m as f64).exp2()))
}

pub fn trf_check(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundCheck> {
    let witness = Witness::TraceProductFidelity {
        rho: MatrixRepr::from_matrix(rho.matrix()),
        sigma: MatrixRepr::from_matrix(sigma.matrix()),
    };
    BoundCheck::from_witness("trace-product-fidelity", Relation::Le, MARGIN_TOL, witness)
}

/// Random induced-measure pairs on `qubits` qubits; instance `i` uses the
/// child stream `("trf", i)`.
pub fn trf_sweep(instances: u64, qubits: usize, rng: &Rng) -> Result<SweepSummary> {
    let checks = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.child_indexed("trf", i);
            trf_check(&random_density(qubits, &mut r)?, &random_density(qubits, &mut r)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSummary::from_checks("trace-product-fidelity-sweep", checks))
}

/// `2^n` pure `m`-qubit states; requires `n ≤ m + 4`.
pub fn fidelity_mix_check(states: &[PureState], m: usize) -> Result<BoundCheck> {
    let n = crate::qcore::linalg::log2_exact(states.len())
        .ok_or_else(|| Error::InvalidParam(format!("{} states is not a power of two", states.len())))?;
    if n > m + 4 {
        return Err(Error::InvalidParam(format!("n = {n} exceeds m + 4 = {}", m + 4)));
    }
    cap::check(m)?;
    let witness = Witness::FidelityMix {
        states: states.iter().map(|s| VectorRepr::from_vector(s.amplitudes())).collect(),
        n,
        m,
    };
    BoundCheck::from_witness(format!("fidelity-mix/n{n}/m{m}"), Relation::Le, MARGIN_TOL, witness)
}

/// Haar ensembles of `2^n` states; instance `i` uses `("mix", i)`.
pub fn fidelity_mix_sweep(instances: u64, n: usize, m: usize, rng: &Rng) -> Result<SweepSummary> {
    let checks = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.child_indexed("mix", i);
            let states = (0..1usize << n)
                .map(|_| haar_sample(m, &mut r))
                .collect::<Result<Vec<_>>>()?;
            fidelity_mix_check(&states, m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSummary::from_checks(
        format!("fidelity-mix-sweep/n{n}/m{m}"),
        checks,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_states() {
        let rho = random_density(2, &mut Rng::from_seed(1)).unwrap();
        let c = trf_check(&rho, &rho).unwrap();
        assert!((c.rhs - 1.0).abs() < 1e-9);
        assert!((c.lhs - rho.purity()).abs() < 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn single_state_is_tight() {
        for m in 1..=3 {
            let psi = haar_sample(m, &mut Rng::from_seed(m as u64)).unwrap();
            let c = fidelity_mix_check(&[psi], m).unwrap();
            assert!((c.lhs - (-(m as f64)).exp2()).abs() < 1e-9);
            assert!(c.margin.abs() < 1e-9);
        }
    }

    #[test]
    fn orthonormal_basis_is_tight() {
        let states: Vec<_> = (0..4).map(|i| PureState::basis(2, i).unwrap()).collect();
        let c = fidelity_mix_check(&states, 2).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-9 && c.rhs == 1.0);
    }

    #[test]
    fn sweeps_hold() {
        assert!(trf_sweep(200, 2, &Rng::from_seed(2)).unwrap().all_hold);
        for (n, m) in [(0, 2), (1, 3), (2, 3), (3, 2)] {
            let s = fidelity_mix_sweep(20, n, m, &Rng::from_seed(3)).unwrap();
            assert!(s.all_hold, "n = {n}, m = {m}");
        }
        assert!(fidelity_mix_sweep(1, 6, 1, &Rng::from_seed(3)).is_err());
    }
}
