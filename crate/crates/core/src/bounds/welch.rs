//! Welch bound.
//!
//! For vectors `ψ_i`: `C(d+k-1, k) Σ_{i,j} |⟨ψ_i|ψ_j⟩|^{2k} ≥ (Σ_i ⟨ψ_i|ψ_i⟩^k)²`.
//! With `k = 1`, unit `φ_i` and weights `p_i` this reads
//! `E_{i,j} |⟨φ_i|φ_j⟩|² ≥ 1/d`, which is the form checked for `k = 1`.
//! For `k ≥ 2` the general form is evaluated on `ψ_i = √p_i φ_i`.

use rayon::prelude::*;

use super::{BoundCheck, SweepSummary, Witness, MARGIN_TOL};
use crate::error::{Error, Result};
use crate::primitives::Relation;
use crate::qcore::linalg::{CVector, EPS};
use crate::qcore::state::VectorRepr;
use crate::qcore::{haar_sample, PureState, Rng};

pub const MAX_MOMENT: u32 = 3;

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn validate(vectors: &[CVector], dist: &[f64], k: u32) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::InvalidParam("empty ensemble".into()));
    }
    if !(1..=MAX_MOMENT).contains(&k) {
        return Err(Error::InvalidParam(format!(
            "moment order {k} outside 1..={MAX_MOMENT}"
        )));
    }
    if dist.len() != vectors.len() {
        return Err(Error::BadDistribution(format!(
            "{} weights for {} states",
            dist.len(),
            vectors.len()
        )));
    }
    if dist.iter().any(|p| p.is_nan() || *p < 0.0) {
        return Err(Error::BadDistribution("negative or NaN weight".into()));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > EPS {
        return Err(Error::BadDistribution(format!("weights sum to {total}")));
    }
    let d = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: d,
        });
    }
    Ok(())
}

pub(crate) fn evaluate(states: &[VectorRepr], dist: &[f64], k: u32) -> Result<(f64, f64)> {
    let vectors: Vec<CVector> = states.iter().map(VectorRepr::to_vector).collect();
    validate(&vectors, dist, k)?;
    let d = vectors[0].len() as u64;
    let n = vectors.len();
    let mut double_sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ov = vectors[i].dotc(&vectors[j]).norm_sqr();
            double_sum += (dist[i] * dist[j]).powi(k as i32) * ov.powi(k as i32);
        }
    }
    if k == 1 {
        return Ok((double_sum, 1.0 / d as f64));
    }
    let norms: f64 = (0..n)
        .map(|i| (dist[i] * vectors[i].norm_squared()).powi(k as i32))
        .sum();
    Ok((binomial(d + k as u64 - 1, k as u64) * double_sum, norms * norms))
}

/// Checks the Welch inequality for an ensemble of pure states.
pub fn welch_check(states: &[PureState], dist: &[f64], k: u32) -> Result<BoundCheck> {
    let witness = Witness::Welch {
        states: states.iter().map(|s| VectorRepr::from_vector(s.amplitudes())).collect(),
        dist: dist.to_vec(),
        k,
    };
    BoundCheck::from_witness(format!("welch/k{k}"), Relation::Ge, MARGIN_TOL, witness)
}

/// `instances` random ensembles: `m ∈ {1, 2, 3}` qubits, 1 to 16 Haar
/// states, random weights, `k = 1`. Instance `i` uses the child stream
/// `("welch", i)`.
pub fn welch_sweep(instances: u64, rng: &Rng) -> Result<SweepSummary> {
    let checks = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.child_indexed("welch", i);
            let m = 1 + r.below(3) as usize;
            let n = 1 + r.below(16) as usize;
            let states = (0..n).map(|_| haar_sample(m, &mut r)).collect::<Result<Vec<_>>>()?;
            let raw: Vec<f64> = (0..n).map(|_| r.uniform()).collect();
            let total: f64 = raw.iter().sum();
            let dist: Vec<f64> = raw.iter().map(|x| x / total).collect();
            welch_check(&states, &dist, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSummary::from_checks("welch-sweep", checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(m: usize) -> Vec<PureState> {
        (0..1 << m).map(|i| PureState::basis(m, i).unwrap()).collect()
    }

    #[test]
    fn single_state() {
        let c = welch_check(&[PureState::basis(2, 3).unwrap()], &[1.0], 1).unwrap();
        assert_eq!((c.lhs, c.rhs), (1.0, 0.25));
        assert!(c.holds);
    }

    #[test]
    fn orthonormal_uniform_is_tight() {
        for m in 1..=3 {
            let states = basis(m);
            let n = states.len();
            let c = welch_check(&states, &vec![1.0 / n as f64; n], 1).unwrap();
            assert!(c.margin.abs() <= 1e-9);
            assert!(c.holds);
        }
    }

    #[test]
    fn higher_moments() {
        // uniform over a basis: C(d+k-1,k) d (1/d)^{2k} vs (d (1/d)^k)^2
        let states = basis(2);
        for k in 1..=3 {
            let c = welch_check(&states, &[0.25; 4], k).unwrap();
            assert!(c.holds, "k = {k}");
        }
        let mut rng = Rng::from_seed(4);
        for k in 2..=3 {
            let states: Vec<_> = (0..6).map(|_| haar_sample(2, &mut rng).unwrap()).collect();
            let c = welch_check(&states, &[1.0 / 6.0; 6], k).unwrap();
            assert!(c.holds);
        }
        assert!(welch_check(&states, &[0.25; 4], 4).is_err());
    }

    #[test]
    fn general_form_matches_hand_value() {
        // k = 2, d = 2, single state with weight 1: C(3,2) * 1 = 3 vs 1
        let c = welch_check(&[PureState::basis(1, 0).unwrap()], &[1.0], 2).unwrap();
        assert_eq!((c.lhs, c.rhs), (3.0, 1.0));
    }

    #[test]
    fn bad_distributions() {
        let s = basis(1);
        assert!(matches!(
            welch_check(&s, &[0.5, 0.6], 1),
            Err(Error::BadDistribution(_))
        ));
        assert!(matches!(welch_check(&s, &[1.0], 1), Err(Error::BadDistribution(_))));
        assert!(matches!(
            welch_check(&s, &[1.5, -0.5], 1),
            Err(Error::BadDistribution(_))
        ));
    }

    #[test]
    fn brute_force_sweep() {
        let s = welch_sweep(100, &Rng::from_seed(1)).unwrap();
        assert!(s.all_hold);
        assert!(s.min_margin >= -1e-9);
        let again = welch_sweep(100, &Rng::from_seed(1)).unwrap();
        assert_eq!(s, again);
    }
}
