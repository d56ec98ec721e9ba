//! Tail of the overlap between a Haar state and a fixed state:
//! `Pr[|⟨ψ|φ_0⟩|² ≥ h] = (1 - h)^{2^m - 1}`.

use rayon::prelude::*;

use super::{BoundCheck, Witness};
use crate::error::{Error, Result};
use crate::primitives::Relation;
use crate::qcore::{cap, haar_sample, Rng};

/// Smallest sample count accepted by [`haar_concentration_check`].
pub const MIN_SAMPLES: u64 = 10_000;

/// `(1 - h)^{2^m - 1}`.
pub fn haar_tail_probability(m: usize, h: f64) -> f64 {
    (1.0 - h).powf(((1u64 << m) - 1) as f64)
}

/// Empirical tail frequency over `samples` Haar states against the analytic
/// value, with `3σ` binomial slack. Sample `i` uses the child stream
/// `("haar", i)`; the fixed state is `|0…0⟩`.
pub fn haar_concentration_check(m: usize, h: f64, samples: u64, rng: &Rng) -> Result<BoundCheck> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidParam(format!("threshold {h} outside [0, 1]")));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParam(format!("{samples} samples < {MIN_SAMPLES}")));
    }
    cap::check(m)?;
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let psi = haar_sample(m, &mut rng.child_indexed("haar", i))?;
            Ok(u64::from(psi.amplitudes()[0].norm_sqr() >= h))
        })
        .sum::<Result<u64>>()?;
    let q = haar_tail_probability(m, h);
    let tolerance = 3.0 * (q * (1.0 - q) / samples as f64).sqrt();
    let witness = Witness::HaarTail {
        m,
        h,
        samples,
        hits,
        seed: rng.seed(),
    };
    BoundCheck::from_witness(format!("haar-tail/m{m}/h{h}"), Relation::Eq, tolerance, witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_values() {
        assert_eq!(haar_tail_probability(2, 0.5), 0.125);
        assert_eq!(haar_tail_probability(3, 0.5), 0.0078125);
        assert_eq!(haar_tail_probability(3, 0.0), 1.0);
        assert_eq!(haar_tail_probability(1, 1.0), 0.0);
    }

    #[test]
    fn edge_thresholds_are_exact() {
        let c = haar_concentration_check(2, 0.0, 10_000, &Rng::from_seed(1)).unwrap();
        assert_eq!((c.lhs, c.rhs), (1.0, 1.0));
        let c = haar_concentration_check(2, 1.0, 10_000, &Rng::from_seed(1)).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
    }

    #[test]
    fn two_qubit_half_threshold() {
        let c = haar_concentration_check(2, 0.5, 20_000, &Rng::from_seed(2)).unwrap();
        assert!(c.holds, "{c:?}");
        assert_eq!(c.recompute().unwrap(), c);
    }

    #[test]
    fn too_few_samples() {
        assert!(haar_concentration_check(1, 0.5, 100, &Rng::from_seed(1)).is_err());
    }
}
