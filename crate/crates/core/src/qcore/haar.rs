//! Random states and matrices.

use rand_distr::{Distribution, StandardNormal};

use super::cap;
use super::linalg::{c, CMatrix, CVector, ONE};
use super::rng::Rng;
use super::state::{DensityMatrix, HermitianMatrix, PureState};
use crate::error::Result;

fn gaussian_vector(dim: usize, rng: &mut Rng) -> CVector {
    CVector::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    })
}

/// Haar-random `m`-qubit pure state (normalised complex Gaussian vector).
/// `m = 0` returns the scalar state `1`.
pub fn haar_sample(m: usize, rng: &mut Rng) -> Result<PureState> {
    cap::check(m)?;
    if m == 0 {
        return Ok(PureState::from_parts_unchecked(0, CVector::from_element(1, ONE)));
    }
    loop {
        let v = gaussian_vector(1 << m, rng);
        let norm = v.norm();
        if norm > 1e-300 {
            return Ok(PureState::from_parts_unchecked(m, v / c(norm, 0.0)));
        }
    }
}

/// Random mixed state from the induced measure: a Haar state on `2m`
/// qubits with the second half traced out.
pub fn random_density(m: usize, rng: &mut Rng) -> Result<DensityMatrix> {
    cap::check(2 * m)?;
    let psi = haar_sample(2 * m, rng)?;
    psi.reduced(&(0..m).collect::<Vec<_>>())
}

/// Random Hermitian matrix `(G + G†)/2` with i.i.d. complex Gaussian `G`.
pub fn random_hermitian(dim: usize, rng: &mut Rng) -> HermitianMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    HermitianMatrix::symmetrized(&g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_qubits_is_scalar_one() {
        let s = haar_sample(0, &mut Rng::from_seed(1)).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.amplitudes()[0], ONE);
    }

    #[test]
    fn samples_are_normalised_and_seeded() {
        let a = haar_sample(3, &mut Rng::from_seed(5)).unwrap();
        let b = haar_sample(3, &mut Rng::from_seed(5)).unwrap();
        assert_eq!(a, b);
        assert!((a.amplitudes().norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn induced_states_are_valid() {
        let mut rng = Rng::from_seed(9);
        for _ in 0..20 {
            random_density(2, &mut rng).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn cap_is_enforced() {
        let cap = crate::qcore::cap::max_qubits();
        assert!(matches!(
            haar_sample(cap + 1, &mut Rng::from_seed(0)),
            Err(crate::Error::CapExceeded { .. })
        ));
    }
}
