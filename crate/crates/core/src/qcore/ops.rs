//! Distance measures, spectral tools and measurement.

use rand_distr::{Binomial, Distribution};

use super::linalg::{self, eigh, psd_sqrt, CMatrix, CVector, EPS};
use super::rng::Rng;
use super::state::{gather_bits, normalize_keep, same_dim, DensityMatrix, HermitianMatrix, Operator, Projector};
use crate::error::{Error, Result};

/// Eigenvalues at or above this (negative) threshold count as nonnegative
/// when forming the positive-part projector.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-12;

/// Reduced state on the `keep` qubits, in their original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    let keep = normalize_keep(keep, n)?;
    if keep.len() == n {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    // index of (kept value, traced value) in the full register
    let mut full = vec![0usize; kd * td];
    for idx in 0..(1usize << n) {
        let ik = gather_bits(idx, &keep, n);
        let it = gather_bits(idx, &traced, n);
        full[ik * td + it] = idx;
    }
    let m = rho.matrix();
    let out = CMatrix::from_fn(kd, kd, |i, j| {
        (0..td).map(|t| m[(full[i * td + t], full[j * td + t])]).sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// `||a - b||_tr`, half the sum of absolute eigenvalues of the difference.
/// Accepts any pair of equal-dimension operators (states, tomography
/// estimates, ...).
pub fn trace_distance<A: Operator + ?Sized, B: Operator + ?Sized>(a: &A, b: &B) -> Result<f64> {
    same_dim(a, b)?;
    let diff = a.matrix() - b.matrix();
    Ok(linalg::half_trace_norm(&diff))
}

/// Squared fidelity `F(ρ,σ) = (Tr sqrt(sqrt σ ρ sqrt σ))^2`.
///
/// When either argument is pure the value reduces to `Tr(ρσ)`, which is used
/// directly.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    if (a.purity() - 1.0).abs() < 1e-12 || (b.purity() - 1.0).abs() < 1e-12 {
        let v = linalg::trace_product(a.matrix(), b.matrix()).re;
        return Ok(v.clamp(0.0, 1.0));
    }
    let sb = psd_sqrt(b.matrix());
    let inner = &sb * a.matrix() * &sb;
    let root_trace: f64 = linalg::eigvalsh(&inner)
        .iter()
        .map(|&x| if x > 0.0 { x.sqrt() } else { 0.0 })
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// One eigenpair of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: CVector,
}

/// Eigenpairs sorted by descending eigenvalue. Each eigenvector's
/// largest-magnitude component is real and positive.
pub fn spectral_decompose(h: &HermitianMatrix) -> Vec<EigenPair> {
    let (vals, vecs) = eigh(h.matrix());
    vals.into_iter()
        .enumerate()
        .map(|(i, value)| EigenPair {
            value,
            vector: vecs.column(i).into_owned(),
        })
        .collect()
}

/// Same as [`spectral_decompose`] but for a raw matrix, checking
/// Hermiticity first.
pub fn spectral_decompose_matrix(m: &CMatrix) -> Result<Vec<EigenPair>> {
    Ok(spectral_decompose(&HermitianMatrix::new(m.clone())?))
}

/// Projector onto the span of eigenvectors with eigenvalue `>= 0`
/// (zero eigenvalues included).
pub fn positive_part_projector(h: &HermitianMatrix) -> Projector {
    let d = h.dim();
    let mut p = CMatrix::zeros(d, d);
    for pair in spectral_decompose(h) {
        if pair.value >= -ZERO_EIGENVALUE_TOL {
            p += linalg::outer(&pair.vector, &pair.vector);
        }
    }
    Projector::from_matrix_unchecked(linalg::symmetrize(&p))
}

/// Swap-test acceptance probability `(1 + Tr(ab)) / 2`.
pub fn swap_test_accept_prob(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    Ok(0.5 * (1.0 + linalg::trace_product(a.matrix(), b.matrix()).re))
}

/// One sampled run of the swap test; `true` means "accept".
pub fn swap_test_sample(a: &DensityMatrix, b: &DensityMatrix, rng: &mut Rng) -> Result<bool> {
    let p = swap_test_accept_prob(a, b)?;
    Ok(rng.bernoulli(p))
}

/// Born probability `Tr(Π ρ)`, clamped to [0, 1].
pub fn outcome_probability(state: &DensityMatrix, projector: &Projector) -> Result<f64> {
    same_dim(state, projector)?;
    Ok(linalg::trace_product(projector.matrix(), state.matrix())
        .re
        .clamp(0.0, 1.0))
}

/// Two-outcome measurement `{Π, I-Π}`: returns `true` (outcome 1) with
/// probability `Tr(Π ρ)`.
pub fn measure(state: &DensityMatrix, projector: &Projector, rng: &mut Rng) -> Result<bool> {
    let p = outcome_probability(state, projector)?;
    Ok(rng.bernoulli(p))
}

/// Number of `Π` outcomes in `shots` independent measurements of fresh
/// copies of `state`.
pub fn measure_counts(state: &DensityMatrix, projector: &Projector, shots: u64, rng: &mut Rng) -> Result<u64> {
    let p = outcome_probability(state, projector)?;
    Ok(binomial(shots, p, rng))
}

pub(crate) fn binomial(n: u64, p: f64, rng: &mut Rng) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// `Tr(Π H)` for a projector and Hermitian matrix.
pub fn projector_trace(projector: &Projector, h: &HermitianMatrix) -> Result<f64> {
    same_dim(projector, h)?;
    Ok(linalg::trace_product(projector.matrix(), h.matrix()).re)
}

/// Checks that a density matrix is a rank-one projector within `EPS`.
pub fn is_pure(rho: &DensityMatrix) -> bool {
    (rho.purity() - 1.0).abs() <= EPS
}

/// `ρ ↦ U ρ U†` for a full-register unitary.
pub fn conjugate(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_matrix_unchecked(linalg::symmetrize(
        &(u * rho.matrix() * u.adjoint()),
    )))
}
