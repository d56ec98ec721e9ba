//! State and operator types.
//!
//! Qubit 0 is the most significant bit of a basis index; composite
//! registers list the left factor's qubits first.

use serde::{Deserialize, Serialize};

use super::cap;
use super::linalg::{
    self, c, eigvalsh, hermitian_deviation, log2_exact, max_abs_diff, CMatrix, CVector, C64, EIG_TOL, EPS, ONE,
};
use crate::error::{Error, Result};

/// Anything backed by a square complex matrix.
pub trait Operator {
    fn matrix(&self) -> &CMatrix;

    fn dim(&self) -> usize {
        self.matrix().nrows()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    /// Validates length (a power of two) and normalisation within `EPS`.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let num_qubits = log2_exact(amplitudes.len()).ok_or_else(|| {
            Error::InvalidState(format!(
                "amplitude vector of length {} is not a power of two",
                amplitudes.len()
            ))
        })?;
        cap::check(num_qubits)?;
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > EPS {
            return Err(Error::InvalidState(format!("squared norm {norm} != 1")));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Normalises the vector first. Fails on a zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= f64::MIN_POSITIVE {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes / c(norm, 0.0))
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        cap::check(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, num_qubits });
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes: v,
        })
    }

    /// `|+_theta> = (|0> + e^{i theta}|1>)/sqrt 2`.
    pub fn plus_phase(theta: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            num_qubits: 1,
            amplitudes: CVector::from_column_slice(&[c(s, 0.0), C64::from_polar(s, theta)]),
        }
    }

    pub(crate) fn from_parts_unchecked(num_qubits: usize, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self { num_qubits, amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.num_qubits + other.num_qubits;
        cap::check(n)?;
        Ok(Self {
            num_qubits: n,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    /// `self^{⊗ t}`.
    pub fn power(&self, t: usize) -> Result<PureState> {
        cap::check(self.num_qubits * t)?;
        let mut acc = PureState::from_parts_unchecked(0, CVector::from_element(1, ONE));
        for _ in 0..t {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            num_qubits: self.num_qubits,
            matrix: linalg::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Reduced state on `keep`, computed from the amplitudes directly.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_keep(keep, self.num_qubits)?;
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let n = self.num_qubits;
        // A[i_keep, i_traced]
        let mut a = CMatrix::zeros(kd, td);
        for idx in 0..self.dim() {
            let ik = gather_bits(idx, &keep, n);
            let it = gather_bits(idx, &traced, n);
            a[(ik, it)] = self.amplitudes[idx];
        }
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            matrix: &a * a.adjoint(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let num_qubits = square_qubits(&matrix)?;
        cap::check(num_qubits)?;
        let dev = hermitian_deviation(&matrix);
        if dev > EPS {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > EPS {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = eigvalsh(&matrix).last().copied().unwrap_or(0.0);
        if min < -EPS {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let num_qubits = log2_exact(matrix.nrows()).expect("power-of-two dimension");
        Self { num_qubits, matrix }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        cap::check(num_qubits)?;
        let d = 1usize << num_qubits;
        Ok(Self {
            num_qubits,
            matrix: CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0),
        })
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = log2_exact(probs.len())
            .ok_or_else(|| Error::InvalidState(format!("dimension {} is not a power of two", probs.len())))?;
        cap::check(n)?;
        if probs.iter().any(|&p| p.is_nan() || p < -EPS) {
            return Err(Error::InvalidState("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > EPS {
            return Err(Error::InvalidState(format!("trace {total} != 1")));
        }
        Ok(Self::from_matrix_unchecked(CMatrix::from_diagonal(
            &CVector::from_iterator(probs.len(), probs.iter().map(|&p| c(p, 0.0))),
        )))
    }

    /// Mixture `Σ w_i ρ_i`; weights must form a distribution.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::BadDistribution("empty mixture".into()))?;
        let d = first.1.dim();
        let mut m = CMatrix::zeros(d, d);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::BadDistribution(format!("negative weight {w}")));
            }
            total += w;
            m += &rho.matrix * c(*w, 0.0);
        }
        if (total - 1.0).abs() > EPS {
            return Err(Error::BadDistribution(format!("weights sum to {total}")));
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.num_qubits + other.num_qubits;
        cap::check(n)?;
        Ok(Self {
            num_qubits: n,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn power(&self, t: usize) -> Result<DensityMatrix> {
        cap::check(self.num_qubits * t)?;
        let mut acc = Self::from_matrix_unchecked(CMatrix::from_element(1, 1, ONE));
        for _ in 0..t {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// Expectation `Tr(ρ A)` of a Hermitian operator.
    pub fn expectation<O: Operator>(&self, op: &O) -> Result<f64> {
        same_dim(self, op)?;
        Ok(linalg::trace_product(&self.matrix, op.matrix()).re)
    }

    /// Re-check every invariant (used by tests and debug assertions).
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone()).map(|_| ())
    }
}

impl Operator for DensityMatrix {
    fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Hermitian matrix with no trace or positivity requirement.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    matrix: CMatrix,
}

impl HermitianMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let dev = hermitian_deviation(&matrix);
        if dev > EPS {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self { matrix })
    }

    /// Symmetrises `(M + M†)/2` instead of rejecting small deviations.
    pub fn symmetrized(matrix: &CMatrix) -> Self {
        Self {
            matrix: linalg::symmetrize(matrix),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn difference<A: Operator, B: Operator>(a: &A, b: &B) -> Result<Self> {
        same_dim(a, b)?;
        Ok(Self {
            matrix: a.matrix() - b.matrix(),
        })
    }

    pub fn from_operator<O: Operator>(op: &O) -> Self {
        Self {
            matrix: op.matrix().clone(),
        }
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Half the trace norm, `||M||_tr`.
    pub fn trace_norm_half(&self) -> f64 {
        linalg::half_trace_norm(&self.matrix)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * c(s, 0.0),
        }
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<Self> {
        same_dim(self, other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }
}

impl Operator for HermitianMatrix {
    fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
}

impl Projector {
    /// Validates Hermiticity and idempotence (`EIG_TOL`).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(matrix)?;
        let sq = &h.matrix * &h.matrix;
        let dev = max_abs_diff(&sq, &h.matrix);
        if dev > EIG_TOL {
            return Err(Error::InvalidState(format!("not idempotent (deviation {dev:.3e})")));
        }
        Ok(Self { matrix: h.matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    /// Rank-one projector onto a pure state.
    pub fn onto(state: &PureState) -> Self {
        Self {
            matrix: state.density().into_matrix(),
        }
    }

    /// `I - Π`.
    pub fn complement(&self) -> Self {
        let d = self.dim();
        Self {
            matrix: CMatrix::identity(d, d) - &self.matrix,
        }
    }

    pub fn rank(&self) -> usize {
        linalg::trace(&self.matrix).re.round() as usize
    }
}

impl Operator for Projector {
    fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

pub(crate) fn same_dim<A: Operator + ?Sized, B: Operator + ?Sized>(a: &A, b: &B) -> Result<()> {
    if a.dim() != b.dim() {
        Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        })
    } else {
        Ok(())
    }
}

fn square_qubits(m: &CMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    log2_exact(m.nrows()).ok_or_else(|| Error::InvalidState(format!("dimension {} is not a power of two", m.nrows())))
}

pub(crate) fn normalize_keep(keep: &[usize], num_qubits: usize) -> Result<Vec<usize>> {
    let mut k: Vec<usize> = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if let Some(&bad) = k.iter().find(|&&q| q >= num_qubits) {
        return Err(Error::IndexOutOfRange { index: bad, num_qubits });
    }
    Ok(k)
}

/// Collects the bits of `idx` at qubit positions `qubits` (MSB-first order)
/// into a compact index.
pub(crate) fn gather_bits(idx: usize, qubits: &[usize], n: usize) -> usize {
    qubits
        .iter()
        .fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
}

/// Serialisable matrix form: rows of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRepr(pub Vec<Vec<[f64; 2]>>);

impl MatrixRepr {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> CMatrix {
        let n = self.0.len();
        let cols = self.0.first().map_or(0, |r| r.len());
        CMatrix::from_fn(n, cols, |i, j| c(self.0[i][j][0], self.0[i][j][1]))
    }
}

/// Serialisable vector form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorRepr(pub Vec<[f64; 2]>);

impl VectorRepr {
    pub fn from_vector(v: &CVector) -> Self {
        Self(v.iter().map(|z| [z.re, z.im]).collect())
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_iterator(self.0.len(), self.0.iter().map(|p| c(p[0], p[1])))
    }
}
