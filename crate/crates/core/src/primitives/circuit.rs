//! Unitaries as gate lists acting on state vectors.
//!
//! Registers beyond about ten qubits are too large for dense unitaries, so
//! commitments carry their `Q_b` as circuits and apply them to vectors.

use std::sync::Arc;

use super::super::qcore::linalg::{c, CMatrix, CVector, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::qcore::{cap, PureState};

/// Largest register for which [`Circuit::to_dense`] is allowed.
pub const DENSE_QUBIT_LIMIT: usize = 10;

#[derive(Clone, Debug)]
pub enum Gate {
    Hadamard(usize),
    PauliX(usize),
    PauliZ(usize),
    /// Basis permutation `|i⟩ ↦ |perm[i]⟩`.
    Permutation(Arc<Vec<usize>>),
    /// `phase * (I - 2 w w† / w†w)`.
    Reflection {
        w: Arc<CVector>,
        phase: C64,
    },
    /// Applies `branches[x]` to the other qubits (in order) when the control
    /// qubit holds `x`.
    Select {
        control: usize,
        branches: Arc<[Circuit; 2]>,
    },
    Dense(Arc<CMatrix>),
}

#[derive(Clone, Debug)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

fn bit_of(q: usize, n: usize) -> usize {
    1usize << (n - 1 - q)
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::IndexOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                left: d,
                right: self.dim(),
            });
        }
        Ok(())
    }

    /// Appends a gate after validating it against the register.
    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        match &gate {
            Gate::Hadamard(q) | Gate::PauliX(q) | Gate::PauliZ(q) => self.check_qubit(*q)?,
            Gate::Permutation(p) => {
                self.check_dim(p.len())?;
                let mut seen = vec![false; p.len()];
                for &j in p.iter() {
                    if j >= p.len() || std::mem::replace(&mut seen[j], true) {
                        return Err(Error::InvalidParam("permutation is not a bijection".into()));
                    }
                }
            }
            Gate::Reflection { w, phase } => {
                self.check_dim(w.len())?;
                if (phase.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParam("reflection phase must have modulus 1".into()));
                }
            }
            Gate::Select { control, branches } => {
                self.check_qubit(*control)?;
                for b in branches.iter() {
                    if b.num_qubits + 1 != self.num_qubits {
                        return Err(Error::DimensionMismatch {
                            left: b.num_qubits + 1,
                            right: self.num_qubits,
                        });
                    }
                }
            }
            Gate::Dense(m) => {
                self.check_dim(m.nrows())?;
                self.check_dim(m.ncols())?;
                let defect = (m.adjoint() * m.as_ref() - CMatrix::identity(m.nrows(), m.nrows()))
                    .iter()
                    .fold(0.0f64, |a, z| a.max(z.norm()));
                if defect > 1e-8 {
                    return Err(Error::InvalidParam(format!(
                        "dense gate is not unitary (defect {defect:.3e})"
                    )));
                }
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn then(mut self, gate: Gate) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn hadamard_layer(mut self, qubits: impl IntoIterator<Item = usize>) -> Result<Self> {
        for q in qubits {
            self.push(Gate::Hadamard(q))?;
        }
        Ok(self)
    }

    /// Reorders qubits: output qubit `j` carries input qubit `source[j]`.
    pub fn qubit_permutation(num_qubits: usize, source: &[usize]) -> Result<Gate> {
        if source.len() != num_qubits {
            return Err(Error::DimensionMismatch {
                left: source.len(),
                right: num_qubits,
            });
        }
        let mut seen = vec![false; num_qubits];
        for &s in source {
            if s >= num_qubits || std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidParam("qubit map is not a bijection".into()));
            }
        }
        let perm = (0..1usize << num_qubits)
            .map(|i| {
                (0..num_qubits).fold(0usize, |acc, j| {
                    if i & bit_of(source[j], num_qubits) != 0 {
                        acc | bit_of(j, num_qubits)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Ok(Gate::Permutation(Arc::new(perm)))
    }

    /// Householder-type unitary `U` with `U|0⟩ = ψ`.
    pub fn preparation(psi: &PureState) -> Gate {
        let a0 = psi.amplitudes()[0];
        let theta = if a0.norm() > 0.0 { a0.arg() } else { 0.0 };
        let phase = C64::from_polar(1.0, theta);
        let mut w = psi.amplitudes() * phase.conj();
        w.neg_mut();
        w[0] += ONE;
        Gate::Reflection { w: Arc::new(w), phase }
    }

    pub fn apply(&self, v: &mut CVector) -> Result<()> {
        self.check_dim(v.len())?;
        for g in &self.gates {
            apply_gate(g, self.num_qubits, v, false);
        }
        Ok(())
    }

    pub fn apply_adjoint(&self, v: &mut CVector) -> Result<()> {
        self.check_dim(v.len())?;
        for g in self.gates.iter().rev() {
            apply_gate(g, self.num_qubits, v, true);
        }
        Ok(())
    }

    /// `U|0…0⟩`.
    pub fn prepare(&self) -> Result<PureState> {
        cap::check(self.num_qubits)?;
        let mut v = CVector::zeros(self.dim());
        v[0] = ONE;
        self.apply(&mut v)?;
        PureState::normalized(v)
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.num_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::ParamTooLarge(format!(
                "dense unitary on {} qubits",
                self.num_qubits
            )));
        }
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..d {
            let mut v = CVector::zeros(d);
            v[j] = ONE;
            self.apply(&mut v)?;
            m.set_column(j, &v);
        }
        Ok(m)
    }

    /// `max |U†U - I|`, computed densely.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let u = self.to_dense()?;
        let d = u.nrows();
        Ok((u.adjoint() * &u - CMatrix::identity(d, d))
            .iter()
            .fold(0.0f64, |a, z| a.max(z.norm())))
    }
}

fn apply_gate(g: &Gate, n: usize, v: &mut CVector, adjoint: bool) {
    match g {
        Gate::Hadamard(q) => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let b = bit_of(*q, n);
            for i in 0..v.len() {
                if i & b == 0 {
                    let (x, y) = (v[i], v[i | b]);
                    v[i] = (x + y) * s;
                    v[i | b] = (x - y) * s;
                }
            }
        }
        Gate::PauliX(q) => {
            let b = bit_of(*q, n);
            for i in 0..v.len() {
                if i & b == 0 {
                    v.swap_rows(i, i | b);
                }
            }
        }
        Gate::PauliZ(q) => {
            let b = bit_of(*q, n);
            for i in 0..v.len() {
                if i & b != 0 {
                    v[i] = -v[i];
                }
            }
        }
        Gate::Permutation(p) => {
            let old = v.clone();
            for (i, &j) in p.iter().enumerate() {
                if adjoint {
                    v[i] = old[j];
                } else {
                    v[j] = old[i];
                }
            }
        }
        Gate::Reflection { w, phase } => {
            let norm2 = w.norm_squared();
            let ph = if adjoint { phase.conj() } else { *phase };
            if norm2 > 0.0 {
                let coef = w.dotc(v) * c(2.0 / norm2, 0.0);
                v.axpy(-coef, w, ONE);
            }
            *v *= ph;
        }
        Gate::Select { control, branches } => {
            let b = bit_of(*control, n);
            let low = b - 1;
            // index of the remaining qubits: drop the control bit
            let squeeze = |i: usize| ((i >> 1) & !low) | (i & low);
            let half = v.len() / 2;
            for (x, branch) in branches.iter().enumerate() {
                let mut sub = CVector::from_element(half, ZERO);
                for i in 0..v.len() {
                    if (i & b != 0) == (x == 1) {
                        sub[squeeze(i)] = v[i];
                    }
                }
                if adjoint {
                    branch.apply_adjoint(&mut sub).expect("validated branch");
                } else {
                    branch.apply(&mut sub).expect("validated branch");
                }
                for i in 0..v.len() {
                    if (i & b != 0) == (x == 1) {
                        v[i] = sub[squeeze(i)];
                    }
                }
            }
        }
        Gate::Dense(m) => {
            *v = if adjoint { m.adjoint() * &*v } else { m.as_ref() * &*v };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::haar_sample;
    use crate::qcore::linalg::max_abs_diff;
    use crate::qcore::Rng;

    #[test]
    fn preparation_maps_zero_to_target() {
        let mut rng = Rng::from_seed(1);
        for _ in 0..20 {
            let psi = haar_sample(3, &mut rng).unwrap();
            let circ = Circuit::new(3).then(Circuit::preparation(&psi)).unwrap();
            let out = circ.prepare().unwrap();
            assert!((out.inner(&psi).unwrap() - ONE).norm() < 1e-12);
            assert!(circ.unitarity_defect().unwrap() < 1e-12);
        }
        let zero = PureState::basis(2, 0).unwrap();
        let circ = Circuit::new(2).then(Circuit::preparation(&zero)).unwrap();
        assert!(max_abs_diff(&circ.to_dense().unwrap(), &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn adjoint_inverts() {
        let mut rng = Rng::from_seed(2);
        let psi = haar_sample(3, &mut rng).unwrap();
        let inner = Circuit::new(2)
            .hadamard_layer([0])
            .unwrap()
            .then(Gate::PauliZ(1))
            .unwrap();
        let circ = Circuit::new(3)
            .hadamard_layer([0, 2])
            .unwrap()
            .then(Gate::PauliX(1))
            .unwrap()
            .then(Circuit::qubit_permutation(3, &[2, 0, 1]).unwrap())
            .unwrap()
            .then(Circuit::preparation(&psi))
            .unwrap()
            .then(Gate::Select {
                control: 1,
                branches: Arc::new([Circuit::new(2), inner]),
            })
            .unwrap();
        let u = circ.to_dense().unwrap();
        assert!(circ.unitarity_defect().unwrap() < 1e-12);
        let mut v = haar_sample(3, &mut rng).unwrap().into_amplitudes();
        let orig = v.clone();
        circ.apply(&mut v).unwrap();
        assert!((&v - &u * &orig).norm() < 1e-12);
        circ.apply_adjoint(&mut v).unwrap();
        assert!((&v - &orig).norm() < 1e-12);
    }

    #[test]
    fn qubit_permutation_moves_bits() {
        // output qubit 0 carries input qubit 2: |001⟩ -> |100⟩
        let g = Circuit::qubit_permutation(3, &[2, 0, 1]).unwrap();
        let circ = Circuit::new(3).then(g).unwrap();
        let mut v = CVector::zeros(8);
        v[1] = ONE;
        circ.apply(&mut v).unwrap();
        assert_eq!(v[4], ONE);
    }

    #[test]
    fn select_matches_block_diagonal() {
        let x = Circuit::new(1).then(Gate::PauliX(0)).unwrap();
        let circ = Circuit::new(2)
            .then(Gate::Select {
                control: 0,
                branches: Arc::new([Circuit::new(1), x]),
            })
            .unwrap();
        // controlled-NOT with control on qubit 0
        let cnot = CMatrix::from_fn(4, 4, |i, j| {
            let target = if j >= 2 { j ^ 1 } else { j };
            if i == target {
                ONE
            } else {
                ZERO
            }
        });
        assert!(max_abs_diff(&circ.to_dense().unwrap(), &cnot) < 1e-15);
    }

    #[test]
    fn invalid_gates_are_rejected() {
        let mut circ = Circuit::new(2);
        assert!(circ.push(Gate::Hadamard(2)).is_err());
        assert!(circ.push(Gate::Permutation(Arc::new(vec![0, 0, 1, 2]))).is_err());
        let m = CMatrix::from_element(4, 4, ONE);
        assert!(circ.push(Gate::Dense(Arc::new(m))).is_err());
    }
}
