//! Pauli strings as `(x_mask, z_mask)` pairs.
//!
//! `P|k> = i^{#Y} (-1)^{|k & z|} |k ^ x>`, where bit `n-1-q` of a mask refers
//! to qubit `q`.

use super::linalg::{c, CMatrix, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub num_qubits: usize,
    pub x_mask: usize,
    pub z_mask: usize,
}

impl PauliString {
    /// All `4^n` strings, identity first.
    pub fn all(num_qubits: usize) -> Vec<PauliString> {
        let d = 1usize << num_qubits;
        let mut out = Vec::with_capacity(d * d);
        for x_mask in 0..d {
            for z_mask in 0..d {
                out.push(PauliString {
                    num_qubits,
                    x_mask,
                    z_mask,
                });
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    fn y_phase(&self) -> C64 {
        match (self.x_mask & self.z_mask).count_ones() % 4 {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        }
    }

    /// Nonzero entry of column `k`: `(row, value)`.
    pub fn column_entry(&self, k: usize) -> (usize, C64) {
        let sign = if (k & self.z_mask).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        (k ^ self.x_mask, self.y_phase() * sign)
    }

    /// `Tr(P M)`.
    pub fn trace_with(&self, m: &CMatrix) -> C64 {
        // Tr(P M) = Σ_k Σ_j P[j,k] M[k,j]
        let d = 1usize << self.num_qubits;
        let mut acc = ZERO;
        for k in 0..d {
            let (j, v) = self.column_entry(k);
            acc += v * m[(k, j)];
        }
        acc
    }

    /// Adds `scale * P` into `m`.
    pub fn accumulate_into(&self, m: &mut CMatrix, scale: f64) {
        let d = 1usize << self.num_qubits;
        for k in 0..d {
            let (j, v) = self.column_entry(k);
            m[(j, k)] += v * scale;
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        let d = 1usize << self.num_qubits;
        let mut m = CMatrix::zeros(d, d);
        self.accumulate_into(&mut m, 1.0);
        m
    }

    /// Letters such as `"XZ"`, qubit 0 first.
    pub fn label(&self) -> String {
        (0..self.num_qubits)
            .map(|q| {
                let bit = 1usize << (self.num_qubits - 1 - q);
                match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                }
            })
            .collect()
    }
}
