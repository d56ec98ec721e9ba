//! Exact dense simulation of small registers.

pub mod cap;
pub mod haar;
pub mod linalg;
pub mod ops;
pub mod pauli;
pub mod rng;
pub mod state;

pub use haar::{haar_sample, random_density, random_hermitian};
pub use linalg::{CMatrix, CVector, C64, EIG_TOL, EPS};
pub use ops::{
    fidelity, measure, measure_counts, outcome_probability, partial_trace, positive_part_projector, projector_trace,
    spectral_decompose, swap_test_accept_prob, swap_test_sample, trace_distance, EigenPair,
};
pub use pauli::PauliString;
pub use rng::Rng;
pub use state::{DensityMatrix, HermitianMatrix, Operator, Projector, PureState};

#[cfg(test)]
mod tests;
