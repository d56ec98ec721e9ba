//! Desk-scale laboratory for quantum cryptographic primitives whose
//! outputs are only a handful of qubits.
//!
//! The crate simulates small registers exactly (dense state vectors and
//! density matrices) and builds on that:
//!
//! * [`qcore`]: states, partial trace, trace distance, fidelity (squared
//!   convention, `F = (Tr sqrt(sqrt σ ρ sqrt σ))^2`), spectral tools,
//!   measurement, swap test and Haar sampling.
//! * [`primitives`]: one-way state generator schemes and the one-wayness
//!   game, EFI pairs and the distinguishing game, canonical bit commitments,
//!   and seeded toy back-ends standing in for OWFs, PRGs and PRSGs.
//! * [`constructions`]: code-based fingerprinting, fingerprint and phase
//!   OWSGs, the PRSG wrapper, the PRG-based EFI pair and commitment, and
//!   flavor conversion.
//! * [`attacks`]: the random-key adversary, Pauli tomography, explicit nets,
//!   the tomography-plus-net key recovery, the spectral EFI distinguisher and
//!   the swap-test hiding attack.
//! * [`bounds`]: numerical checks of the inequalities the above rely on.
//! * [`harness`]: JSON-configured experiments, reports, plots and the
//!   acceptance suite driven by the `qclab` binary.
//!
//! Nothing here simulates computational hardness; the toy back-ends are
//! information-theoretic stand-ins.

pub mod attacks;
pub mod bounds;
pub mod constructions;
pub mod error;
pub mod harness;
pub mod primitives;
pub mod qcore;

pub use error::{Error, Result};
pub use qcore::{DensityMatrix, HermitianMatrix, Projector, PureState, Rng};
