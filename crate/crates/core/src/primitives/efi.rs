//! EFI pairs and the distinguishing game.

use rayon::prelude::*;

use super::report::{ArmTallies, CopyMode, GameReport};
use crate::error::{Error, Result};
use crate::qcore::{fidelity, trace_distance, DensityMatrix, Rng};

/// Two `ℓ`-qubit states `ρ_0, ρ_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EfiPair {
    label: String,
    rho: [DensityMatrix; 2],
}

impl EfiPair {
    pub fn new(label: impl Into<String>, rho0: DensityMatrix, rho1: DensityMatrix) -> Result<Self> {
        if rho0.num_qubits() != rho1.num_qubits() {
            return Err(Error::DimensionMismatch {
                left: rho0.num_qubits(),
                right: rho1.num_qubits(),
            });
        }
        Ok(EfiPair {
            label: label.into(),
            rho: [rho0, rho1],
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn num_qubits(&self) -> usize {
        self.rho[0].num_qubits()
    }

    /// `StateGen(b)`.
    pub fn state(&self, b: bool) -> &DensityMatrix {
        &self.rho[b as usize]
    }

    pub fn trace_distance(&self) -> f64 {
        trace_distance(&self.rho[0], &self.rho[1]).expect("equal dimensions")
    }

    pub fn fidelity(&self) -> f64 {
        fidelity(&self.rho[0], &self.rho[1]).expect("equal dimensions")
    }
}

/// Receives one challenge copy and outputs a bit.
pub trait Distinguisher: Sync {
    fn name(&self) -> String;

    fn distinguish(&self, challenge: &DensityMatrix, rng: &mut Rng) -> Result<bool>;

    /// Copy-access mode recorded in reports.
    fn mode(&self) -> CopyMode {
        CopyMode::Sampled
    }
}

/// Adapter turning a closure into a [`Distinguisher`].
pub struct FnDistinguisher<F> {
    name: String,
    f: F,
}

impl<F> FnDistinguisher<F>
where
    F: Fn(&DensityMatrix, &mut Rng) -> Result<bool> + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnDistinguisher { name: name.into(), f }
    }
}

impl<F> Distinguisher for FnDistinguisher<F>
where
    F: Fn(&DensityMatrix, &mut Rng) -> Result<bool> + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn distinguish(&self, challenge: &DensityMatrix, rng: &mut Rng) -> Result<bool> {
        (self.f)(challenge, rng)
    }
}

/// Runs `trials_per_arm` challenges from each of `ρ_0` and `ρ_1`.
/// Trial `i` of arm `b` uses the child stream `("arm{b}", i)`.
pub fn run_efi_game(
    pair: &EfiPair,
    distinguisher: &dyn Distinguisher,
    trials_per_arm: u64,
    rng: &Rng,
) -> Result<GameReport> {
    let arm = |b: bool| -> Result<u64> {
        let label = if b { "arm1" } else { "arm0" };
        let bits = (0..trials_per_arm)
            .into_par_iter()
            .map(|i| distinguisher.distinguish(pair.state(b), &mut rng.child_indexed(label, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(bits.into_iter().filter(|&x| x).count() as u64)
    };
    let arms = ArmTallies {
        trials0: trials_per_arm,
        ones0: arm(false)?,
        trials1: trials_per_arm,
        ones1: arm(true)?,
    };
    Ok(GameReport::from_arms(
        format!("efi/{}/{}", pair.label(), distinguisher.name()),
        arms,
        distinguisher.mode(),
    ))
}
