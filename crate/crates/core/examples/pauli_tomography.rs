//! Sampled Pauli tomography with a Hoeffding budget.

use qclab::attacks::{reference_copies_formula, shots_per_pauli, tomography_sampled, DEFAULT_SHOT_CEILING};
use qclab::qcore::random_density;
use qclab::{HermitianMatrix, Result, Rng};

fn main() -> Result<()> {
    let (delta, beta) = (0.1, 0.05);
    println!("shots per Pauli: {}", shots_per_pauli(2, delta, beta)?);
    println!(
        "reference budget 144 lambda d^4/delta^2 at lambda=16: {}",
        reference_copies_formula(16, 2, delta)
    );
    let root = Rng::from_seed(11);
    let mut failures = 0;
    for i in 0..50 {
        let run = root.child_indexed("run", i);
        let rho = random_density(1, &mut run.child("state"))?;
        let est = tomography_sampled(&rho, delta, beta, DEFAULT_SHOT_CEILING, &mut run.child("shots"))?;
        let err = HermitianMatrix::difference(&est.estimate, &rho)?.trace_norm_half();
        failures += usize::from(err > delta);
    }
    println!("failures: {failures}/50");
    Ok(())
}
