//! Welch-type lower bound on the expected pairwise overlap of an ensemble.

use qclab::bounds::{welch_check, welch_sweep};
use qclab::{PureState, Result, Rng};

fn main() -> Result<()> {
    let sweep = welch_sweep(100, &Rng::from_seed(1))?;
    println!(
        "{} random ensembles: {} violations, min margin {:.3e}",
        sweep.instances, sweep.violations, sweep.min_margin
    );
    let basis = (0..4).map(|i| PureState::basis(2, i)).collect::<Result<Vec<_>>>()?;
    for k in 1..=3 {
        let c = welch_check(&basis, &[0.25; 4], k)?;
        println!(
            "orthonormal basis, k={k}: lhs {:.6} >= rhs {:.6} (margin {:.2e})",
            c.lhs, c.rhs, c.margin
        );
    }
    Ok(())
}
