//! Dense states, partial trace, trace distance, fidelity and the swap test.

use qclab::qcore::{fidelity, partial_trace, swap_test_accept_prob, trace_distance};
use qclab::{DensityMatrix, PureState, Result, Rng};

fn main() -> Result<()> {
    // (|00⟩⟨00| + |11⟩⟨11|)/2
    let zeros = PureState::basis(2, 0)?.density();
    let classical = DensityMatrix::mixture(&[(0.5, &zeros), (0.5, &PureState::basis(2, 3)?.density())])?;
    let half = partial_trace(&classical, &[0])?;
    let mixed = DensityMatrix::maximally_mixed(1)?;
    println!(
        "Tr_1 of the classical mixture: TD to I/2 = {:.3e}",
        trace_distance(&half, &mixed)?
    );

    let zero = PureState::basis(1, 0)?;
    let plus = PureState::plus_phase(0.0);
    println!("|<0|+>|^2          = {:.6}", zero.overlap_sq(&plus)?);
    println!(
        "F(|0>, |+>)         = {:.6}",
        fidelity(&zero.density(), &plus.density())?
    );
    println!(
        "TD(|0>, |+>)        = {:.6}",
        trace_distance(&zero.density(), &plus.density())?
    );
    println!(
        "swap test accepts   = {:.6}",
        swap_test_accept_prob(&zero.density(), &plus.density())?
    );

    let mut rng = Rng::from_seed(7);
    let rho = qclab::qcore::random_density(2, &mut rng)?;
    println!("random 2-qubit density: purity {:.6}", rho.purity());
    Ok(())
}
