//! Randomized checks of the trace-product, projector and mixture inequalities.

use qclab::bounds::{fidelity_mix_sweep, projector_td_check, trf_sweep};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    let root = Rng::from_seed(12);
    for s in [
        trf_sweep(1000, 2, &root.child("trf"))?,
        projector_td_check(1000, 2, &root.child("projector"))?,
        fidelity_mix_sweep(1000, 2, 3, &root.child("mix"))?,
    ] {
        println!(
            "{}: {} instances, {} violations, min margin {:.3e}",
            s.name, s.instances, s.violations, s.min_margin
        );
    }
    Ok(())
}
