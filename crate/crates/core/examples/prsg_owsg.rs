//! OWSG from an idealized PRSG against its slack term.

use qclab::attacks::trivial_win_probability;
use qclab::constructions::{prsg_delta, prsg_to_owsg};
use qclab::primitives::make_haar_prsg;
use qclab::{Result, Rng};

fn main() -> Result<()> {
    for m in 4..=6 {
        let scheme = prsg_to_owsg(&make_haar_prsg(4, m, &mut Rng::from_seed(m as u64))?)?;
        println!(
            "n=4 m={m}: random-key win {:.6} <= slack {:.6}",
            trivial_win_probability(&scheme)?,
            prsg_delta(4, m, 0.25)
        );
    }
    Ok(())
}
