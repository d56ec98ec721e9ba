//! The EFI pair built from a length-doubling toy PRG.

use qclab::constructions::{prg_efi, prg_efi_exact};
use qclab::primitives::{make_toy_prg, PrgKind};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    for n in 2..=4 {
        let prg = make_toy_prg(PrgKind::RandomInjection, n, &mut Rng::from_seed(n as u64))?;
        let pair = prg_efi(&prg)?;
        let (td, f) = prg_efi_exact(&prg);
        println!(
            "n={n}: F = {:.6} <= {:.6}, TD = {:.6} >= {:.6} (closed form {td:.6}, {f:.6})",
            pair.fidelity(),
            (-(n as f64)).exp2(),
            pair.trace_distance(),
            1.0 - (-(n as f64) / 2.0).exp2()
        );
    }
    Ok(())
}
