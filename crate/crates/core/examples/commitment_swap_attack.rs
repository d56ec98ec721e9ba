//! PRG commitment, flavor conversion, honest binding and the swap-test
//! hiding attack.

use qclab::attacks::swap_hiding_attack;
use qclab::constructions::{flavor_convert, prg_commitment};
use qclab::primitives::{make_toy_prg, run_efi_game, PrgKind};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    let prg = make_toy_prg(PrgKind::RandomInjection, 2, &mut Rng::from_seed(13))?;
    let com = prg_commitment(&prg)?;
    println!("|R| = {}, |C| = {}", com.reveal_qubits(), com.commit_qubits());
    println!("binding optimum {:.6} <= 2^-2", com.honest_binding_optimum()?.fidelity);
    let conv = flavor_convert(&com)?;
    println!(
        "converted: |R'| = {}, |C'| = {}",
        conv.reveal_qubits(),
        conv.commit_qubits()
    );
    let (dist, a) = swap_hiding_attack(&conv)?;
    println!(
        "Tr rho0^2 = {:.6} >= {:.6}, predicted advantage {:.6}",
        a.purity0, a.rank_bound, a.predicted_advantage
    );
    let game = run_efi_game(&conv.hiding_pair()?, &dist, 10_000, &Rng::from_seed(14))?;
    println!("measured {:.4} ± {:.4}", game.estimate, game.ci95_halfwidth);
    Ok(())
}
