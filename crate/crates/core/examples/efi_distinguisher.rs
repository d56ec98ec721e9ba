//! Spectral distinguisher from delta-close state estimates, played in the
//! distinguishing game.

use qclab::attacks::{efi_distinguisher, EfiTomography, EstimateReuse, PairPerturbation};
use qclab::constructions::prg_efi;
use qclab::primitives::{make_toy_prg, run_efi_game, PrgKind};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    let prg = make_toy_prg(PrgKind::RandomInjection, 3, &mut Rng::from_seed(5))?;
    let pair = prg_efi(&prg)?;
    let td = pair.trace_distance();
    for perturbation in [PairPerturbation::None, PairPerturbation::Adversarial] {
        let d = efi_distinguisher(
            &pair,
            1.0 / td,
            EfiTomography::Oracle { perturbation },
            EstimateReuse::Cached,
            &Rng::from_seed(6),
        )?;
        let a = d.analysis();
        let game = run_efi_game(&pair, &d, 2000, &Rng::from_seed(7))?;
        println!(
            "{perturbation:?}: delta {:.4}, guaranteed {:.4}, measured {:.4} ± {:.4} (TD {td:.4})",
            a.delta, a.guaranteed_advantage, game.estimate, game.ci95_halfwidth
        );
    }
    Ok(())
}
