//! Tomography-and-net key recovery against a one-qubit Haar-toy OWSG.

use qclab::attacks::{net_attack, AttackTomography, NetAttackConfig, Perturbation, DEFAULT_NET_CEILING};
use qclab::constructions::prsg_to_owsg;
use qclab::primitives::{make_haar_prsg, run_onewayness_game, GameOptions, Scoring};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    let scheme = prsg_to_owsg(&make_haar_prsg(3, 1, &mut Rng::from_seed(8))?)?;
    let cfg = NetAttackConfig {
        lam: 16,
        failure_budget: None,
        iterations: None,
        tomography: AttackTomography::Oracle(Perturbation::None),
        net_ceiling: DEFAULT_NET_CEILING,
    };
    let attack = net_attack(&scheme, 0.2, &cfg)?;
    let p = attack.params().clone();
    println!("gamma {:.4}, mode {:?}", p.gamma, p.mode);
    let opts = GameOptions {
        copies: 1,
        trials: 500,
        mode: p.mode,
        scoring: Scoring::Exact,
        record_td: true,
    };
    let game = run_onewayness_game(&scheme, &attack, &opts, &Rng::from_seed(9))?;
    println!(
        "win {:.4} ± {:.4} (target >= 0.8), bot rate {:.4}",
        game.estimate,
        game.ci95_halfwidth,
        game.bot_rate()
    );
    Ok(())
}
