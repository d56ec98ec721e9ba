//! The random-key adversary against Haar-toy OWSGs: exact win probability,
//! pairwise quantities and a sampled game.

use qclab::attacks::{expected_pairwise_quantities, trivial_adversary, trivial_win_probability};
use qclab::constructions::prsg_to_owsg;
use qclab::primitives::{make_haar_prsg, run_onewayness_game, CopyMode, GameOptions, Scoring};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    let root = Rng::from_seed(7);
    for (n, m) in [(3, 1), (4, 2), (6, 3)] {
        let scheme = prsg_to_owsg(&make_haar_prsg(n, m, &mut root.child_indexed("scheme", n as u64))?)?;
        let exact = trivial_win_probability(&scheme)?;
        let q = expected_pairwise_quantities(&scheme, 100_000, &root.child("pairs"))?;
        let opts = GameOptions {
            copies: 1,
            trials: 10_000,
            mode: CopyMode::Sampled,
            scoring: Scoring::Sampled,
            record_td: false,
        };
        let game = run_onewayness_game(&scheme, &trivial_adversary(&scheme), &opts, &root.child("game"))?;
        println!(
            "n={n} m={m}: exact {exact:.6} (floor 2^-m = {:.4}), sampled {:.4} ± {:.4}, E TD {:.4} <= {:.4}",
            (-(m as f64)).exp2(),
            game.estimate,
            game.ci95_halfwidth,
            q.expected_td,
            q.bound
        );
    }
    Ok(())
}
