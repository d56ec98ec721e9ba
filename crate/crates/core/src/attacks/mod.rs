//! Adversaries: random keys, tomography, γ-nets, the net attack on short
//! OWSGs, the spectral EFI distinguisher and the swap-test hiding attack.

pub mod efi;
pub mod net;
pub mod net_attack;
pub mod swap;
pub mod tomography;
pub mod transcript;
pub mod trivial;

pub use efi::{
    adversarial_pair_perturbation, efi_distinguisher, helstrom_projector, EfiAttackAnalysis, EfiDistinguisher,
    EfiTomography, EstimateReuse, PairPerturbation,
};
pub use net::{build_net, project_to_states, CoveringAudit, EpsNet, NetGrid, DEFAULT_NET_CEILING};
pub use net_attack::{net_attack, AttackTomography, NetAttack, NetAttackConfig, NetAttackOutcome, NetAttackParams};
pub use swap::{swap_hiding_attack, SwapAnalysis, SwapDistinguisher};
pub use tomography::{
    reference_copies_formula, scaled_to_norm, shots_per_pauli, tomography, tomography_oracle, tomography_sampled,
    Perturbation, ShotSource, TomographyEstimate, TomographySource, DEFAULT_SHOT_CEILING,
};
pub use transcript::{transcript_jsonl, transcript_lines, TranscriptLine};
pub use trivial::{
    expected_pairwise_quantities, trivial_adversary, trivial_win_probability, PairwiseQuantities, TrivialAdversary,
};
