//! Security games and the objects they are played with.

pub mod backends;
pub mod circuit;
pub mod commitment;
pub mod efi;
pub mod owsg;
pub mod report;

pub use backends::{
    make_haar_prsg, make_toy_owf, make_toy_prg, Backend, BackendDescriptor, BackendKind, HaarPrsg, OwfKind, PrgKind,
    ToyOwf, ToyPrg,
};
pub use circuit::{Circuit, Gate};
pub use commitment::{commitment_from_states, BindingOptimum, CanonicalCommitment};
pub use efi::{run_efi_game, Distinguisher, EfiPair, FnDistinguisher};
pub use owsg::{run_onewayness_game, Adversary, Challenge, FnAdversary, GameOptions, KeyDistribution, OwsgScheme};
pub use report::{ci95, ArmTallies, CopyMode, GameReport, Relation, Scoring, TrialRecord};
