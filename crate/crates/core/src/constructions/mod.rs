//! Fingerprinting, OWSG constructions, the PRG-based EFI pair and
//! commitment, and flavor conversion.

pub mod code;
pub mod fingerprint;
pub mod phase;
pub mod prg;
pub mod prsg;
pub mod qrom;

pub use code::{build_linear_code, CodeDescriptor, CodeSearch, LinearCode, DEFAULT_TARGET_DELTA};
pub use fingerprint::{audit_overlaps, fingerprint_owsg, repetitions_for, Fingerprint, OverlapAudit};
pub use phase::{digit_overlap, digit_overlap_bound, phase_owsg, phase_state, product_overlap, DigitLayout};
pub use prg::{flavor_convert, prg_commitment, prg_efi, prg_efi_exact};
pub use prsg::{prsg_delta, prsg_to_owsg};
pub use qrom::{qrom_fingerprint, qrom_overlap_scan, QromScan, RandomOracle};
