//! Process-wide limit on the number of simulated qubits.
//!
//! The default comes from `QCLAB_MAX_QUBITS` (12 when unset) and can be
//! raised or lowered at runtime, but never above [`HARD_LIMIT`].

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_QUBITS: usize = 12;
pub const HARD_LIMIT: usize = 16;
pub const ENV_VAR: &str = "QCLAB_MAX_QUBITS";

// 0 means "not yet initialised from the environment".
static CAP: AtomicUsize = AtomicUsize::new(0);

fn from_env() -> usize {
    std::env::var(ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.clamp(1, HARD_LIMIT))
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

/// Current qubit cap.
pub fn max_qubits() -> usize {
    match CAP.load(Ordering::Relaxed) {
        0 => {
            let v = from_env();
            let _ = CAP.compare_exchange(0, v, Ordering::Relaxed, Ordering::Relaxed);
            CAP.load(Ordering::Relaxed)
        }
        v => v,
    }
}

/// Override the cap. Values above [`HARD_LIMIT`] or zero are rejected.
pub fn set_max_qubits(n: usize) -> Result<()> {
    if n == 0 || n > HARD_LIMIT {
        return Err(Error::Config(format!(
            "max_qubits must be in 1..={HARD_LIMIT}, got {n}"
        )));
    }
    CAP.store(n, Ordering::Relaxed);
    Ok(())
}

/// Fails with `CapExceeded` when `qubits` is above the current cap.
pub fn check(qubits: usize) -> Result<()> {
    let cap = max_qubits();
    if qubits > cap {
        Err(Error::CapExceeded { requested: qubits, cap })
    } else {
        Ok(())
    }
}
