//! Numerical checks of the inequalities the constructions and attacks rely
//! on. Every [`BoundCheck`] carries a witness from which `lhs` and `rhs` are
//! recomputed.

pub mod fidelity;
pub mod haar;
pub mod projector;
pub mod welch;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::primitives::Relation;
use crate::qcore::state::{MatrixRepr, VectorRepr};

pub use fidelity::{fidelity_mix_check, fidelity_mix_sweep, trf_check, trf_sweep};
pub use haar::{haar_concentration_check, haar_tail_probability};
pub use projector::{projector_abs_bound_check, projector_equality_check, projector_td_check, random_projector};
pub use welch::{welch_check, welch_sweep};

/// Default tolerance of the deterministic checks.
pub const MARGIN_TOL: f64 = 1e-9;

/// The instance a check was evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Pure states with a distribution and a moment order `k`.
    Welch {
        states: Vec<VectorRepr>,
        dist: Vec<f64>,
        k: u32,
    },
    /// `hits` of `samples` Haar states had `|⟨ψ|0⟩|² ≥ h`.
    HaarTail {
        m: usize,
        h: f64,
        samples: u64,
        hits: u64,
        seed: u64,
    },
    /// `Tr(ρσ)` versus `F(ρ, σ)`.
    TraceProductFidelity { rho: MatrixRepr, sigma: MatrixRepr },
    /// Uniform mixture of `2^n` pure `m`-qubit states against `I/2^m`.
    FidelityMix {
        states: Vec<VectorRepr>,
        n: usize,
        m: usize,
    },
    /// `Tr(Π₊(A-B))` versus `||A-B||_tr + Tr(A-B)/2`.
    ProjectorEquality { a: MatrixRepr, b: MatrixRepr },
    /// `Tr(Π(A-B))` for a given projector versus the positive-part value.
    ProjectorMaximality {
        a: MatrixRepr,
        b: MatrixRepr,
        projector: MatrixRepr,
    },
    /// `|Tr(Π(A-B))|` versus `2||A-B||_tr`.
    ProjectorAbsBound {
        a: MatrixRepr,
        b: MatrixRepr,
        projector: MatrixRepr,
    },
}

impl Witness {
    /// Recomputes `(lhs, rhs)`.
    pub fn evaluate(&self) -> Result<(f64, f64)> {
        match self {
            Witness::Welch { states, dist, k } => welch::evaluate(states, dist, *k),
            Witness::HaarTail {
                m, h, samples, hits, ..
            } => Ok((*hits as f64 / *samples as f64, haar_tail_probability(*m, *h))),
            Witness::TraceProductFidelity { rho, sigma } => fidelity::evaluate_trf(rho, sigma),
            Witness::FidelityMix { states, n, m } => fidelity::evaluate_mix(states, *n, *m),
            Witness::ProjectorEquality { a, b } => projector::evaluate_equality(a, b),
            Witness::ProjectorMaximality { a, b, projector } => projector::evaluate_maximality(a, b, projector),
            Witness::ProjectorAbsBound { a, b, projector } => projector::evaluate_abs_bound(a, b, projector),
        }
    }
}

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// Signed slack, nonnegative when the relation holds exactly.
    pub margin: f64,
    pub tolerance: f64,
    /// `margin ≥ -tolerance`.
    pub holds: bool,
    pub witness: Witness,
}

impl BoundCheck {
    pub fn from_witness(name: impl Into<String>, relation: Relation, tolerance: f64, witness: Witness) -> Result<Self> {
        let (lhs, rhs) = witness.evaluate()?;
        Ok(Self::new(name, lhs, rhs, relation, tolerance, witness))
    }

    pub fn new(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        relation: Relation,
        tolerance: f64,
        witness: Witness,
    ) -> Self {
        BoundCheck {
            name: name.into(),
            lhs,
            rhs,
            relation,
            margin: relation.margin(lhs, rhs),
            tolerance,
            holds: relation.holds(lhs, rhs, tolerance),
            witness,
        }
    }

    /// Re-evaluates the witness.
    pub fn recompute(&self) -> Result<BoundCheck> {
        let (lhs, rhs) = self.witness.evaluate()?;
        Ok(Self::new(
            self.name.clone(),
            lhs,
            rhs,
            self.relation,
            self.tolerance,
            self.witness.clone(),
        ))
    }
}

/// A family of checks with its aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub name: String,
    pub instances: u64,
    pub violations: u64,
    pub min_margin: f64,
    pub all_hold: bool,
    pub checks: Vec<BoundCheck>,
}

impl SweepSummary {
    pub fn from_checks(name: impl Into<String>, checks: Vec<BoundCheck>) -> Self {
        let violations = checks.iter().filter(|c| !c.holds).count() as u64;
        let min_margin = checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        SweepSummary {
            name: name.into(),
            instances: checks.len() as u64,
            violations,
            min_margin,
            all_hold: violations == 0,
            checks,
        }
    }
}

/// Plain-text table: name, lhs, relation, rhs, margin, pass.
pub fn table(checks: &[BoundCheck]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<width$}  {:>24}  {:>2}  {:>24}  {:>12}  pass\n",
        "name", "lhs", "", "rhs", "margin"
    );
    for c in checks {
        out.push_str(&format!(
            "{:<width$}  {:>24.16e}  {:>2}  {:>24.16e}  {:>12.3e}  {}\n",
            c.name,
            c.lhs,
            c.relation.symbol(),
            c.rhs,
            c.margin,
            if c.holds { "yes" } else { "NO" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{PureState, Rng};

    #[test]
    fn witness_round_trip_through_json() {
        let states = vec![PureState::basis(1, 0).unwrap(), PureState::basis(1, 1).unwrap()];
        let c = welch_check(&states, &[0.3, 0.7], 1).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: BoundCheck = serde_json::from_str(&text).unwrap();
        let again = back.recompute().unwrap();
        assert_eq!(again.lhs, c.lhs);
        assert_eq!(again.rhs, c.rhs);
        assert_eq!(again, c);
    }

    #[test]
    fn sweep_aggregates() {
        let s = trf_sweep(20, 1, &Rng::from_seed(3)).unwrap();
        assert_eq!(s.instances, 20);
        assert!(s.all_hold);
        assert!(table(&s.checks).lines().count() == 21);
    }
}
