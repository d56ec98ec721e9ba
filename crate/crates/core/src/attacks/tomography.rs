//! State tomography by Pauli-expectation estimation.
//!
//! Sampled mode measures every non-identity Pauli string
//! `N_P = ⌈(2 d⁴/δ²) ln(2d²/β)⌉` times and assembles
//! `M = (1/d) Σ_P μ_P P`. Each `|μ_P - Tr(ρP)| ≤ δ/d²` except with
//! probability `β/d²` (Hoeffding), which gives `||M - ρ||_tr ≤ δ` except with
//! probability `β`. Oracle mode returns the exact state plus an optional
//! Hermitian perturbation.

use crate::error::{Error, Result};
use crate::primitives::{Challenge, CopyMode};
use crate::qcore::linalg::{self, CMatrix, EPS};
use crate::qcore::{cap, random_hermitian, DensityMatrix, HermitianMatrix, Operator, PauliString, Projector, Rng};

/// Default ceiling on `N_P · d²`.
pub const DEFAULT_SHOT_CEILING: u128 = 1_000_000_000_000;

/// Output of a tomography run.
#[derive(Clone, Debug)]
pub struct TomographyEstimate {
    pub estimate: HermitianMatrix,
    pub delta_target: f64,
    /// Copies consumed (0 in oracle mode).
    pub copies_used: u128,
    pub mode: CopyMode,
    /// `||M - ρ||_tr` of the injected perturbation (oracle mode).
    pub perturbation_norm: f64,
}

/// Perturbation added to the exact state in oracle mode.
#[derive(Clone, Debug, Default)]
pub enum Perturbation {
    #[default]
    None,
    /// Random Hermitian direction rescaled to `||E||_tr = norm`.
    Random { norm: f64 },
    /// A caller-supplied `E`.
    Fixed(HermitianMatrix),
}

/// Something that can be measured with a two-outcome projective
/// measurement on fresh copies.
pub trait ShotSource {
    fn num_qubits(&self) -> usize;

    /// Number of `Π` outcomes over `shots` fresh copies.
    fn measure(&self, projector: &Projector, shots: u64, rng: &mut Rng) -> Result<u64>;
}

impl ShotSource for DensityMatrix {
    fn num_qubits(&self) -> usize {
        DensityMatrix::num_qubits(self)
    }

    fn measure(&self, projector: &Projector, shots: u64, rng: &mut Rng) -> Result<u64> {
        crate::qcore::measure_counts(self, projector, shots, rng)
    }
}

impl ShotSource for Challenge<'_> {
    fn num_qubits(&self) -> usize {
        self.scheme().output_qubits()
    }

    fn measure(&self, projector: &Projector, shots: u64, rng: &mut Rng) -> Result<u64> {
        self.measure_copies(projector, shots, rng)
    }
}

/// Where the tomography gets its information from.
pub enum TomographySource<'a> {
    Oracle {
        state: &'a DensityMatrix,
        perturbation: &'a Perturbation,
    },
    Sampled {
        source: &'a dyn ShotSource,
        shot_ceiling: u128,
    },
}

/// Runs tomography with target error `delta` and failure probability `beta`
/// (`beta` is ignored in oracle mode).
pub fn tomography(source: TomographySource<'_>, delta: f64, beta: f64, rng: &mut Rng) -> Result<TomographyEstimate> {
    match source {
        TomographySource::Oracle { state, perturbation } => tomography_oracle(state, delta, perturbation, rng),
        TomographySource::Sampled { source, shot_ceiling } => {
            tomography_sampled(source, delta, beta, shot_ceiling, rng)
        }
    }
}

/// `⌈(2 d⁴/δ²) ln(2d²/β)⌉`.
pub fn shots_per_pauli(d: usize, delta: f64, beta: f64) -> Result<u128> {
    if delta.is_nan() || delta <= 0.0 || !(0.0..1.0).contains(&beta) || beta == 0.0 {
        return Err(Error::InvalidParam(format!("delta {delta}, beta {beta}")));
    }
    let d = d as f64;
    let n = 2.0 * d.powi(4) * (2.0 * d * d / beta).ln() / (delta * delta);
    if !n.is_finite() || n >= u128::MAX as f64 {
        return Err(Error::BudgetOverflow {
            shots: u128::MAX,
            ceiling: u128::MAX,
        });
    }
    Ok(n.ceil() as u128)
}

/// `144 λ d⁴ / δ²`, the worst-case copy count of the reference procedure.
pub fn reference_copies_formula(lam: u64, d: usize, delta: f64) -> f64 {
    let numerator = 144u128 * lam as u128 * (d as u128).pow(4);
    numerator as f64 / delta / delta
}

fn pauli_plus_projector(p: &PauliString) -> Projector {
    let d = 1usize << p.num_qubits;
    let mut m = CMatrix::identity(d, d);
    p.accumulate_into(&mut m, 1.0);
    Projector::from_matrix_unchecked(m * linalg::c(0.5, 0.0))
}

pub fn tomography_sampled(
    source: &dyn ShotSource,
    delta: f64,
    beta: f64,
    shot_ceiling: u128,
    rng: &mut Rng,
) -> Result<TomographyEstimate> {
    let n = source.num_qubits();
    cap::check(n)?;
    let d = 1usize << n;
    let per = shots_per_pauli(d, delta, beta)?;
    let total = per.saturating_mul((d * d) as u128);
    if total > shot_ceiling || per > u64::MAX as u128 {
        return Err(Error::BudgetOverflow {
            shots: total,
            ceiling: shot_ceiling,
        });
    }
    let shots = per as u64;
    let mut m = CMatrix::identity(d, d);
    let mut used = 0u128;
    for p in PauliString::all(n).iter().filter(|p| !p.is_identity()) {
        let plus = source.measure(&pauli_plus_projector(p), shots, rng)?;
        used += shots as u128;
        let mu = 2.0 * plus as f64 / shots as f64 - 1.0;
        p.accumulate_into(&mut m, mu);
    }
    m *= linalg::c(1.0 / d as f64, 0.0);
    Ok(TomographyEstimate {
        estimate: HermitianMatrix::symmetrized(&m),
        delta_target: delta,
        copies_used: used,
        mode: CopyMode::Sampled,
        perturbation_norm: 0.0,
    })
}

pub fn tomography_oracle(
    rho: &DensityMatrix,
    delta: f64,
    perturbation: &Perturbation,
    rng: &mut Rng,
) -> Result<TomographyEstimate> {
    let e = match perturbation {
        Perturbation::None => None,
        Perturbation::Random { norm } => {
            if *norm > delta + EPS || *norm < 0.0 {
                return Err(Error::InvalidParam(format!(
                    "perturbation {norm} exceeds delta {delta}"
                )));
            }
            Some(scaled_to_norm(&random_hermitian(rho.dim(), rng), *norm))
        }
        Perturbation::Fixed(e) => {
            if e.dim() != rho.dim() {
                return Err(Error::DimensionMismatch {
                    left: e.dim(),
                    right: rho.dim(),
                });
            }
            if e.trace_norm_half() > delta + EPS {
                return Err(Error::InvalidParam(format!(
                    "perturbation {} exceeds delta {delta}",
                    e.trace_norm_half()
                )));
            }
            Some(e.clone())
        }
    };
    let base = HermitianMatrix::from_operator(rho);
    let (estimate, norm) = match e {
        None => (base, 0.0),
        Some(e) => {
            let norm = e.trace_norm_half();
            (base.add(&e)?, norm)
        }
    };
    Ok(TomographyEstimate {
        estimate,
        delta_target: delta,
        copies_used: 0,
        mode: CopyMode::Oracle,
        perturbation_norm: norm,
    })
}

/// Rescales `h` to half trace norm `norm`; the zero matrix stays zero.
pub fn scaled_to_norm(h: &HermitianMatrix, norm: f64) -> HermitianMatrix {
    let cur = h.trace_norm_half();
    if cur <= 0.0 {
        return h.clone();
    }
    h.scaled(norm / cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{random_density, trace_distance};

    #[test]
    fn oracle_without_perturbation_is_exact() {
        let rho = random_density(2, &mut Rng::from_seed(1)).unwrap();
        let est = tomography_oracle(&rho, 0.1, &Perturbation::None, &mut Rng::from_seed(2)).unwrap();
        assert_eq!(est.estimate.matrix(), rho.matrix());
        assert_eq!(est.copies_used, 0);
    }

    #[test]
    fn random_perturbation_has_exact_norm() {
        let rho = random_density(2, &mut Rng::from_seed(1)).unwrap();
        let est = tomography_oracle(&rho, 0.1, &Perturbation::Random { norm: 0.1 }, &mut Rng::from_seed(2)).unwrap();
        let err = trace_distance(&est.estimate, &rho).unwrap();
        assert!((err - 0.1).abs() < 1e-12);
        assert!(tomography_oracle(&rho, 0.1, &Perturbation::Random { norm: 0.2 }, &mut Rng::from_seed(2)).is_err());
    }

    #[test]
    fn budget_formula() {
        let n = shots_per_pauli(2, 0.1, 0.05).unwrap();
        // 3200 ln 160 = 16240.43...
        assert_eq!(n, 16241);
        assert_eq!(reference_copies_formula(16, 4, 0.1), 58_982_400.0);
    }

    #[test]
    fn sampled_mode_meets_target() {
        let rho = random_density(1, &mut Rng::from_seed(5)).unwrap();
        let mut rng = Rng::from_seed(6);
        let mut fails = 0;
        for _ in 0..50 {
            let est = tomography_sampled(&rho, 0.1, 0.05, DEFAULT_SHOT_CEILING, &mut rng).unwrap();
            if trace_distance(&est.estimate, &rho).unwrap() > 0.1 {
                fails += 1;
            }
            assert_eq!(est.copies_used, 3 * shots_per_pauli(2, 0.1, 0.05).unwrap());
        }
        assert_eq!(fails, 0);
    }

    #[test]
    fn sampled_mode_respects_ceiling() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let r = tomography_sampled(&rho, 0.01, 0.05, 1000, &mut Rng::from_seed(1));
        assert!(matches!(r, Err(Error::BudgetOverflow { .. })));
    }

    #[test]
    fn sampled_two_qubit_estimate_is_hermitian() {
        let rho = random_density(2, &mut Rng::from_seed(9)).unwrap();
        let est = tomography_sampled(&rho, 0.2, 0.05, DEFAULT_SHOT_CEILING, &mut Rng::from_seed(3)).unwrap();
        assert!(linalg::hermitian_deviation(est.estimate.matrix()) < 1e-12);
        assert!((est.estimate.trace() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&est.estimate, &rho).unwrap() <= 0.2);
    }
}
