//! Spectral-projector distinguisher for EFI pairs.
//!
//! With `δ = 1/(16p)`: estimate `M_0 ≈ ρ_0` and `M_1 ≈ ρ_1`, let `Π` be the
//! projector onto the nonnegative eigenspace of `M_0 - M_1`, and measure the
//! challenge with `{Π, I - Π}`. Outcome `Π` outputs 1, read as "ρ_0". When
//! both estimates are within `δ`, the advantage is at least
//! `||ρ_0 - ρ_1||_tr - 8δ`.

use serde::{Deserialize, Serialize};

use super::tomography::{scaled_to_norm, tomography_oracle, tomography_sampled, Perturbation};
use crate::error::{Error, Result};
use crate::primitives::{CopyMode, Distinguisher, EfiPair};
use crate::qcore::ops::ZERO_EIGENVALUE_TOL;
use crate::qcore::{
    linalg, measure, positive_part_projector, projector_trace, spectral_decompose, DensityMatrix, HermitianMatrix,
    Operator, Projector, Rng,
};

/// Perturbations of the two oracle estimates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPerturbation {
    #[default]
    None,
    /// Independent random directions of norm `δ` on each arm.
    Random,
    /// The worst-case pair from [`adversarial_pair_perturbation`].
    Adversarial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum EfiTomography {
    Oracle { perturbation: PairPerturbation },
    Sampled { beta: f64, shot_ceiling: u128 },
}

/// Whether estimates are rebuilt for every challenge or computed once.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateReuse {
    Fresh,
    #[default]
    Cached,
}

/// Static facts about a distinguisher instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfiAttackAnalysis {
    pub trace_distance: f64,
    pub p: f64,
    /// `1/(16p)`.
    pub delta: f64,
    /// `TD ≥ 1/p`.
    pub precondition_holds: bool,
    /// `TD - 8δ`.
    pub guaranteed_advantage: f64,
    /// `Tr(Π(ρ_0 - ρ_1))` for the cached projector, if any.
    pub cached_advantage: Option<f64>,
    pub tomography: EfiTomography,
    pub reuse: EstimateReuse,
}

pub struct EfiDistinguisher {
    pair: EfiPair,
    delta: f64,
    tomography: EfiTomography,
    reuse: EstimateReuse,
    adversarial: Option<(HermitianMatrix, HermitianMatrix)>,
    cached: Option<Projector>,
    analysis: EfiAttackAnalysis,
}

/// Builds the distinguisher. `p` stands in for the polynomial with
/// `TD ≥ 1/p`; a violated precondition is recorded, not rejected.
pub fn efi_distinguisher(
    pair: &EfiPair,
    p: f64,
    tomography: EfiTomography,
    reuse: EstimateReuse,
    rng: &Rng,
) -> Result<EfiDistinguisher> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidParam(format!("p = {p}")));
    }
    let delta = 1.0 / (16.0 * p);
    let td = pair.trace_distance();
    let adversarial = match tomography {
        EfiTomography::Oracle {
            perturbation: PairPerturbation::Adversarial,
        } => Some(adversarial_pair_perturbation(
            pair.state(false),
            pair.state(true),
            delta,
        )?),
        _ => None,
    };
    let mut dist = EfiDistinguisher {
        pair: pair.clone(),
        delta,
        tomography,
        reuse,
        adversarial,
        cached: None,
        analysis: EfiAttackAnalysis {
            trace_distance: td,
            p,
            delta,
            precondition_holds: td >= 1.0 / p - linalg::EPS,
            guaranteed_advantage: td - 8.0 * delta,
            cached_advantage: None,
            tomography,
            reuse,
        },
    };
    if reuse == EstimateReuse::Cached {
        let proj = dist.build_projector(&mut rng.child("estimates"))?;
        let h = HermitianMatrix::difference(pair.state(false), pair.state(true))?;
        dist.analysis.cached_advantage = Some(projector_trace(&proj, &h)?);
        dist.cached = Some(proj);
    }
    Ok(dist)
}

impl EfiDistinguisher {
    pub fn analysis(&self) -> &EfiAttackAnalysis {
        &self.analysis
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn estimate(&self, b: bool, rng: &mut Rng) -> Result<HermitianMatrix> {
        let rho = self.pair.state(b);
        let est = match self.tomography {
            EfiTomography::Oracle { perturbation } => {
                let p = match perturbation {
                    PairPerturbation::None => Perturbation::None,
                    PairPerturbation::Random => Perturbation::Random { norm: self.delta },
                    PairPerturbation::Adversarial => {
                        let (e0, e1) = self.adversarial.as_ref().expect("built with the distinguisher");
                        Perturbation::Fixed(if b { e1.clone() } else { e0.clone() })
                    }
                };
                tomography_oracle(rho, self.delta, &p, rng)?
            }
            EfiTomography::Sampled { beta, shot_ceiling } => {
                tomography_sampled(rho, self.delta, beta, shot_ceiling, rng)?
            }
        };
        Ok(est.estimate)
    }

    /// `Π = positive part of M_0 - M_1` from fresh estimates.
    pub fn build_projector(&self, rng: &mut Rng) -> Result<Projector> {
        let m0 = self.estimate(false, rng)?;
        let m1 = self.estimate(true, rng)?;
        Ok(positive_part_projector(&HermitianMatrix::difference(&m0, &m1)?))
    }
}

impl Distinguisher for EfiDistinguisher {
    fn name(&self) -> String {
        let t = match self.tomography {
            EfiTomography::Oracle { perturbation } => format!("oracle-{perturbation:?}").to_lowercase(),
            EfiTomography::Sampled { .. } => "sampled".into(),
        };
        format!("spectral/{t}/{:?}", self.reuse).to_lowercase()
    }

    fn distinguish(&self, challenge: &DensityMatrix, rng: &mut Rng) -> Result<bool> {
        match &self.cached {
            Some(p) => measure(challenge, p, rng),
            None => {
                let p = self.build_projector(rng)?;
                measure(challenge, &p, rng)
            }
        }
    }

    fn mode(&self) -> CopyMode {
        match self.tomography {
            EfiTomography::Oracle { .. } => CopyMode::Oracle,
            EfiTomography::Sampled { .. } => CopyMode::Sampled,
        }
    }
}

/// Projector onto the nonnegative eigenspace of `ρ_0 - ρ_1`.
pub fn helstrom_projector(pair: &EfiPair) -> Result<Projector> {
    Ok(positive_part_projector(&HermitianMatrix::difference(
        pair.state(false),
        pair.state(true),
    )?))
}

/// Perturbations `E_0 = -E_1` of norm exactly `delta` that pull the
/// cheapest negative eigendirections of `ρ_0 - ρ_1` up to zero, so the
/// estimated projector absorbs them. Each flipped eigenvalue `μ < 0` costs
/// `|μ|/4` of each arm's budget and removes `|μ|` from `Tr(Π(ρ_0 - ρ_1))`.
/// Leftover budget goes on the largest eigendirection, which stays in `Π`.
pub fn adversarial_pair_perturbation(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    delta: f64,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidParam(format!("delta {delta}")));
    }
    let h = HermitianMatrix::difference(rho0, rho1)?;
    let pairs = spectral_decompose(&h);
    let d = h.dim();
    let mut e = linalg::CMatrix::zeros(d, d);
    let mut remaining = delta;
    let mut negatives: Vec<_> = pairs.iter().filter(|p| p.value < -ZERO_EIGENVALUE_TOL).collect();
    negatives.sort_by(|a, b| b.value.total_cmp(&a.value));
    for p in negatives {
        let cost = p.value.abs() / 4.0;
        if cost > remaining + 1e-15 {
            break;
        }
        remaining = (remaining - cost).max(0.0);
        e += linalg::outer(&p.vector, &p.vector) * linalg::c(p.value.abs() / 2.0, 0.0);
    }
    if remaining > 0.0 {
        let top = &pairs[0].vector;
        e += linalg::outer(top, top) * linalg::c(2.0 * remaining, 0.0);
    }
    let e0 = HermitianMatrix::symmetrized(&e);
    // pin the norm exactly to delta against rounding
    let e0 = scaled_to_norm(&e0, delta);
    let e1 = e0.scaled(-1.0);
    Ok((e0, e1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::run_efi_game;
    use crate::qcore::{random_density, trace_distance, PureState};

    fn toy_pair(n: usize) -> EfiPair {
        // uniform over 2^n of 4^n basis states versus the maximally mixed state
        let d = 1usize << (2 * n);
        let mut probs = vec![0.0; d];
        for x in 0..(1usize << n) {
            probs[(x * 2654435761) % d] += 1.0;
        }
        let k = probs.iter().filter(|&&p| p > 0.0).count() as f64;
        probs.iter_mut().for_each(|p| *p /= k);
        EfiPair::new(
            "toy",
            DensityMatrix::diagonal(&probs).unwrap(),
            DensityMatrix::maximally_mixed(2 * n).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn orthogonal_pair_exact_estimates() {
        let pair = EfiPair::new(
            "orth",
            DensityMatrix::diagonal(&[1.0, 0.0]).unwrap(),
            DensityMatrix::diagonal(&[0.0, 1.0]).unwrap(),
        )
        .unwrap();
        let t = EfiTomography::Oracle {
            perturbation: PairPerturbation::None,
        };
        let d = efi_distinguisher(&pair, 1.0, t, EstimateReuse::Fresh, &Rng::from_seed(1)).unwrap();
        let r = run_efi_game(&pair, &d, 300, &Rng::from_seed(2)).unwrap();
        assert_eq!(r.estimate, 1.0);
    }

    #[test]
    fn adversarial_perturbation_norm_and_loss() {
        let pair = toy_pair(3);
        let td = pair.trace_distance();
        let delta = td / 16.0;
        let (e0, e1) = adversarial_pair_perturbation(pair.state(false), pair.state(true), delta).unwrap();
        assert!((e0.trace_norm_half() - delta).abs() < 1e-12);
        assert!((e1.trace_norm_half() - delta).abs() < 1e-12);
        let t = EfiTomography::Oracle {
            perturbation: PairPerturbation::Adversarial,
        };
        let d = efi_distinguisher(&pair, 1.0 / td, t, EstimateReuse::Cached, &Rng::from_seed(1)).unwrap();
        let adv = d.analysis().cached_advantage.unwrap();
        assert!(adv >= td - 8.0 * delta - 1e-9);
        assert!(adv < td - 1e-3);
        assert!(d.analysis().precondition_holds);
    }

    #[test]
    fn random_perturbations_respect_the_guarantee() {
        let mut rng = Rng::from_seed(3);
        for _ in 0..30 {
            let pair = EfiPair::new(
                "r",
                random_density(2, &mut rng).unwrap(),
                random_density(2, &mut rng).unwrap(),
            )
            .unwrap();
            let td = pair.trace_distance();
            for pert in [PairPerturbation::Random, PairPerturbation::Adversarial] {
                let t = EfiTomography::Oracle { perturbation: pert };
                let d = efi_distinguisher(&pair, 1.0 / td, t, EstimateReuse::Cached, &rng.child("d")).unwrap();
                assert!(d.analysis().cached_advantage.unwrap() >= td - 8.0 * d.delta() - 1e-9);
            }
        }
    }

    #[test]
    fn identical_pair_has_no_advantage() {
        let rho = PureState::basis(1, 0).unwrap().density();
        let pair = EfiPair::new("same", rho.clone(), rho).unwrap();
        let t = EfiTomography::Oracle {
            perturbation: PairPerturbation::None,
        };
        let d = efi_distinguisher(&pair, 4.0, t, EstimateReuse::Cached, &Rng::from_seed(1)).unwrap();
        assert!(!d.analysis().precondition_holds);
        let r = run_efi_game(&pair, &d, 200, &Rng::from_seed(2)).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn sampled_tomography_on_a_qubit_pair() {
        let pair = EfiPair::new(
            "qubit",
            DensityMatrix::diagonal(&[0.9, 0.1]).unwrap(),
            DensityMatrix::diagonal(&[0.2, 0.8]).unwrap(),
        )
        .unwrap();
        let td = pair.trace_distance();
        let t = EfiTomography::Sampled {
            beta: 0.01,
            shot_ceiling: u128::MAX,
        };
        let d = efi_distinguisher(&pair, 1.0 / td, t, EstimateReuse::Fresh, &Rng::from_seed(1)).unwrap();
        let r = run_efi_game(&pair, &d, 500, &Rng::from_seed(4)).unwrap();
        assert!(r.estimate >= td - 8.0 * d.delta() - 3.0 * r.sigma());
        let h = helstrom_projector(&pair).unwrap();
        assert!(
            (trace_distance(pair.state(false), pair.state(true)).unwrap()
                - projector_trace(
                    &h,
                    &HermitianMatrix::difference(pair.state(false), pair.state(true)).unwrap()
                )
                .unwrap())
            .abs()
                < 1e-12
        );
    }
}
