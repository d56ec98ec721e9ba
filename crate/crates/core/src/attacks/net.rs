//! Explicit γ-nets of mixed states.
//!
//! A state is written in Pauli coordinates `ρ = (I + Σ_P r_P P)/d` with
//! `|r_P| ≤ 1` and `D = d² - 1` coordinates. The construction grids the cube
//! `[-1, 1]^D` with step `s = 3γ/√D`, projects each grid point onto the
//! density matrices (Frobenius-nearest, via the eigenvalue simplex), and
//! keeps one representative per cell of side `γ/(2√D)`.
//!
//! Since `||A||_tr ≤ ½ |r_A|` for traceless `A`, the grid step contributes at
//! most `s√D/4 = 3γ/4` (the projection is a Frobenius contraction onto a
//! convex set containing `ρ`) and deduplication at most `γ/4`, so every state
//! is within `γ` of the net. The net has at most `(2⌈1/s⌉ + 1)^D ≤
//! (C_impl/γ)^{d²}` elements with `C_impl = 2√D/3 + 3`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::{random_density, DensityMatrix, Operator, PauliString, Rng};

/// Default ceiling on the number of grid points visited.
pub const DEFAULT_NET_CEILING: u128 = 2_000_000;

/// Grid parameters recorded with a net.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetGrid {
    /// Number of Pauli coordinates `d² - 1`.
    pub coordinates: usize,
    pub step: f64,
    pub dedupe_cell: f64,
    pub points_per_axis: u64,
    pub grid_points: u128,
    /// `C_impl` in `|Net| ≤ (C_impl/γ)^{d²}`.
    pub c_impl: f64,
    /// `γ ≥ 1`: the single element `I/d`.
    pub vacuous: bool,
}

#[derive(Clone, Debug)]
pub struct EpsNet {
    gamma: f64,
    dim: usize,
    elements: Vec<DensityMatrix>,
    grid: NetGrid,
}

/// Empirical covering audit over random mixed states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringAudit {
    pub samples: u64,
    pub covered: u64,
    pub rate: f64,
    /// Largest nearest-element distance observed.
    pub worst_distance: f64,
}

/// Builds the net for dimension `d` (a power of two) and radius `gamma`.
/// Fails with `NetTooLarge` if the grid has more than `ceiling` points.
pub fn build_net(d: usize, gamma: f64, ceiling: u128) -> Result<EpsNet> {
    let n = linalg::log2_exact(d)
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidParam(format!("net dimension {d} is not a power of two ≥ 2")))?;
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidParam(format!("net radius {gamma}")));
    }
    let coords = d * d - 1;
    let sqrt_d = (coords as f64).sqrt();
    let c_impl = 2.0 * sqrt_d / 3.0 + 3.0;
    if gamma >= 1.0 {
        return Ok(EpsNet {
            gamma,
            dim: d,
            elements: vec![DensityMatrix::maximally_mixed(n)?],
            grid: NetGrid {
                coordinates: coords,
                step: f64::INFINITY,
                dedupe_cell: f64::INFINITY,
                points_per_axis: 1,
                grid_points: 1,
                c_impl,
                vacuous: true,
            },
        });
    }
    let step = 3.0 * gamma / sqrt_d;
    let cell = gamma / (2.0 * sqrt_d);
    let half = (1.0 / step).ceil() as i64;
    let per_axis = (2 * half + 1) as u64;
    let grid_points = (per_axis as u128).checked_pow(coords as u32).unwrap_or(u128::MAX);
    if grid_points > ceiling {
        return Err(Error::NetTooLarge {
            size: grid_points,
            ceiling,
        });
    }
    let paulis: Vec<PauliString> = PauliString::all(n).into_iter().filter(|p| !p.is_identity()).collect();
    let mut seen = HashSet::new();
    let mut elements = Vec::new();
    let mut idx = vec![-half; coords];
    loop {
        let mut m = CMatrix::identity(d, d);
        for (p, &k) in paulis.iter().zip(&idx) {
            if k != 0 {
                p.accumulate_into(&mut m, k as f64 * step);
            }
        }
        m *= linalg::c(1.0 / d as f64, 0.0);
        let rho = project_to_states(&m);
        let key: Vec<i64> = pauli_coordinates(rho.matrix(), &paulis)
            .iter()
            .map(|r| (r / cell).floor() as i64)
            .collect();
        if seen.insert(key) {
            elements.push(rho);
        }
        // odometer, last coordinate fastest
        let mut j = coords;
        loop {
            if j == 0 {
                return Ok(EpsNet {
                    gamma,
                    dim: d,
                    elements,
                    grid: NetGrid {
                        coordinates: coords,
                        step,
                        dedupe_cell: cell,
                        points_per_axis: per_axis,
                        grid_points,
                        c_impl,
                        vacuous: false,
                    },
                });
            }
            j -= 1;
            if idx[j] < half {
                idx[j] += 1;
                break;
            }
            idx[j] = -half;
        }
    }
}

/// `Tr(ρ P)` for each listed Pauli string.
pub fn pauli_coordinates(m: &CMatrix, paulis: &[PauliString]) -> Vec<f64> {
    paulis.iter().map(|p| p.trace_with(m).re).collect()
}

/// Frobenius-nearest density matrix to a trace-one Hermitian matrix:
/// eigenvalues are projected onto the probability simplex.
pub fn project_to_states(m: &CMatrix) -> DensityMatrix {
    let (vals, vecs) = linalg::eigh(m);
    let w = simplex_projection(&vals);
    let d = vals.len();
    let mut out = CMatrix::zeros(d, d);
    for (i, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            let v = vecs.column(i).into_owned();
            out += linalg::outer(&v, &v) * linalg::c(wi, 0.0);
        }
    }
    DensityMatrix::from_matrix_unchecked(linalg::symmetrize(&out))
}

/// Euclidean projection of a descending vector onto the simplex.
fn simplex_projection(desc: &[f64]) -> Vec<f64> {
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in desc.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    desc.iter().map(|&u| (u - theta).max(0.0)).collect()
}

fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

impl EpsNet {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[DensityMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn grid(&self) -> &NetGrid {
        &self.grid
    }

    /// `log₂ (C_impl/γ)^{d²}`; the bound itself overflows quickly.
    pub fn log2_size_bound(&self) -> f64 {
        (self.dim * self.dim) as f64 * (self.grid.c_impl / self.gamma.min(1.0)).log2()
    }

    /// Indices (ascending) of elements within trace distance `radius` of `m`.
    pub fn within<O: Operator + ?Sized>(&self, m: &O, radius: f64) -> Vec<usize> {
        let target = m.matrix();
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                // ||A||_tr ≥ ½ ||A||_F
                0.5 * frobenius_distance(e.matrix(), target) <= radius
                    && linalg::half_trace_norm(&(e.matrix() - target)) <= radius
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// First index `i` in `candidates` with `||element_i - m||_tr ≤ radius`.
    pub fn first_within<O: Operator + ?Sized>(&self, m: &O, candidates: &[usize], radius: f64) -> Option<usize> {
        let target = m.matrix();
        candidates.iter().copied().find(|&i| {
            let e = self.elements[i].matrix();
            0.5 * frobenius_distance(e, target) <= radius && linalg::half_trace_norm(&(e - target)) <= radius
        })
    }

    /// Nearest element and its trace distance.
    pub fn nearest<O: Operator + ?Sized>(&self, m: &O) -> (usize, f64) {
        let target = m.matrix();
        let mut order: Vec<(usize, f64)> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| (i, 0.5 * frobenius_distance(e.matrix(), target)))
            .collect();
        order.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, lb) in order {
            if lb > best.1 {
                break;
            }
            let td = linalg::half_trace_norm(&(self.elements[i].matrix() - target));
            if td < best.1 || (td == best.1 && i < best.0) {
                best = (i, td);
            }
        }
        best
    }

    /// Nearest-element distances for `samples` random mixed states.
    pub fn covering_audit(&self, samples: u64, rng: &Rng) -> Result<CoveringAudit> {
        let n = linalg::log2_exact(self.dim).unwrap_or(0);
        let mut covered = 0;
        let mut worst = 0.0f64;
        for i in 0..samples {
            let rho = random_density(n, &mut rng.child_indexed("sample", i))?;
            let (_, dist) = self.nearest(&rho);
            if dist <= self.gamma {
                covered += 1;
            }
            worst = worst.max(dist);
        }
        Ok(CoveringAudit {
            samples,
            covered,
            rate: covered as f64 / samples.max(1) as f64,
            worst_distance: worst,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_sample, trace_distance};

    #[test]
    fn vacuous_radius_gives_maximally_mixed() {
        let net = build_net(4, 2.0, DEFAULT_NET_CEILING).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.grid().vacuous);
        let rho = random_density(2, &mut Rng::from_seed(1)).unwrap();
        assert!(trace_distance(&rho, &net.elements()[0]).unwrap() <= 2.0);
    }

    #[test]
    fn qubit_net_covers() {
        let net = build_net(2, 0.5, DEFAULT_NET_CEILING).unwrap();
        for e in net.elements() {
            e.validate().unwrap();
        }
        assert!((net.len() as f64).log2() <= net.log2_size_bound());
        let audit = net.covering_audit(1000, &Rng::from_seed(7)).unwrap();
        assert!(audit.rate >= 0.995);
        assert!(audit.worst_distance <= 0.5);
    }

    #[test]
    fn fine_qubit_net_covers_pure_states() {
        let gamma = 0.2 / 6.0;
        let net = build_net(2, gamma, DEFAULT_NET_CEILING).unwrap();
        let mut rng = Rng::from_seed(3);
        for _ in 0..50 {
            let psi = haar_sample(1, &mut rng).unwrap().density();
            assert!(net.nearest(&psi).1 <= gamma);
        }
    }

    #[test]
    fn two_qubit_net_is_too_large_at_small_radius() {
        assert!(matches!(
            build_net(4, 0.3, DEFAULT_NET_CEILING),
            Err(Error::NetTooLarge { .. })
        ));
        assert!(build_net(3, 0.5, DEFAULT_NET_CEILING).is_err());
    }

    #[test]
    fn simplex_projection_cases() {
        assert_eq!(simplex_projection(&[0.7, 0.3]), vec![0.7, 0.3]);
        assert_eq!(simplex_projection(&[1.5, -0.5]), vec![1.0, 0.0]);
        let w = simplex_projection(&[0.8, 0.6, -0.4]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((w[0] - 0.6).abs() < 1e-12 && (w[1] - 0.4).abs() < 1e-12 && w[2] == 0.0);
    }

    #[test]
    fn within_is_ascending_and_exact() {
        let net = build_net(2, 0.5, DEFAULT_NET_CEILING).unwrap();
        let rho = random_density(1, &mut Rng::from_seed(2)).unwrap();
        let near = net.within(&rho, 0.5);
        assert!(!near.is_empty());
        assert!(near.windows(2).all(|w| w[0] < w[1]));
        for &i in &near {
            assert!(trace_distance(&net.elements()[i], &rho).unwrap() <= 0.5);
        }
        assert_eq!(net.first_within(&rho, &near, 0.5), Some(near[0]));
    }
}
