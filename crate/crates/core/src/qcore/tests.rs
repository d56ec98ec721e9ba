use super::linalg::{c, max_abs_diff, CMatrix, CVector, ONE, ZERO};
use super::*;

fn ket(bits: &[f64]) -> PureState {
    PureState::normalized(CVector::from_iterator(bits.len(), bits.iter().map(|&x| c(x, 0.0)))).unwrap()
}

fn plus() -> PureState {
    ket(&[1.0, 1.0])
}

fn diag(vals: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(vals.len(), vals.iter().map(|&x| c(x, 0.0))))
}

#[test]
fn tensor_of_basis_states() {
    let zero = PureState::basis(1, 0).unwrap();
    let one = PureState::basis(1, 1).unwrap();
    let t = zero.tensor(&one).unwrap();
    assert_eq!(t.num_qubits(), 2);
    assert_eq!(t.amplitudes()[1], ONE);
    assert_eq!(t.amplitudes().iter().filter(|z| **z != ZERO).count(), 1);
}

#[test]
fn tensor_with_maximally_mixed_keeps_unit_trace() {
    let mut rng = Rng::from_seed(3);
    let rho = random_density(2, &mut rng).unwrap();
    let t = rho.tensor(&DensityMatrix::maximally_mixed(1).unwrap()).unwrap();
    assert!((linalg::trace(t.matrix()).re - 1.0).abs() < 1e-12);
}

#[test]
fn tensor_of_plus_projectors_is_uniform_quarter() {
    let p = plus().density();
    let t = p.tensor(&p).unwrap();
    for z in t.matrix().iter() {
        assert!((z - c(0.25, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn tensor_respects_cap() {
    let cap = cap::max_qubits();
    let a = PureState::basis(cap, 0).unwrap();
    let b = PureState::basis(1, 0).unwrap();
    assert!(matches!(a.tensor(&b), Err(crate::Error::CapExceeded { .. })));
}

#[test]
fn partial_trace_examples() {
    let s01 = PureState::basis(2, 1).unwrap().density();
    let r = partial_trace(&s01, &[0]).unwrap();
    assert!(max_abs_diff(r.matrix(), &diag(&[1.0, 0.0])) < 1e-15);

    let bell = ket(&[1.0, 0.0, 0.0, 1.0]).density();
    let r = partial_trace(&bell, &[0]).unwrap();
    assert!(max_abs_diff(r.matrix(), &diag(&[0.5, 0.5])) < 1e-15);

    let r = partial_trace(&bell, &[1, 0]).unwrap();
    assert_eq!(&r, &bell);

    assert!(matches!(
        partial_trace(&bell, &[2]),
        Err(crate::Error::IndexOutOfRange { index: 2, .. })
    ));
}

#[test]
fn partial_trace_agrees_with_amplitude_route() {
    let mut rng = Rng::from_seed(11);
    for _ in 0..20 {
        let psi = haar_sample(4, &mut rng).unwrap();
        for keep in [vec![0], vec![1, 3], vec![0, 2, 3], vec![2]] {
            let a = partial_trace(&psi.density(), &keep).unwrap();
            let b = psi.reduced(&keep).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
        }
    }
}

#[test]
fn partial_trace_recovers_product_factors() {
    let mut rng = Rng::from_seed(12);
    for _ in 0..20 {
        let a = random_density(1, &mut rng).unwrap();
        let b = random_density(2, &mut rng).unwrap();
        let ab = a.tensor(&b).unwrap();
        let ra = partial_trace(&ab, &[0]).unwrap();
        let rb = partial_trace(&ab, &[1, 2]).unwrap();
        assert!(max_abs_diff(ra.matrix(), a.matrix()) < 1e-12);
        assert!(max_abs_diff(rb.matrix(), b.matrix()) < 1e-12);
    }
}

#[test]
fn trace_distance_examples() {
    let zero = PureState::basis(1, 0).unwrap().density();
    let one = PureState::basis(1, 1).unwrap().density();
    assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
    assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    let td = trace_distance(&zero, &plus().density()).unwrap();
    assert!((td - 0.5f64.sqrt()).abs() < 1e-12);
    let big = DensityMatrix::maximally_mixed(2).unwrap();
    assert!(matches!(
        trace_distance(&zero, &big),
        Err(crate::Error::DimensionMismatch { .. })
    ));
}

#[test]
fn fidelity_examples() {
    let mut rng = Rng::from_seed(4);
    let rho = random_density(2, &mut rng).unwrap();
    assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
    for m in 1..=3 {
        let zero = PureState::basis(m, 0).unwrap().density();
        let mixed = DensityMatrix::maximally_mixed(m).unwrap();
        let f = fidelity(&zero, &mixed).unwrap();
        assert!((f - 0.5f64.powi(m as i32)).abs() < 1e-12);
    }
}

// Independent oracle for qubits: F = Tr(ρσ) + 2 sqrt(det ρ det σ).
fn qubit_fidelity_oracle(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let det = |m: &CMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let tr: f64 = (a.matrix() * b.matrix()).trace().re;
    tr + 2.0 * (det(a.matrix()).max(0.0) * det(b.matrix()).max(0.0)).sqrt()
}

#[test]
fn fidelity_matches_closed_form_for_qubits() {
    let mut rng = Rng::from_seed(21);
    for _ in 0..200 {
        let a = random_density(1, &mut rng).unwrap();
        let b = random_density(1, &mut rng).unwrap();
        let f = fidelity(&a, &b).unwrap();
        assert!((f - qubit_fidelity_oracle(&a, &b)).abs() < 1e-9);
    }
}

#[test]
fn distance_measure_invariants_on_random_pairs() {
    let mut rng = Rng::from_seed(1000);
    for i in 0..1000 {
        let m = 1 + i % 2;
        let a = random_density(m, &mut rng).unwrap();
        let b = random_density(m, &mut rng).unwrap();
        let td_ab = trace_distance(&a, &b).unwrap();
        let td_ba = trace_distance(&b, &a).unwrap();
        let f_ab = fidelity(&a, &b).unwrap();
        let f_ba = fidelity(&b, &a).unwrap();
        assert!((-1e-12..=1.0 + 1e-12).contains(&td_ab));
        assert!((0.0..=1.0).contains(&f_ab));
        assert!((td_ab - td_ba).abs() < 1e-9);
        assert!((f_ab - f_ba).abs() < 1e-9, "{f_ab} {f_ba}");
        let tr: f64 = linalg::trace_product(a.matrix(), b.matrix()).re;
        assert!(tr <= f_ab + 1e-9);
    }
}

#[test]
fn pure_state_trace_distance_law() {
    let mut rng = Rng::from_seed(77);
    for _ in 0..300 {
        let psi = haar_sample(2, &mut rng).unwrap();
        let phi = haar_sample(2, &mut rng).unwrap();
        let td = trace_distance(&psi.density(), &phi.density()).unwrap();
        let ov = psi.overlap_sq(&phi).unwrap();
        assert!((td * td + ov - 1.0).abs() < 1e-8);
    }
}

#[test]
fn spectral_examples() {
    let h = HermitianMatrix::new(diag(&[3.0, -1.0])).unwrap();
    let pairs = spectral_decompose(&h);
    assert!((pairs[0].value - 3.0).abs() < 1e-12);
    assert!((pairs[0].vector[0] - ONE).norm() < 1e-12);
    assert!((pairs[1].value + 1.0).abs() < 1e-12);
    assert!((pairs[1].vector[1] - ONE).norm() < 1e-12);

    let x = HermitianMatrix::new(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])).unwrap();
    let pairs = spectral_decompose(&x);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((pairs[0].value - 1.0).abs() < 1e-12);
    assert!((pairs[0].vector[0] - c(s, 0.0)).norm() < 1e-12);
    assert!((pairs[0].vector[1] - c(s, 0.0)).norm() < 1e-12);
    assert!((pairs[1].value + 1.0).abs() < 1e-12);
    assert!((pairs[1].vector[0] - c(s, 0.0)).norm() < 1e-12);
    assert!((pairs[1].vector[1] - c(-s, 0.0)).norm() < 1e-12);
}

#[test]
fn spectral_reconstruction_of_random_hermitian() {
    let mut rng = Rng::from_seed(5);
    for dim in [2usize, 3, 8, 16] {
        let h = random_hermitian(dim, &mut rng);
        let pairs = spectral_decompose(&h);
        let mut rebuilt = CMatrix::zeros(dim, dim);
        for p in &pairs {
            rebuilt += linalg::outer(&p.vector, &p.vector) * c(p.value, 0.0);
        }
        assert!(max_abs_diff(&rebuilt, h.matrix()) < 1e-7);
        for w in pairs.windows(2) {
            assert!(w[0].value >= w[1].value);
        }
        for (i, p) in pairs.iter().enumerate() {
            for (j, q) in pairs.iter().enumerate() {
                let ip = p.vector.dotc(&q.vector);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.0)).norm() < 1e-7);
            }
        }
    }
}

#[test]
fn spectral_rejects_non_hermitian() {
    let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    assert!(matches!(
        ops::spectral_decompose_matrix(&m),
        Err(crate::Error::NotHermitian { .. })
    ));
}

#[test]
fn positive_part_examples() {
    let h = HermitianMatrix::new(diag(&[1.0, -1.0])).unwrap();
    let p = positive_part_projector(&h);
    assert!(max_abs_diff(p.matrix(), &diag(&[1.0, 0.0])) < 1e-12);

    let z = HermitianMatrix::zeros(4);
    let p = positive_part_projector(&z);
    assert!(max_abs_diff(p.matrix(), &CMatrix::identity(4, 4)) < 1e-12);
}

#[test]
fn positive_part_attains_the_projection_maximum() {
    let mut rng = Rng::from_seed(31);
    for _ in 0..100 {
        let a = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let h = HermitianMatrix::difference(&a, &b).unwrap();
        let p = positive_part_projector(&h);
        Projector::new(p.matrix().clone()).unwrap();
        let lhs = projector_trace(&p, &h).unwrap();
        let rhs = h.trace_norm_half() + h.trace() / 2.0;
        assert!((lhs - rhs).abs() < 1e-7);
        // any other projector does no better
        let q = positive_part_projector(&random_hermitian(4, &mut rng));
        assert!(projector_trace(&q, &h).unwrap() <= lhs + 1e-9);
        assert!(projector_trace(&q, &h).unwrap().abs() <= 2.0 * h.trace_norm_half() + 1e-9);
    }
}

#[test]
fn swap_test_examples() {
    let zero = PureState::basis(1, 0).unwrap().density();
    let one = PureState::basis(1, 1).unwrap().density();
    let mixed = DensityMatrix::maximally_mixed(1).unwrap();
    assert!((swap_test_accept_prob(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
    assert!((swap_test_accept_prob(&zero, &one).unwrap() - 0.5).abs() < 1e-15);
    assert!((swap_test_accept_prob(&mixed, &mixed).unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn haar_moment_matches_analytic_value() {
    let mut rng = Rng::from_seed(2024);
    let n = 100_000;
    let zero = PureState::basis(2, 0).unwrap();
    let xs: Vec<f64> = (0..n)
        .map(|_| haar_sample(2, &mut rng).unwrap().overlap_sq(&zero).unwrap())
        .collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    // |<psi|0>|^2 ~ Beta(1, 3): variance 3 / (16 * 5)
    let sigma = (3.0f64 / 80.0 / n as f64).sqrt();
    assert!((mean - 0.25).abs() <= 3.0 * sigma, "{mean}");
}

#[test]
fn haar_tail_for_single_qubit() {
    let mut rng = Rng::from_seed(2025);
    let n = 100_000;
    let zero = PureState::basis(1, 0).unwrap();
    let hits = (0..n)
        .filter(|_| haar_sample(1, &mut rng).unwrap().overlap_sq(&zero).unwrap() >= 0.5)
        .count();
    let p = hits as f64 / n as f64;
    let sigma = (0.25f64 / n as f64).sqrt();
    assert!((p - 0.5).abs() <= 3.0 * sigma, "{p}");
}

#[test]
fn measurement_examples() {
    let mut rng = Rng::from_seed(8);
    let rho = plus().density();
    for _ in 0..100 {
        assert!(measure(&rho, &Projector::identity(2), &mut rng).unwrap());
        assert!(!measure(&rho, &Projector::zero(2), &mut rng).unwrap());
    }
    let proj = Projector::onto(&PureState::basis(1, 0).unwrap());
    let n = 10_000;
    let ones = (0..n).filter(|_| measure(&rho, &proj, &mut rng).unwrap()).count();
    let p = ones as f64 / n as f64;
    assert!((p - 0.5).abs() <= 3.0 * (0.25f64 / n as f64).sqrt());
    assert!(matches!(
        measure(&rho, &Projector::identity(4), &mut rng),
        Err(crate::Error::DimensionMismatch { .. })
    ));
}

#[test]
fn identical_seeds_give_identical_transcripts() {
    let rho = plus().density();
    let proj = Projector::onto(&PureState::basis(1, 0).unwrap());
    let run = |seed| {
        let mut rng = Rng::from_seed(seed);
        (0..256)
            .map(|_| measure(&rho, &proj, &mut rng).unwrap())
            .collect::<Vec<_>>()
    };
    assert_eq!(run(99), run(99));
    assert_ne!(run(99), run(100));
}

#[test]
fn density_validation_rejects_bad_matrices() {
    assert!(DensityMatrix::new(diag(&[0.5, 0.6])).is_err());
    assert!(DensityMatrix::new(diag(&[1.5, -0.5])).is_err());
    assert!(matches!(
        DensityMatrix::new(CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), ONE, ZERO, c(0.5, 0.0)])),
        Err(crate::Error::NotHermitian { .. })
    ));
    assert!(PureState::from_slice(&[ONE, ONE]).is_err());
}

mod props {
    use super::*;
    use crate::qcore::Rng;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn tensor_then_trace_out_is_identity(seed in any::<u64>(), m in 1usize..3) {
            let mut rng = Rng::from_seed(seed);
            let a = haar_sample(m, &mut rng).unwrap();
            let b = haar_sample(1, &mut rng).unwrap();
            let ab = a.tensor(&b).unwrap().density();
            let keep: Vec<usize> = (0..m).collect();
            let ra = partial_trace(&ab, &keep).unwrap();
            prop_assert!(max_abs_diff(ra.matrix(), a.density().matrix()) < 1e-12);
        }

        #[test]
        fn triangle_inequality(seed in any::<u64>()) {
            let mut rng = Rng::from_seed(seed);
            let a = random_density(1, &mut rng).unwrap();
            let b = random_density(1, &mut rng).unwrap();
            let c_ = random_density(1, &mut rng).unwrap();
            let ab = trace_distance(&a, &b).unwrap();
            let bc = trace_distance(&b, &c_).unwrap();
            let ac = trace_distance(&a, &c_).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
