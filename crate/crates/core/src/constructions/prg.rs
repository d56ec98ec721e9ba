//! PRG-based EFI pair and bit commitment, and flavor conversion.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::primitives::{CanonicalCommitment, Circuit, EfiPair, Gate, ToyPrg};
use crate::qcore::{cap, DensityMatrix};

/// `ρ_0 = 2^{-n} Σ_x |G(x)⟩⟨G(x)|` and `ρ_1 = I / 2^{2n}` on `2n` qubits.
pub fn prg_efi(prg: &ToyPrg) -> Result<EfiPair> {
    let n = prg.seed_bits();
    cap::check(2 * n)?;
    let mut probs = vec![0.0; 1 << (2 * n)];
    let w = (n as f64).exp2().recip();
    for &y in prg.table() {
        probs[y as usize] += w;
    }
    EfiPair::new(
        format!("prg-efi-n{n}"),
        DensityMatrix::diagonal(&probs)?,
        DensityMatrix::maximally_mixed(2 * n)?,
    )
}

/// Trace distance and fidelity of the two classical distributions behind
/// [`prg_efi`], computed without matrices.
pub fn prg_efi_exact(prg: &ToyPrg) -> (f64, f64) {
    let n = prg.seed_bits();
    let d = 1usize << (2 * n);
    let mut p = vec![0.0; d];
    for &y in prg.table() {
        p[y as usize] += (n as f64).exp2().recip();
    }
    let q = (d as f64).recip();
    let td = 0.5 * p.iter().map(|&x| (x - q).abs()).sum::<f64>();
    let bc: f64 = p.iter().map(|&x| (x * q).sqrt()).sum();
    (td, bc * bc)
}

/// `|Ψ_0⟩ = 2^{-n/2} Σ_x |x 0^n⟩_R |G(x)⟩_C` and
/// `|Ψ_1⟩ = 2^{-n} Σ_y |y⟩_R |y⟩_C`, with `|R| = |C| = 2n`.
pub fn prg_commitment(prg: &ToyPrg) -> Result<CanonicalCommitment> {
    let n = prg.seed_bits();
    let (rq, cq) = (2 * n, 2 * n);
    let total = rq + cq;
    cap::check(total)?;
    let c_mask = (1usize << cq) - 1;

    // |r⟩|c⟩ -> |r⟩|c ⊕ G(x)⟩, x = first n bits of r
    let xor_g: Vec<usize> = (0..1usize << total)
        .map(|i| {
            let r = i >> cq;
            let x = r >> n;
            let g = prg.table()[x] as usize;
            (r << cq) | ((i & c_mask) ^ g)
        })
        .collect();
    // |r⟩|c⟩ -> |r⟩|c ⊕ r⟩
    let copy: Vec<usize> = (0..1usize << total)
        .map(|i| {
            let r = i >> cq;
            (r << cq) | ((i & c_mask) ^ r)
        })
        .collect();

    let q0 = Circuit::new(total)
        .hadamard_layer(0..n)?
        .then(Gate::Permutation(Arc::new(xor_g)))?;
    let q1 = Circuit::new(total)
        .hadamard_layer(0..rq)?
        .then(Gate::Permutation(Arc::new(copy)))?;
    Ok(CanonicalCommitment::new(format!("prg-commit-n{n}"), rq, cq, q0, q1)?
        .with_metadata("n", n)
        .with_metadata("prg", serde_json::to_value(prg.descriptor())?))
}

/// `|Ψ̃_b⟩ = (|0⟩_D Q_0|0⟩ + (-1)^b |1⟩_D Q_1|0⟩)/√2` with `R' = C` and
/// `C' = (R, D)`.
///
/// The circuit works in the order `(D, R, C)` and ends with a qubit
/// permutation to `(C, R, D)`, so the new reveal register comes first.
pub fn flavor_convert(com: &CanonicalCommitment) -> Result<CanonicalCommitment> {
    let (rq, cq) = (com.reveal_qubits(), com.commit_qubits());
    let total = rq + cq + 1;
    cap::check(total)?;
    // output order: C (inputs 1+rq..), R (inputs 1..=rq), D (input 0)
    let source: Vec<usize> = ((1 + rq)..total).chain(1..=rq).chain([0]).collect();
    let reorder = Circuit::qubit_permutation(total, &source)?;
    let select = Gate::Select {
        control: 0,
        branches: Arc::new([com.unitary(false).clone(), com.unitary(true).clone()]),
    };
    let build = |b: bool| -> Result<Circuit> {
        let mut circ = Circuit::new(total).then(Gate::Hadamard(0))?;
        if b {
            circ.push(Gate::PauliZ(0))?;
        }
        circ.then(select.clone())?.then(reorder.clone())
    };
    if com.num_qubits() + 1 != total {
        return Err(Error::InvalidParam("register bookkeeping".into()));
    }
    Ok(CanonicalCommitment::new(
        format!("{}/flavor", com.label()),
        cq,
        rq + 1,
        build(false)?,
        build(true)?,
    )?
    .with_metadata("converted_from", com.label())
    .with_metadata("reveal_register", "C of the source commitment")
    .with_metadata(
        "commit_register",
        "R of the source commitment, then the control qubit D",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::PrgKind;
    use crate::qcore::linalg::max_abs_diff;
    use crate::qcore::{fidelity, partial_trace, Operator, PureState};

    fn prg(n: usize) -> ToyPrg {
        ToyPrg::new(PrgKind::RandomInjection, n, 11).unwrap()
    }

    #[test]
    fn efi_fidelity_and_distance() {
        for n in 1..=3 {
            let g = prg(n);
            let pair = prg_efi(&g).unwrap();
            let (td, f) = prg_efi_exact(&g);
            assert!((pair.fidelity() - f).abs() < 1e-9);
            assert!((pair.trace_distance() - td).abs() < 1e-12);
            assert!((f - (n as f64).exp2().recip()).abs() < 1e-12);
            assert!(td >= 1.0 - f.sqrt() - 1e-12);
        }
    }

    #[test]
    fn duplicate_prg_distance() {
        let g = ToyPrg::new(PrgKind::Duplicate, 1, 0).unwrap();
        let (td, _) = prg_efi_exact(&g);
        assert!((td - 0.5).abs() < 1e-12);
        assert!((prg_efi(&g).unwrap().trace_distance() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn efi_states_are_diagonal() {
        let pair = prg_efi(&prg(2)).unwrap();
        for b in [false, true] {
            let m = pair.state(b).matrix();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if i != j {
                        assert!(m[(i, j)].norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn commitment_states_match_definition() {
        let g = prg(2);
        let com = prg_commitment(&g).unwrap();
        assert_eq!((com.reveal_qubits(), com.commit_qubits()), (4, 4));
        let psi0 = com.state(false).unwrap();
        for x in 0..4usize {
            let idx = ((x << 2) << 4) | g.table()[x] as usize;
            assert!((psi0.amplitudes()[idx].re - 0.5).abs() < 1e-12);
        }
        let psi1 = com.state(true).unwrap();
        for y in 0..16usize {
            assert!((psi1.amplitudes()[(y << 4) | y].re - 0.25).abs() < 1e-12);
        }
        let rho1 = com.commit_marginal(true).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(max_abs_diff(rho1.matrix(), mixed.matrix()) < 1e-12);
        for q in [com.unitary(false), com.unitary(true)] {
            assert!(q.unitarity_defect().unwrap() < 1e-8);
        }
    }

    #[test]
    fn commitment_reveal_and_binding() {
        let com = prg_commitment(&prg(2)).unwrap();
        for b in [false, true] {
            let psi = com.state(b).unwrap();
            assert!((com.reveal_verify_pure(b, &psi).unwrap() - 1.0).abs() < 1e-9);
        }
        let opt = com.honest_binding_optimum().unwrap();
        assert!(opt.fidelity <= 0.25 + 1e-9);
        let f = fidelity(
            &com.commit_marginal(false).unwrap(),
            &com.commit_marginal(true).unwrap(),
        )
        .unwrap();
        assert!((f - opt.fidelity).abs() < 1e-7);
    }

    #[test]
    fn flavor_conversion() {
        let com = prg_commitment(&prg(2)).unwrap();
        let conv = flavor_convert(&com).unwrap();
        assert_eq!(conv.reveal_qubits(), 4);
        assert_eq!(conv.commit_qubits(), 5);
        let a = conv.state(false).unwrap();
        let b = conv.state(true).unwrap();
        assert!(a.inner(&b).unwrap().norm() < 1e-12);
        for bit in [false, true] {
            let psi = conv.state(bit).unwrap();
            assert!((conv.reveal_verify_pure(bit, &psi).unwrap() - 1.0).abs() < 1e-9);
        }
        // converted states in (C, R, D) order: D last
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi0 = com.state(false).unwrap();
        let psi1 = com.state(true).unwrap();
        for i in 0..256usize {
            let (r, c) = (i >> 4, i & 15);
            let out = (c << 5) | (r << 1);
            assert!((a.amplitudes()[out] - psi0.amplitudes()[i] * s).norm() < 1e-12);
            assert!((b.amplitudes()[out | 1] + psi1.amplitudes()[i] * s).norm() < 1e-12);
        }
        let twice = flavor_convert(&conv).unwrap();
        for bit in [false, true] {
            let psi = twice.state(bit).unwrap();
            assert!((twice.reveal_verify_pure(bit, &psi).unwrap() - 1.0).abs() < 1e-9);
        }
        // the converted commit register holds (R, D)
        let marg = conv.commit_marginal(false).unwrap();
        let direct = partial_trace(&a.density(), &(4..9).collect::<Vec<_>>()).unwrap();
        assert!(max_abs_diff(marg.matrix(), direct.matrix()) < 1e-12);
        let _ = PureState::basis(1, 0);
    }
}
