//! Projector characterisation of the trace distance.
//!
//! For Hermitian `H = A - B`, `max_Π Tr(ΠH)` is attained at the projector
//! onto the nonnegative eigenspace and equals `||H||_tr + Tr(H)/2`, which is
//! `||A - B||_tr` when `Tr A = Tr B`. For every projector,
//! `|Tr(ΠH)| ≤ 2||H||_tr`.

use rayon::prelude::*;

use super::{BoundCheck, SweepSummary, Witness, MARGIN_TOL};
use crate::error::Result;
use crate::primitives::Relation;
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::state::MatrixRepr;
use crate::qcore::{
    positive_part_projector, projector_trace, random_density, random_hermitian, HermitianMatrix, Operator, Projector,
    Rng,
};

fn difference(a: &MatrixRepr, b: &MatrixRepr) -> Result<HermitianMatrix> {
    let a = HermitianMatrix::new(a.to_matrix())?;
    let b = HermitianMatrix::new(b.to_matrix())?;
    HermitianMatrix::difference(&a, &b)
}

fn positive_value(h: &HermitianMatrix) -> Result<f64> {
    projector_trace(&positive_part_projector(h), h)
}

pub(crate) fn evaluate_equality(a: &MatrixRepr, b: &MatrixRepr) -> Result<(f64, f64)> {
    let h = difference(a, b)?;
    Ok((positive_value(&h)?, h.trace_norm_half() + h.trace() / 2.0))
}

pub(crate) fn evaluate_maximality(a: &MatrixRepr, b: &MatrixRepr, p: &MatrixRepr) -> Result<(f64, f64)> {
    let h = difference(a, b)?;
    let p = Projector::new(p.to_matrix())?;
    Ok((projector_trace(&p, &h)?, positive_value(&h)?))
}

pub(crate) fn evaluate_abs_bound(a: &MatrixRepr, b: &MatrixRepr, p: &MatrixRepr) -> Result<(f64, f64)> {
    let h = difference(a, b)?;
    let p = Projector::new(p.to_matrix())?;
    Ok((projector_trace(&p, &h)?.abs(), 2.0 * h.trace_norm_half()))
}

/// Projector onto the top `rank` eigenvectors of a random Hermitian matrix,
/// with `rank` uniform in `0..=dim`.
pub fn random_projector(dim: usize, rng: &mut Rng) -> Projector {
    let rank = rng.below(dim as u64 + 1) as usize;
    let (_, vecs) = linalg::eigh(random_hermitian(dim, rng).matrix());
    let mut p = CMatrix::zeros(dim, dim);
    for i in 0..rank {
        let v = vecs.column(i).into_owned();
        p += linalg::outer(&v, &v);
    }
    Projector::new(linalg::symmetrize(&p)).expect("orthonormal eigenvectors")
}

fn reprs<A: Operator, B: Operator>(a: &A, b: &B) -> (MatrixRepr, MatrixRepr) {
    (MatrixRepr::from_matrix(a.matrix()), MatrixRepr::from_matrix(b.matrix()))
}

/// `Tr(Π₊(A - B)) = ||A - B||_tr + Tr(A - B)/2`.
pub fn projector_equality_check<A: Operator, B: Operator>(a: &A, b: &B) -> Result<BoundCheck> {
    let (a, b) = reprs(a, b);
    BoundCheck::from_witness(
        "projector-equality",
        Relation::Eq,
        MARGIN_TOL,
        Witness::ProjectorEquality { a, b },
    )
}

/// `|Tr(Π(A - B))| ≤ 2 ||A - B||_tr`.
pub fn projector_abs_bound_check<A: Operator, B: Operator>(a: &A, b: &B, p: &Projector) -> Result<BoundCheck> {
    let (a, b) = reprs(a, b);
    let projector = MatrixRepr::from_matrix(p.matrix());
    BoundCheck::from_witness(
        "projector-abs-bound",
        Relation::Le,
        MARGIN_TOL,
        Witness::ProjectorAbsBound { a, b, projector },
    )
}

/// `Tr(Π(A - B)) ≤ Tr(Π₊(A - B))`.
pub fn projector_maximality_check<A: Operator, B: Operator>(a: &A, b: &B, p: &Projector) -> Result<BoundCheck> {
    let (a, b) = reprs(a, b);
    let projector = MatrixRepr::from_matrix(p.matrix());
    BoundCheck::from_witness(
        "projector-maximality",
        Relation::Le,
        MARGIN_TOL,
        Witness::ProjectorMaximality { a, b, projector },
    )
}

/// Random triples `(A, B, Π)` of two `qubits`-qubit states and a random
/// projector; each instance contributes the equality, maximality and
/// absolute-value bound checks. Instance `i` uses the child stream `("triple", i)`.
pub fn projector_td_check(instances: u64, qubits: usize, rng: &Rng) -> Result<SweepSummary> {
    let checks = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.child_indexed("triple", i);
            let a = random_density(qubits, &mut r)?;
            let b = random_density(qubits, &mut r)?;
            let p = random_projector(a.dim(), &mut r);
            Ok(vec![
                projector_equality_check(&a, &b)?,
                projector_maximality_check(&a, &b, &p)?,
                projector_abs_bound_check(&a, &b, &p)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSummary::from_checks(
        "projector-trace-distance",
        checks.into_iter().flatten().collect(),
    ))
}
