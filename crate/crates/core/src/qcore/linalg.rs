//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Algebraic-identity tolerance.
pub const EPS: f64 = 1e-9;
/// Tolerance for eigendecomposition-derived quantities.
pub const EIG_TOL: f64 = 1e-7;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |M - M†|` entrywise.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues in descending order
/// and the matching orthonormal eigenvectors as columns. Each eigenvector's
/// largest-magnitude component is made real and positive.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut vecs = CMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        let mut col = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut col);
        vecs.set_column(dst, &col);
    }
    (vals, vecs)
}

/// Eigenvalues only (descending).
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 2 {
        let (a, b) = eig2(m);
        return vec![a, b];
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

fn eig2(m: &CMatrix) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean + rad, mean - rad)
}

fn fix_phase(v: &mut CVector) {
    let mut best = 0usize;
    let mut best_abs = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        // prefer the earliest index among (numerically) tied magnitudes
        if z.norm() > best_abs + 1e-12 {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        v.iter_mut().for_each(|z| *z *= phase);
        v[best] = c(v[best].re, 0.0);
    }
}

/// Half the sum of absolute eigenvalues of a Hermitian matrix.
pub fn half_trace_norm(m: &CMatrix) -> f64 {
    0.5 * eigvalsh(m).iter().map(|x| x.abs()).sum::<f64>()
}

/// Square root of a positive semidefinite matrix; eigenvalues below
/// `1e-14` (numerical noise) are treated as zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let n = vals.len();
    let mut out = CMatrix::zeros(n, n);
    for (i, &lam) in vals.iter().enumerate() {
        if lam <= 1e-14 {
            continue;
        }
        let col = vecs.column(i);
        let s = lam.sqrt();
        for r in 0..n {
            let a = col[r] * s;
            for cidx in 0..n {
                out[(r, cidx)] += a * col[cidx].conj();
            }
        }
    }
    out
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub fn log2_exact(n: usize) -> Option<usize> {
    is_power_of_two(n).then(|| n.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_descending_and_fixes_phase() {
        let m = CMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), ZERO, ZERO, c(3.0, 0.0)]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 3.0).abs() < 1e-12 && (vals[1] + 1.0).abs() < 1e-12);
        assert!((vecs[(1, 0)] - ONE).norm() < 1e-12);
        assert!((vecs[(0, 1)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn closed_form_two_by_two_matches_general_solver() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.2, -0.4), c(0.2, 0.4), c(-0.7, 0.0)]);
        let fast = eigvalsh(&m);
        let (slow, _) = eigh(&m);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
