//! Phase-encoding OWSG: `φ_k = ⊗_j |+_{2π y_j/λ}⟩` with `y = f(k)` read as
//! `t` digits in `[λ]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::primitives::{OwsgScheme, ToyOwf};
use crate::qcore::linalg::{c, CVector, ONE};
use crate::qcore::{cap, PureState};

/// Digit layout of an `ℓ`-bit string in base `λ`.
///
/// Each digit takes `b = ⌊log₂ λ⌋` bits, `t = ⌈ℓ / b⌉`, the string is
/// left-padded with zeros to `t b` bits and split most significant first.
/// For a power-of-two `λ` every digit value is used; otherwise values
/// `2^b..λ` never occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigitLayout {
    pub ell: usize,
    pub lam: u64,
    pub bits_per_digit: usize,
    pub digits: usize,
}

impl DigitLayout {
    pub fn new(ell: usize, lam: u64) -> Result<Self> {
        if lam < 2 {
            return Err(Error::InvalidParam(format!("alphabet size {lam} < 2")));
        }
        if ell == 0 || ell > 63 {
            return Err(Error::InvalidParam(format!("{ell}-bit strings")));
        }
        let bits_per_digit = 63 - lam.leading_zeros() as usize;
        Ok(DigitLayout {
            ell,
            lam,
            bits_per_digit,
            digits: ell.div_ceil(bits_per_digit),
        })
    }

    pub fn split(&self, y: u64) -> Vec<u64> {
        let b = self.bits_per_digit;
        let mask = (1u64 << b) - 1;
        (0..self.digits)
            .map(|j| (y >> ((self.digits - 1 - j) * b)) & mask)
            .collect()
    }
}

/// `|+_{2π y/λ}⟩`.
pub fn phase_qubit(y: u64, lam: u64) -> PureState {
    PureState::plus_phase(2.0 * PI * y as f64 / lam as f64)
}

/// Product state for a digit string.
pub fn phase_state(digits: &[u64], lam: u64) -> Result<PureState> {
    cap::check(digits.len())?;
    let mut v = CVector::from_element(1, ONE);
    for &d in digits {
        let q = phase_qubit(d, lam);
        v = v.kronecker(q.amplitudes());
    }
    PureState::new(v)
}

/// `|⟨+_{2πy/λ}|+_{2πy'/λ}⟩| = |(1 + e^{i2π(y-y')/λ})/2|`.
pub fn digit_overlap(y: u64, y2: u64, lam: u64) -> f64 {
    let theta = 2.0 * PI * (y2 as f64 - y as f64) / lam as f64;
    ((c(1.0, 0.0) + c(0.0, theta).exp()) / 2.0).norm()
}

/// `√((1 + cos(2π/λ))/2)`, the largest overlap of distinct digits.
pub fn digit_overlap_bound(lam: u64) -> f64 {
    ((1.0 + (2.0 * PI / lam as f64).cos()) / 2.0).sqrt()
}

/// Product of per-digit overlaps.
pub fn product_overlap(a: &[u64], b: &[u64], lam: u64) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| digit_overlap(x, y, lam)).product()
}

pub fn phase_owsg(owf: &ToyOwf, lam: u64) -> Result<OwsgScheme> {
    let layout = DigitLayout::new(owf.output_bits(), lam)?;
    cap::check(layout.digits)?;
    let f = owf.clone();
    Ok(OwsgScheme::pure(
        format!("phase-n{}-l{}-lam{}", owf.input_bits(), owf.output_bits(), lam),
        owf.input_bits(),
        layout.digits,
        move |k| phase_state(&layout.split(f.eval(k)?), lam),
    )?
    .with_metadata("lambda", lam)
    .with_metadata("t", layout.digits)
    .with_metadata("bits_per_digit", layout.bits_per_digit)
    .with_metadata("ell", owf.output_bits())
    .with_metadata("owf", serde_json::to_value(owf.descriptor())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::OwfKind;

    #[test]
    fn layout_and_split() {
        let l = DigitLayout::new(8, 16).unwrap();
        assert_eq!((l.bits_per_digit, l.digits), (4, 2));
        assert_eq!(l.split(0xA7), vec![0xA, 0x7]);
        let l = DigitLayout::new(7, 4).unwrap();
        assert_eq!(l.digits, 4);
        // 0b1_10_01_11 padded to 0b01_10_01_11
        assert_eq!(l.split(0b1100111), vec![1, 2, 1, 3]);
        let l = DigitLayout::new(8, 10).unwrap();
        assert_eq!((l.bits_per_digit, l.digits), (3, 3));
    }

    #[test]
    fn adjacent_digits_for_lambda_four() {
        assert!((digit_overlap(1, 2, 4) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((digit_overlap(3, 3, 4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_formula_matches_inner_product() {
        let lam = 8;
        let mut max_err = 0.0f64;
        for a in 0..64u64 {
            for b in 0..64u64 {
                let da = vec![a >> 3, a & 7];
                let db = vec![b >> 3, b & 7];
                let direct = phase_state(&da, lam)
                    .unwrap()
                    .inner(&phase_state(&db, lam).unwrap())
                    .unwrap()
                    .norm();
                max_err = max_err.max((direct - product_overlap(&da, &db, lam)).abs());
                let differing = da.iter().zip(&db).filter(|(x, y)| x != y).count();
                assert!(direct <= digit_overlap_bound(lam).powi(differing as i32) + 1e-9);
            }
        }
        assert!(max_err < 1e-9);
    }

    #[test]
    fn scheme_correctness() {
        let owf = ToyOwf::new(OwfKind::RandomInjection, 6, 8, 1).unwrap();
        let s = phase_owsg(&owf, 16).unwrap();
        assert_eq!(s.output_qubits(), 2);
        assert!((s.correctness().unwrap() - 1.0).abs() < 1e-9);
    }
}
