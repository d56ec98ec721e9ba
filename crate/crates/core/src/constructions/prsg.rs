//! PRSG outputs wrapped as an OWSG with the projection verifier.

use crate::error::Result;
use crate::primitives::{HaarPrsg, OwsgScheme};

pub fn prsg_to_owsg(prsg: &HaarPrsg) -> Result<OwsgScheme> {
    let p = prsg.clone();
    Ok(OwsgScheme::pure(
        format!("prsg-n{}-m{}", prsg.key_bits(), prsg.output_qubits()),
        prsg.key_bits(),
        prsg.output_qubits(),
        move |k| Ok(p.state(k)?.clone()),
    )?
    .with_metadata("n", prsg.key_bits())
    .with_metadata("m", prsg.output_qubits())
    .with_metadata("prsg", serde_json::to_value(prsg.descriptor())?))
}

/// `2^n (1-h)^{2^m - 1} + h`: the one-wayness slack of the wrapped PRSG for
/// overlap threshold `h`. Values at or above 1 are vacuous.
pub fn prsg_delta(n: usize, m: usize, h: f64) -> f64 {
    let tail = (1.0 - h).powf(((1u64 << m) - 1) as f64);
    (n as f64).exp2() * tail + h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_values() {
        assert_eq!(prsg_delta(4, 2, 1.0), 1.0);
        assert!((prsg_delta(4, 2, 0.25) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn wrapped_scheme_is_correct() {
        let p = HaarPrsg::new(4, 2, 3).unwrap();
        let s = prsg_to_owsg(&p).unwrap();
        for k in 0..16 {
            assert!((s.accept(k, k).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(s.metadata()["m"], 2);
    }
}
