//! Code-based fingerprint states and the OWSG built from them.

use qclab::constructions::{audit_overlaps, build_linear_code, fingerprint_owsg, Fingerprint};
use qclab::primitives::{make_toy_owf, OwfKind};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    let root = Rng::from_seed(3);
    let search = build_linear_code(8, 32, 0.5f64.powf(1.0 / 2.0), 20_000, &root.child("code"))?;
    let fp = Fingerprint::new(search.code, 0.5)?.with_seed(search.seed);
    println!(
        "code found after {} tries: delta {:.4}, r = {}, bound delta^r = {:.4}, {} qubits",
        search.tries,
        fp.delta(),
        fp.r(),
        fp.overlap_bound(),
        fp.total_qubits()
    );
    let audit = audit_overlaps(&fp)?;
    println!(
        "{} pairs: max overlap {:.6}, violations {}, formula error {:.2e}",
        audit.pairs, audit.max_overlap, audit.violations, audit.max_formula_error
    );
    let owf = make_toy_owf(OwfKind::RandomInjection, 8, 8, &mut root.child("owf"))?;
    let scheme = fingerprint_owsg(&owf, &fp)?;
    println!("correctness {:.12}", scheme.correctness()?);
    println!("accept(key 1 | state of key 0) = {:.6}", scheme.accept(1, 0)?);
    Ok(())
}
