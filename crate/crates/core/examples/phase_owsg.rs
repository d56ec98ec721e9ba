//! Phase-state OWSG: digit layout and overlap bounds.

use qclab::constructions::phase::{digit_overlap_bound, phase_state, product_overlap, DigitLayout};
use qclab::constructions::phase_owsg;
use qclab::primitives::{make_toy_owf, OwfKind};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    let lam = 16;
    let layout = DigitLayout::new(8, lam)?;
    println!("8-bit strings as {} digits mod {lam}", layout.digits);
    let (a, b) = (layout.split(0x00), layout.split(0x01));
    let (sa, sb) = (phase_state(&a, lam)?, phase_state(&b, lam)?);
    println!(
        "one differing digit: overlap {:.6} (formula {:.6}) <= {:.6}",
        sa.inner(&sb)?.norm(),
        product_overlap(&a, &b, lam),
        digit_overlap_bound(lam)
    );
    let owf = make_toy_owf(OwfKind::RandomInjection, 8, 8, &mut Rng::from_seed(4))?;
    let scheme = phase_owsg(&owf, lam)?;
    println!("scheme correctness {:.12}", scheme.correctness()?);
    Ok(())
}
