//! Haar overlap tail against the analytic value.

use qclab::bounds::{haar_concentration_check, haar_tail_probability};
use qclab::{Result, Rng};

fn main() -> Result<()> {
    for m in [1, 2] {
        for h in [0.1, 0.5] {
            let c = haar_concentration_check(m, h, 100_000, &Rng::from_seed(10))?;
            println!(
                "m={m} h={h}: empirical {:.5}, analytic {:.5}, within 3 sigma: {}",
                c.lhs,
                haar_tail_probability(m, h),
                c.holds
            );
        }
    }
    Ok(())
}
