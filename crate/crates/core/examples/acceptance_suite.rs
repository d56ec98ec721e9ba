//! The full acceptance battery into a temporary directory.

use qclab::harness::{run_suite, DEFAULT_SUITE_SEED};
use qclab::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("qclab-suite");
    let summary = run_suite(DEFAULT_SUITE_SEED, &dir, |c| {
        println!("{:>2} {:<52} {}", c.id, c.title, if c.pass { "pass" } else { "FAIL" })
    })?;
    println!(
        "all_pass {} in {:.1}s; reports in {}",
        summary.all_pass,
        summary.wall_time,
        dir.display()
    );
    Ok(())
}
