//! Runs an experiment from a JSON config and writes JSON, CSV and SVG.

use qclab::harness::{run_and_write, ExperimentConfig};
use qclab::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("qclab-run-config");
    let config = ExperimentConfig::from_json(&format!(
        r#"{{
            "schema_version": 1,
            "experiment": "owsg-trivial",
            "params": {{"n": 4, "m": [1, 2, 3, 4]}},
            "trials": 4000,
            "seed": 7,
            "output": "{0}/trivial",
            "format": "both",
            "plot": "{0}/trivial.svg"
        }}"#,
        dir.display()
    ))?;
    let report = run_and_write(&config)?;
    for c in &report.checks {
        println!(
            "{:<32} {:>12.6} {} {:<12.6} {}",
            c.name,
            c.lhs,
            c.relation.symbol(),
            c.rhs,
            c.holds
        );
    }
    println!("pass: {}; outputs in {}", report.pass, dir.display());
    Ok(())
}
