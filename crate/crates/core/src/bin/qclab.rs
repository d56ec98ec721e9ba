//! Command-line front end for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use qclab::harness::suite::{run_suite, DEFAULT_SUITE_SEED};
use qclab::harness::{emit_plot, run, run_and_write, Experiment, ExperimentConfig, ExperimentReport, Format};
use qclab::{Error, Result};

#[derive(Parser)]
#[command(name = "qclab", version, about = "Desk-scale quantum cryptography experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a config file.
    Run(RunArgs),
    Welch(RunArgs),
    OwsgTrivial(RunArgs),
    OwsgNet(RunArgs),
    EfiBuild(RunArgs),
    EfiAttack(RunArgs),
    Fingerprint(RunArgs),
    PhaseOwsg(RunArgs),
    PrsgOwsg(RunArgs),
    CommitBuild(RunArgs),
    CommitConvert(RunArgs),
    CommitAttack(RunArgs),
    TomographyBench(RunArgs),
    BoundsSuite(RunArgs),
    /// The acceptance battery.
    Suite {
        #[command(subcommand)]
        action: SuiteAction,
    },
    /// Re-run the config echoed by a report.
    Replay {
        report: PathBuf,
        /// Write the new report here instead of the echoed output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the sweep of an existing report as SVG.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SuiteAction {
    Run {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SUITE_SEED)]
        seed: u64,
    },
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long)]
    max_qubits: Option<usize>,
    /// Parameter override `key=value`; the value is read as JSON, else as a string.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_config(experiment: Option<Experiment>, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut doc = match &args.config {
        Some(path) => serde_json::from_str::<Value>(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => Value::Object(Map::new()),
    };
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    if let Some(e) = experiment {
        match obj.get("experiment").and_then(Value::as_str) {
            Some(named) if named != e.name() => {
                return Err(Error::Config(format!(
                    "config names experiment {named}, subcommand is {e}"
                )));
            }
            _ => {
                obj.insert("experiment".into(), Value::from(e.name()));
            }
        }
    } else if !obj.contains_key("experiment") {
        return Err(Error::Config("config does not name an experiment".into()));
    }
    obj.entry("schema_version")
        .or_insert(Value::from(qclab::harness::SCHEMA_VERSION));
    if let Some(seed) = args.seed {
        obj.insert("seed".into(), Value::from(seed));
    }
    if !obj.contains_key("seed") {
        return Err(Error::Config(
            "a seed is required (--seed or \"seed\" in the config)".into(),
        ));
    }
    if let Some(t) = args.trials {
        obj.insert("trials".into(), Value::from(t));
    }
    if let Some(out) = &args.out {
        obj.insert("output".into(), Value::from(out.to_string_lossy().into_owned()));
    }
    if let Some(f) = &args.format {
        let f: Format = f.parse()?;
        obj.insert("format".into(), serde_json::to_value(f)?);
    }
    if let Some(p) = &args.plot {
        obj.insert("plot".into(), Value::from(p.to_string_lossy().into_owned()));
    }
    if let Some(n) = args.max_qubits {
        obj.insert("max_qubits".into(), Value::from(n));
    }
    if !args.set.is_empty() {
        let params = obj
            .entry("params")
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .ok_or_else(|| Error::Config("params must be an object".into()))?;
        for kv in &args.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv}")))?;
            let v = serde_json::from_str(v).unwrap_or_else(|_| Value::from(v));
            params.insert(k.to_string(), v);
        }
    }
    ExperimentConfig::from_value(doc)
}

fn print_checks(report: &ExperimentReport) {
    eprintln!(
        "{:<44} {:>14} {:>3} {:>14} {:>12}  pass",
        "check", "lhs", "", "rhs", "margin"
    );
    for c in &report.checks {
        eprintln!(
            "{:<44} {:>14.6e} {:>3} {:>14.6e} {:>12.3e}  {}",
            c.name,
            c.lhs,
            c.relation.symbol(),
            c.rhs,
            c.margin,
            if c.holds { "ok" } else { "FAIL" }
        );
    }
    eprintln!(
        "{}: {}",
        report.config.experiment,
        if report.pass { "pass" } else { "FAIL" }
    );
}

fn execute(config: ExperimentConfig) -> Result<bool> {
    let report = if config.output.is_some() {
        run_and_write(&config)?
    } else {
        let report = run(&config)?;
        if let Some(p) = &config.plot {
            emit_plot(&report, p)?;
        }
        print!("{}", report.to_json()?);
        report
    };
    print_checks(&report);
    Ok(report.pass)
}

fn dispatch(cli: Cli) -> Result<bool> {
    use Command::*;
    let (experiment, args) = match cli.command {
        Run(a) => (None, a),
        Welch(a) => (Some(Experiment::Welch), a),
        OwsgTrivial(a) => (Some(Experiment::OwsgTrivial), a),
        OwsgNet(a) => (Some(Experiment::OwsgNet), a),
        EfiBuild(a) => (Some(Experiment::EfiBuild), a),
        EfiAttack(a) => (Some(Experiment::EfiAttack), a),
        Fingerprint(a) => (Some(Experiment::Fingerprint), a),
        PhaseOwsg(a) => (Some(Experiment::PhaseOwsg), a),
        PrsgOwsg(a) => (Some(Experiment::PrsgOwsg), a),
        CommitBuild(a) => (Some(Experiment::CommitBuild), a),
        CommitConvert(a) => (Some(Experiment::CommitConvert), a),
        CommitAttack(a) => (Some(Experiment::CommitAttack), a),
        TomographyBench(a) => (Some(Experiment::TomographyBench), a),
        BoundsSuite(a) => (Some(Experiment::BoundsSuite), a),
        Suite {
            action: SuiteAction::Run { out, seed },
        } => {
            let summary = run_suite(seed, &out, |c| {
                eprintln!(
                    "criterion {:>2} {:<52} {}",
                    c.id,
                    c.title,
                    if c.pass { "pass" } else { "FAIL" }
                )
            })?;
            eprintln!("all_pass: {} ({:.1}s)", summary.all_pass, summary.wall_time);
            return Ok(summary.all_pass);
        }
        Replay { report, out } => {
            let old = ExperimentReport::from_json(&std::fs::read_to_string(&report)?)?;
            let mut config = old.config;
            if out.is_some() {
                config.output = out;
            }
            return execute(config);
        }
        Plot { report, out } => {
            let r = ExperimentReport::from_json(&std::fs::read_to_string(&report)?)?;
            emit_plot(&r, &out)?;
            return Ok(true);
        }
    };
    execute(build_config(experiment, &args)?)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
