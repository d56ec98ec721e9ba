//! Experiment reports and their JSON and CSV renderings.
//!
//! Floats are written as `{:.16e}` (17 significant digits) in both formats,
//! so the two renderings carry textually identical trial values and parse
//! back to the same bits.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use super::config::{ExperimentConfig, Format};
use crate::bounds::{BoundCheck, SweepSummary};
use crate::error::{Error, Result};
use crate::primitives::{GameReport, Relation};

/// One evaluated claim of an experiment, with the bound it is checked
/// against and where that bound comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub tolerance: f64,
    pub margin: f64,
    pub holds: bool,
    pub source: String,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        lhs: f64,
        relation: Relation,
        rhs: f64,
        tolerance: f64,
        source: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            lhs,
            relation,
            rhs,
            tolerance,
            margin: relation.margin(lhs, rhs),
            holds: relation.holds(lhs, rhs, tolerance),
            source: source.into(),
        }
    }

    /// The bound attached to a game report, with its slack recovered from
    /// the reported confidence interval.
    pub fn from_game(name: impl Into<String>, game: &GameReport, slack: f64) -> Result<Self> {
        let bound = game
            .bound
            .ok_or_else(|| Error::InvalidParam(format!("game {} has no bound", game.game)))?;
        Ok(Check::new(
            name,
            game.estimate,
            game.relation,
            bound,
            slack,
            game.bound_source.clone(),
        ))
    }

    pub fn from_bound(check: &BoundCheck, source: impl Into<String>) -> Self {
        Check::new(
            check.name.clone(),
            check.lhs,
            check.relation,
            check.rhs,
            check.tolerance,
            source,
        )
    }

    /// `violations == 0` over a sweep.
    pub fn from_sweep(sweep: &SweepSummary, source: impl Into<String>) -> Self {
        Check::new(
            format!("{}/violations", sweep.name),
            sweep.violations as f64,
            Relation::Le,
            0.0,
            0.0,
            source,
        )
    }
}

/// One row of trial-level output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub trial: u64,
    pub series: String,
    #[serde(flatten)]
    pub fields: BTreeMap<String, Value>,
}

impl Record {
    pub fn new(trial: u64, series: impl Into<String>) -> Self {
        Record {
            trial,
            series: series.into(),
            fields: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
    pub ci95: f64,
    /// Value of the reference bound at `x`.
    pub reference: f64,
}

/// A parameter sweep suitable for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: String,
    pub y_label: String,
    pub reference_label: String,
    pub points: Vec<SweepPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub qclab_version: String,
    /// The resolved config; running it again reproduces this report.
    pub config: ExperimentConfig,
    /// Conjunction of `checks[*].holds`.
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Named aggregates and descriptors.
    pub values: BTreeMap<String, Value>,
    /// Game summaries; their trial logs are in `records`.
    pub games: Vec<GameReport>,
    pub sweep: Option<Sweep>,
    pub records: Vec<Record>,
    /// Seconds; the only field that differs between replays.
    pub wall_time: f64,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig) -> Self {
        ExperimentReport {
            schema_version: super::config::SCHEMA_VERSION,
            qclab_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            pass: true,
            checks: Vec::new(),
            values: BTreeMap::new(),
            games: Vec::new(),
            sweep: None,
            records: Vec::new(),
            wall_time: 0.0,
        }
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
        self.pass = self.checks.iter().all(|c| c.holds);
    }

    pub fn value(&mut self, key: &str, value: impl Into<Value>) {
        self.values.insert(key.to_string(), value.into());
    }

    /// Stores a game summary without its trial log.
    pub fn game(&mut self, mut game: GameReport) {
        game.records.clear();
        self.games.push(game);
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.holds)
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Header `trial,series,<sorted field names>` and one row per record.
    pub fn to_csv(&self) -> Result<String> {
        let columns: BTreeSet<&str> = self
            .records
            .iter()
            .flat_map(|r| r.fields.keys().map(String::as_str))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = ["trial", "series"].into_iter().chain(columns.iter().copied()).collect();
        w.write_record(&header).map_err(csv_error)?;
        for r in &self.records {
            let mut row = vec![r.trial.to_string(), r.series.clone()];
            row.extend(
                columns
                    .iter()
                    .map(|c| r.fields.get(*c).map(render_cell).unwrap_or_default()),
            );
            w.write_record(&row).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes the configured outputs (`config.output`, `config.format`).
    /// Returns the paths written.
    pub fn write_outputs(&self) -> Result<Vec<PathBuf>> {
        let Some(out) = &self.config.output else {
            return Ok(Vec::new());
        };
        let targets = output_paths(out, self.config.format);
        // render everything before touching the filesystem
        let rendered = targets
            .iter()
            .map(|(_, f)| match f {
                Format::Csv => self.to_csv(),
                _ => self.to_json(),
            })
            .collect::<Result<Vec<_>>>()?;
        for ((path, _), text) in targets.iter().zip(&rendered) {
            write_atomic(path, text.as_bytes())?;
        }
        Ok(targets.into_iter().map(|(p, _)| p).collect())
    }
}

/// `both` writes `<out>.json` and `<out>.csv`; otherwise `out` as given.
pub fn output_paths(out: &Path, format: Format) -> Vec<(PathBuf, Format)> {
    match format {
        Format::Both => vec![
            (out.with_extension("json"), Format::Json),
            (out.with_extension("csv"), Format::Csv),
        ],
        f => vec![(out.to_path_buf(), f)],
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

fn render_float(f: f64) -> String {
    format!("{f:.16e}")
}

/// Cell text of a JSON value, matching its JSON rendering for scalars.
pub fn render_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => render_float(n.as_f64().expect("f64 number")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Pretty printer that writes every float with 17 significant digits.
struct FloatFormatter(PrettyFormatter<'static>);

impl Formatter for FloatFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(render_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FloatFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Drops every line mentioning `wall_time`, the one field allowed to
/// differ between replays.
pub fn strip_wall_time(json: &str) -> String {
    json.lines()
        .filter(|l| !l.contains("\"wall_time\""))
        .collect::<Vec<_>>()
        .join("\n")
}
