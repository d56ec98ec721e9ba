//! Standalone SVG plots of report sweeps.

use std::fmt::Write as _;
use std::path::Path;

use super::report::{write_atomic, ExperimentReport, Sweep};
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 0.0 { lo.abs() * 0.1 } else { 0.5 };
        (lo - pad, hi + pad)
    } else {
        let pad = (hi - lo) * 0.08;
        (lo - pad, hi + pad)
    }
}

/// Renders the sweep of `report`. One marker series per `series` label,
/// error bars from `ci95`, and the reference bound as a dashed polyline.
pub fn render_svg(report: &ExperimentReport) -> Result<String> {
    let sweep = report
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Plot(format!("{} report has no sweep axis", report.config.experiment)))?;
    render_sweep(
        sweep,
        &format!("{} (seed {})", report.config.experiment, report.config.seed),
    )
}

pub fn render_sweep(sweep: &Sweep, title: &str) -> Result<String> {
    if sweep.points.is_empty() {
        return Err(Error::Plot("empty sweep".into()));
    }
    if sweep
        .points
        .iter()
        .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.reference.is_finite()))
    {
        return Err(Error::Plot("non-finite sweep value".into()));
    }
    let (x0, x1) = range(sweep.points.iter().map(|p| p.x));
    let (y0, y1) = range(
        sweep
            .points
            .iter()
            .flat_map(|p| [p.y - p.ci95, p.y + p.ci95, p.reference]),
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0,
            format_tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            format_tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(&sweep.axis)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        escape(&sweep.y_label)
    );

    let mut reference: Vec<(f64, f64)> = sweep.points.iter().map(|p| (p.x, p.reference)).collect();
    reference.sort_by(|a, b| a.0.total_cmp(&b.0));
    reference.dedup_by(|a, b| a.0 == b.0);
    let pts: Vec<String> = reference
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    if pts.len() == 1 {
        let y = sy(reference[0].1);
        let _ = writeln!(
            s,
            r#"<line class="reference" x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
            LEFT + pw
        );
    } else {
        let _ = writeln!(
            s,
            r#"<polyline class="reference" points="{}" fill="none" stroke="gray" stroke-dasharray="6 4"/>"#,
            pts.join(" ")
        );
    }

    let mut series: Vec<&str> = Vec::new();
    for p in &sweep.points {
        if !series.contains(&p.series.as_str()) {
            series.push(&p.series);
        }
    }
    for (i, name) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<g class="series" data-series="{}" fill="{color}" stroke="{color}">"#,
            escape(name)
        );
        for p in sweep.points.iter().filter(|p| p.series == *name) {
            let (px, py) = (sx(p.x), sy(p.y));
            if p.ci95 > 0.0 {
                let _ = writeln!(
                    s,
                    r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}"/>"#,
                    sy(p.y - p.ci95),
                    sy(p.y + p.ci95)
                );
            }
            let _ = writeln!(s, r#"<circle class="point" cx="{px:.2}" cy="{py:.2}" r="4"/>"#);
        }
        let _ = writeln!(s, "</g>");
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{ly:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT + pw + 16.0,
            LEFT + pw + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    let ly = TOP + 10.0 + 18.0 * series.len() as f64;
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="gray" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">{}</text>"#,
        LEFT + pw + 8.0,
        LEFT + pw + 22.0,
        LEFT + pw + 26.0,
        ly + 4.0,
        escape(&sweep.reference_label)
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Writes the plot of `report` to `path`; nothing is written on error.
pub fn emit_plot(report: &ExperimentReport, path: &Path) -> Result<()> {
    let svg = render_svg(report)?;
    write_atomic(path, svg.as_bytes()).map_err(|e| match e {
        Error::Io(io) => Error::Plot(format!("{}: {io}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{Experiment, ExperimentConfig};
    use crate::harness::report::SweepPoint;

    fn report(points: Vec<SweepPoint>) -> ExperimentReport {
        let mut r = ExperimentReport::new(ExperimentConfig::new(Experiment::OwsgTrivial, 1));
        r.sweep = Some(Sweep {
            axis: "m".into(),
            y_label: "win probability".into(),
            reference_label: "2^-m".into(),
            points,
        });
        r
    }

    fn point(x: f64, y: f64) -> SweepPoint {
        SweepPoint {
            series: "trivial".into(),
            x,
            y,
            ci95: 0.01,
            reference: (-x).exp2(),
        }
    }

    #[test]
    fn single_point_has_one_marker() {
        let svg = render_svg(&report(vec![point(1.0, 0.6)])).unwrap();
        assert_eq!(svg.matches("class=\"point\"").count(), 1);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_sweep_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.svg");
        assert!(matches!(emit_plot(&report(vec![]), &p), Err(Error::Plot(_))));
        assert!(!p.exists());
        let mut r = report(vec![]);
        r.sweep = None;
        assert!(emit_plot(&r, &p).is_err());
        assert!(!p.exists());
    }

    #[test]
    fn escapes_labels() {
        let mut r = report(vec![point(1.0, 0.6), point(2.0, 0.3)]);
        r.sweep.as_mut().unwrap().axis = "a<b & c".into();
        let svg = render_svg(&r).unwrap();
        assert!(svg.contains("a&lt;b &amp; c"));
        assert!(svg.contains("<polyline class=\"reference\""));
    }
}
