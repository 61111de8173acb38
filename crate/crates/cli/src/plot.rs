//! Training curves as standalone SVG: one panel each for accuracy, loss and
//! entropy against epoch.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{RunError, RunResult};
use crate::runner::METRICS_HEADER;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub epoch: f64,
    pub accuracy: f64,
    pub loss: f64,
    pub entropy: f64,
}

/// Parses a metrics CSV. Errors name the 1-based line that failed.
pub fn parse_metrics_csv(text: &str, source: &str) -> RunResult<Vec<MetricsRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| RunError::Plot(format!("{source}: {e}")))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        let fail = |msg: String| RunError::Plot(format!("{source}, line {line}: {msg}"));
        if i == 0 {
            if record.iter().map(str::trim).ne(METRICS_HEADER) {
                return Err(fail(format!("expected header {}", METRICS_HEADER.join(","))));
            }
            continue;
        }
        if record.len() != METRICS_HEADER.len() {
            return Err(fail(format!(
                "expected {} fields, found {}",
                METRICS_HEADER.len(),
                record.len()
            )));
        }
        let num = |k: usize| -> RunResult<f64> {
            let v: f64 = record[k]
                .trim()
                .parse()
                .map_err(|_| fail(format!("{} is not a number: '{}'", METRICS_HEADER[k], &record[k])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(fail(format!("{} is not finite", METRICS_HEADER[k])))
            }
        };
        rows.push(MetricsRow {
            epoch: num(0)?,
            accuracy: num(2)?,
            loss: num(3)?,
            entropy: num(4)?,
        });
    }
    if rows.is_empty() {
        return Err(RunError::Plot(format!("{source}: no data rows")));
    }
    Ok(rows)
}

const WIDTH: f64 = 640.0;
const PANEL_H: f64 = 180.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const GAP: f64 = 40.0;

/// Deterministic SVG for `rows`.
pub fn render_svg(rows: &[MetricsRow], title: &str) -> String {
    type Series = (&'static str, &'static str, fn(&MetricsRow) -> f64);
    let series: [Series; 3] = [
        ("accuracy", "#1f77b4", |r| r.accuracy),
        ("loss", "#d62728", |r| r.loss),
        ("entropy", "#2ca02c", |r| r.entropy),
    ];
    let height = MARGIN_T + 3.0 * (PANEL_H + GAP);
    let (e_lo, e_hi) = bounds(rows.iter().map(|r| r.epoch));
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let x_of = |e: f64| MARGIN_L + (e - e_lo) / (e_hi - e_lo) * plot_w;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (k, (name, color, get)) in series.iter().enumerate() {
        let top = MARGIN_T + k as f64 * (PANEL_H + GAP);
        let bottom = top + PANEL_H;
        let (v_lo, v_hi) = bounds(rows.iter().map(get));
        let y_of = |v: f64| bottom - (v - v_lo) / (v_hi - v_lo) * PANEL_H;

        let _ = writeln!(s, r#"<g class="panel" id="{name}">"#);
        let _ = writeln!(
            s,
            r##"<rect x="{MARGIN_L}" y="{top}" width="{plot_w}" height="{PANEL_H}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12">{name}</text>"#,
            MARGIN_L,
            top - 6.0
        );
        for (v, y) in [(v_hi, top), (v_lo, bottom)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_L - 6.0,
                y + 4.0,
                tick(v)
            );
        }
        for (e, anchor) in [(e_lo, "start"), (e_hi, "end")] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{}" text-anchor="{anchor}">epoch {}</text>"#,
                x_of(e),
                bottom + 14.0,
                tick(e)
            );
        }
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", x_of(r.epoch), y_of(get(r))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-series="{name}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        for p in &points {
            let (x, y) = p.split_once(',').expect("formatted as x,y");
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<name>.svg` next to each CSV and returns the SVG paths.
pub fn emit_plots(csv_paths: &[PathBuf]) -> RunResult<Vec<PathBuf>> {
    csv_paths
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
            let rows = parse_metrics_csv(&text, &path.display().to_string())?;
            let out = path.with_extension("svg");
            fs::write(&out, render_svg(&rows, &plot_title(path))).map_err(|e| RunError::io(&out, e))?;
            Ok(out)
        })
        .collect()
}

/// The run directory name, or the file stem for a bare file.
fn plot_title(path: &Path) -> String {
    path.parent()
        .and_then(|p| p.file_name())
        .or_else(|| path.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Axis range padded so that constant series and single points still get a
/// non-degenerate scale.
fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
