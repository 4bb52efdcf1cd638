//! SVG line charts of summary CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::report::{read_csv, CellSummary};
use crate::{io_error, BenchError};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

type Metric = (&'static str, &'static str, fn(&CellSummary) -> Option<f64>);

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

/// Writes one SVG per metric for a summary CSV and returns their paths.
///
/// A file whose cells vary in gadget count is plotted against gadgets on
/// a log axis with one line per architecture; otherwise it is plotted
/// against qubits with one line per architecture family. The runtime
/// chart is skipped when the CSV carries no timings.
pub fn emit_plots(summary_csv: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let rows: Vec<CellSummary> = read_csv(summary_csv)?;
    let stem = summary_csv
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("bench")
        .trim_end_matches("_summary")
        .to_string();
    fs::create_dir_all(out_dir).map_err(io_error(out_dir))?;

    let mut gadget_values: Vec<usize> = rows.iter().map(|r| r.gadgets).collect();
    gadget_values.sort_unstable();
    gadget_values.dedup();
    let by_gadgets = gadget_values.len() > 1;

    let metrics: [Metric; 3] = [
        ("cx_count", "mean CX count", |r| Some(r.cx_count)),
        ("cx_depth", "mean CX depth", |r| Some(r.cx_depth)),
        ("runtime_s", "mean runtime (s)", |r| r.runtime_s),
    ];
    let mut written = Vec::new();
    for (key, label, value) in metrics {
        let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        let mut complete = true;
        for r in &rows {
            let Some(y) = value(r) else {
                complete = false;
                break;
            };
            let (name, x) = if by_gadgets {
                (r.arch.clone(), r.gadgets as f64)
            } else {
                let family = r.arch.rsplit_once('_').map_or(r.arch.as_str(), |(f, _)| f);
                (family.to_string(), r.qubits as f64)
            };
            series.entry(name).or_default().push((x, y));
        }
        if !complete {
            continue;
        }
        let chart = Chart {
            title: format!("{stem}: {label}"),
            x_label: if by_gadgets {
                "phase gadgets"
            } else {
                "qubits"
            }
            .to_string(),
            y_label: label.to_string(),
            log_x: by_gadgets,
            series: series
                .into_iter()
                .map(|(name, mut points)| {
                    points.sort_by(|a, b| a.0.total_cmp(&b.0));
                    Series { name, points }
                })
                .collect(),
        };
        let path = out_dir.join(format!("{stem}_{key}.svg"));
        fs::write(&path, render(&chart)?).map_err(io_error(&path))?;
        written.push(path);
    }
    Ok(written)
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    if v == v.round() && v.abs() < 1e9 {
        format!("{}", v as i64)
    } else if v.abs() >= 0.01 {
        format!("{v:.2}")
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders a chart as a standalone SVG document.
pub fn render(chart: &Chart) -> Result<String, BenchError> {
    let points: Vec<(f64, f64)> = chart
        .series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .collect();
    if points.is_empty() {
        return Err(BenchError::Plot("nothing to plot".into()));
    }
    if chart.log_x && points.iter().any(|p| p.0 <= 0.0) {
        return Err(BenchError::Plot("log axis needs positive x values".into()));
    }
    let tx = |x: f64| if chart.log_x { x.log10() } else { x };
    let (mut x0, mut x1) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(tx(p.0)), hi.max(tx(p.0)))
        });
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let y_max = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let y_step = nice_step(if y_max > 0.0 { y_max } else { 1.0 });
    let y1 = (y_max / y_step).ceil().max(1.0) * y_step;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y1 * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&chart.title)
    );

    // Y grid and ticks.
    let mut y = 0.0;
    while y <= y1 + y_step / 2.0 {
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#e0e0e0"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py + 4.0,
            fmt_tick(y)
        );
        y += y_step;
    }

    // X ticks at the data positions.
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for &x in &xs {
        let px = sx(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.1}" y1="{TOP}" x2="{px:.1}" y2="{:.1}" stroke="#f0f0f0"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 16.0,
            fmt_tick(x)
        );
    }

    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let x_label = if chart.log_x {
        format!("{} (log scale)", chart.x_label)
    } else {
        chart.x_label.clone()
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(&x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&chart.y_label)
    );

    for (i, s) in chart.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::write_csv;

    fn summary(
        arch: &str,
        qubits: usize,
        gadgets: usize,
        cx: f64,
        runtime: Option<f64>,
    ) -> CellSummary {
        CellSummary {
            arch: arch.into(),
            qubits,
            gadgets,
            instances: 20,
            cx_count: cx,
            cx_depth: cx / 2.0,
            runtime_s: runtime,
        }
    }

    #[test]
    fn three_metrics_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("gadget_scaling_summary.csv");
        let rows = vec![
            summary("line_36", 36, 1, 10.0, Some(0.01)),
            summary("line_36", 36, 10, 90.0, Some(0.02)),
            summary("complete_36", 36, 1, 5.0, Some(0.01)),
            summary("complete_36", 36, 10, 40.0, Some(0.03)),
        ];
        write_csv(&csv, &rows).unwrap();
        let files = emit_plots(&csv, dir.path()).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            [
                "gadget_scaling_cx_count.svg",
                "gadget_scaling_cx_depth.svg",
                "gadget_scaling_runtime_s.svg"
            ]
        );
        let svg = fs::read_to_string(&files[0]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("log scale"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn qubit_axis_groups_by_family() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("qubit_scaling_summary.csv");
        let rows = vec![
            summary("line_9", 9, 100, 300.0, None),
            summary("line_16", 16, 100, 500.0, None),
            summary("square_9", 9, 100, 250.0, None),
        ];
        write_csv(&csv, &rows).unwrap();
        let files = emit_plots(&csv, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let svg = fs::read_to_string(&files[0]).unwrap();
        assert!(!svg.contains("log scale"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_csv_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("empty.csv");
        fs::write(&csv, "").unwrap();
        assert!(emit_plots(&csv, dir.path()).is_err());
    }

    #[test]
    fn malformed_csv_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("bad.csv");
        fs::write(&csv, "arch,qubits\nline,notanumber\n").unwrap();
        assert!(emit_plots(&csv, dir.path()).is_err());
    }
}
