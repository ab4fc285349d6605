use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::error::{Error, Result};
use crate::evaluator::OutputKind;

use super::archive::DesignArchive;
use super::config::CampaignConfig;
use super::optimize::{PARETO_FILE, RUNS_DIR, TRACE_FILE};
use super::MODELS_DIR;

pub const PLOTS_DIR: &str = "plots";

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 280.0;
const MARGIN: f64 = 52.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mark {
    Dots,
    Line,
}

#[derive(Debug, Clone)]
struct Series {
    points: Vec<(f64, f64)>,
    mark: Mark,
    color: &'static str,
}

#[derive(Debug, Clone, Default)]
struct Panel {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<Series>,
    /// Horizontal reference line, e.g. the base design.
    h_line: Option<f64>,
    diagonal: bool,
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len() as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{PANEL_H}\" viewBox=\"0 0 {width} {PANEL_H}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (i, p) in panels.iter().enumerate() {
        let ox = i as f64 * PANEL_W;
        let all = || p.series.iter().flat_map(|s| s.points.iter());
        let (mut x0, mut x1) = extent(all().map(|q| q.0));
        let (mut y0, mut y1) = extent(all().map(|q| q.1).chain(p.h_line));
        if p.diagonal {
            x0 = x0.min(y0);
            y0 = x0;
            x1 = x1.max(y1);
            y1 = x1;
        }
        let (left, right) = (ox + MARGIN, ox + PANEL_W - 12.0);
        let (top, bottom) = (28.0, PANEL_H - 40.0);
        let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
        let py = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

        let _ = writeln!(s, "<g class=\"panel\">");
        let _ = writeln!(s, "<text x=\"{}\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">{}</text>", ox + PANEL_W / 2.0, escape(&p.title));
        let _ = writeln!(s, "<rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#444\"/>", right - left, bottom - top);
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", px(fx), bottom + 14.0, tick(fx));
            let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>", left - 4.0, py(fy) + 4.0, tick(fy));
        }
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", (left + right) / 2.0, PANEL_H - 8.0, escape(&p.x_label));
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>",
            ox + 12.0,
            (top + bottom) / 2.0,
            ox + 12.0,
            (top + bottom) / 2.0,
            escape(&p.y_label)
        );
        if p.diagonal {
            let _ = writeln!(s, "<line class=\"diagonal\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>", px(x0), py(x0), px(x1), py(x1));
        }
        if let Some(h) = p.h_line {
            let _ = writeln!(s, "<line class=\"base\" x1=\"{left:.2}\" y1=\"{:.2}\" x2=\"{right:.2}\" y2=\"{:.2}\" stroke=\"#000\" stroke-width=\"1.5\"/>", py(h), py(h));
        }
        for series in &p.series {
            match series.mark {
                Mark::Dots => {
                    for &(x, y) in series.points.iter().filter(|q| q.0.is_finite() && q.1.is_finite()) {
                        let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.7\"/>", px(x), py(y), series.color);
                    }
                }
                Mark::Line => {
                    let pts: Vec<String> = series
                        .points
                        .iter()
                        .filter(|q| q.0.is_finite() && q.1.is_finite())
                        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                        .collect();
                    let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>", pts.join(" "), series.color);
                }
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Result<Vec<f64>> {
    let j = header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Data(format!("column {name} missing")))?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            r[j].parse().map_err(|_| Error::Parse {
                row: i + 1,
                message: format!("bad {name} value `{}`", r[j]),
            })
        })
        .collect()
}

fn trace_panel(run: &str, path: &Path) -> Result<Panel> {
    let (h, rows) = read_csv(path)?;
    let it = column(&h, &rows, "iteration")?;
    let best = column(&h, &rows, "best_value")?;
    Ok(Panel {
        title: format!("convergence: {run}"),
        x_label: "iteration".into(),
        y_label: "best objective".into(),
        series: vec![Series {
            points: it.into_iter().zip(best).collect(),
            mark: Mark::Line,
            color: COLORS[0],
        }],
        ..Panel::default()
    })
}

/// Objectives named in a run directory tag such as `max_rft-min_sedt-pso-proxy-pareto`.
fn objectives_from_tag(run: &str) -> Vec<(String, OutputKind)> {
    run.split('-')
        .filter_map(|t| {
            let (verb, name) = t.split_once('_')?;
            let kind = name.parse::<OutputKind>().ok()?;
            matches!(verb, "min" | "max" | "target").then(|| (t.to_string(), kind))
        })
        .collect()
}

fn pareto_panels(run: &str, path: &Path) -> Result<Vec<Panel>> {
    let (h, rows) = read_csv(path)?;
    let objectives = objectives_from_tag(run);
    let kinds: Vec<OutputKind> = if objectives.len() >= 2 {
        objectives.iter().map(|o| o.1).collect()
    } else {
        vec![OutputKind::Rft, OutputKind::Sedt]
    };
    let first = column(&h, &rows, kinds[0].name())?;
    kinds[1..]
        .iter()
        .take(2)
        .enumerate()
        .map(|(i, k)| {
            let other = column(&h, &rows, k.name())?;
            Ok(Panel {
                title: format!("Pareto front: {run}"),
                x_label: kinds[0].name().into(),
                y_label: k.name().into(),
                series: vec![Series {
                    points: first.iter().copied().zip(other).collect(),
                    mark: Mark::Dots,
                    color: COLORS[i + 1],
                }],
                ..Panel::default()
            })
        })
        .collect()
}

fn parity_panels(path: &Path) -> Result<Vec<Panel>> {
    let (h, rows) = read_csv(path)?;
    let t = column(&h, &rows, "y_true")?;
    let p = column(&h, &rows, "y_pred")?;
    Ok(OutputKind::ALL
        .iter()
        .enumerate()
        .filter_map(|(i, k)| {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .zip(t.iter().zip(&p))
                .filter(|(r, _)| r[0] == k.name())
                .map(|(_, (a, b))| (*a, *b))
                .collect();
            (!points.is_empty()).then(|| Panel {
                title: format!("parity: {k}"),
                x_label: "true".into(),
                y_label: "predicted".into(),
                series: vec![Series {
                    points,
                    mark: Mark::Dots,
                    color: COLORS[i],
                }],
                diagonal: true,
                ..Panel::default()
            })
        })
        .collect())
}

fn strip_panels(archive: &DesignArchive) -> Vec<Panel> {
    let base = archive.base_record();
    OutputKind::ALL
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let points: Vec<(f64, f64)> = archive
                .designs()
                .iter()
                .filter_map(|d| d.training_record())
                .enumerate()
                // Deterministic horizontal jitter.
                .map(|(j, r)| (((j * 37) % 100) as f64 / 100.0, r.get(k)))
                .collect();
            Panel {
                title: format!("distribution: {k}"),
                x_label: "design (jittered)".into(),
                y_label: k.name().into(),
                series: vec![Series {
                    points,
                    mark: Mark::Dots,
                    color: COLORS[i],
                }],
                h_line: Some(base.get(k)),
                ..Panel::default()
            }
        })
        .collect()
}

fn sorted_runs(out: &Path) -> Result<Vec<PathBuf>> {
    let runs = out.join(RUNS_DIR);
    if !runs.is_dir() {
        return Ok(Vec::new());
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(&runs)
        .map_err(|e| Error::io(&runs, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    Ok(dirs)
}

/// Renders every artifact found under the campaign directory to SVG in
/// `plots/`: convergence traces, output distributions with the base design
/// marked, parity plots and Pareto projections. Returns the written files;
/// an empty campaign writes nothing.
pub fn cmd_export(config: &CampaignConfig) -> Result<Vec<PathBuf>> {
    let out = &config.out;
    let mut figures: Vec<(String, Vec<Panel>)> = Vec::new();
    for run in sorted_runs(out)? {
        let name = run.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if run.join(TRACE_FILE).is_file() {
            figures.push((format!("{name}-trace"), vec![trace_panel(&name, &run.join(TRACE_FILE))?]));
        }
        if run.join(PARETO_FILE).is_file() {
            let panels = pareto_panels(&name, &run.join(PARETO_FILE))?;
            if !panels.is_empty() && panels.iter().any(|p| !p.series[0].points.is_empty()) {
                figures.push((format!("{name}-front"), panels));
            }
        }
    }
    let parity = out.join(MODELS_DIR).join("parity.csv");
    if parity.is_file() {
        let panels = parity_panels(&parity)?;
        if !panels.is_empty() {
            figures.push(("parity".into(), panels));
        }
    }
    if out.join("manifest.json").is_file() {
        let archive = DesignArchive::open(out)?;
        if archive.designs().iter().any(|d| d.training_record().is_some()) {
            figures.push(("distributions".into(), strip_panels(&archive)));
        }
    }
    if figures.is_empty() {
        warn!("nothing to export under {}", out.display());
        return Ok(Vec::new());
    }
    let dir = out.join(PLOTS_DIR);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut written = Vec::new();
    for (name, panels) in figures {
        let path = dir.join(format!("{name}.svg"));
        fs::write(&path, render(&panels)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    info!("wrote {} figures to {}", written.len(), dir.display());
    Ok(written)
}
