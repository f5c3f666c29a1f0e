//! Self-contained SVG panels derived from batch summaries or previously
//! emitted CSV files: action frequencies, food and satiety trajectories,
//! and survival per run. Rendering is deterministic for fixed input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::BatchSummary;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

/// One named line on a chart.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Render a single line chart as a standalone SVG document.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    y_range: (f64, f64),
    series: &[Series],
) -> String {
    let (y_min, y_max) = y_range;
    let x_min = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(f64::INFINITY, f64::min);
    let x_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let x_span = if (x_max - x_min).abs() < 1e-12 {
        1.0
    } else {
        x_max - x_min
    };
    let y_span = if (y_max - y_min).abs() < 1e-12 {
        1.0
    } else {
        y_max - y_min
    };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_min) / x_span * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - (y - y_min) / y_span * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );

    // Axes.
    let _ = writeln!(
        svg,
        r#"<line x1="{l:.2}" y1="{t:.2}" x2="{l:.2}" y2="{b:.2}" stroke="black"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{l:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black"/>"#,
        l = MARGIN_LEFT,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    );

    // Ticks: x at integers when few, else 5 evenly spaced; y always 5.
    let x_ticks: Vec<f64> = if x_span <= 12.0 && x_min.fract() == 0.0 {
        (x_min as i64..=x_max as i64).map(|v| v as f64).collect()
    } else {
        (0..=4).map(|i| x_min + x_span * i as f64 / 4.0).collect()
    };
    for tx in x_ticks {
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{b:.2}" x2="{x:.2}" y2="{b2:.2}" stroke="black"/><text x="{x:.2}" y="{ty:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{tx}</text>"#,
            x = sx(tx),
            b = MARGIN_TOP + plot_h,
            b2 = MARGIN_TOP + plot_h + 5.0,
            ty = MARGIN_TOP + plot_h + 18.0,
        );
    }
    for i in 0..=4 {
        let vy = y_min + y_span * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x1:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke="black"/><text x="{tx:.2}" y="{ty:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{vy:.2}</text>"#,
            x1 = MARGIN_LEFT - 5.0,
            x2 = MARGIN_LEFT,
            y = sy(vy),
            tx = MARGIN_LEFT - 8.0,
            ty = sy(vy) + 4.0,
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{y:.2}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {y:.2})">{y_label}</text>"#,
        y = MARGIN_TOP + plot_h / 2.0
    );

    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"];
    for (i, s) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let mut path = String::new();
        for &(x, y) in &s.points {
            let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y.clamp(y_min, y_max)));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.trim_end()
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sx(x),
                sy(y.clamp(y_min, y_max))
            );
        }
        if series.len() > 1 {
            let lx = MARGIN_LEFT + plot_w - 150.0;
            let ly = MARGIN_TOP + 16.0 * (i as f64 + 1.0);
            let _ = writeln!(
                svg,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                lx + 22.0,
                lx + 28.0,
                ly + 4.0,
                s.label
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn write_svg(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    fs::write(path, content).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

struct PanelData {
    scenario_id: String,
    steps: Vec<f64>,
    eat_frequency: Vec<f64>,
    mean_food: Vec<f64>,
    mean_satiety: Vec<f64>,
    /// Mean survival across agents per run index; empty for single runs.
    survival_per_run: Vec<f64>,
    timesteps: usize,
}

fn render_panels(data: &PanelData, dir: &Path) -> Result<Vec<PathBuf>> {
    if data.steps.is_empty() {
        return Err(Error::InvalidInput("empty summary: nothing to plot".into()));
    }
    let points = |ys: &[f64]| {
        data.steps
            .iter()
            .cloned()
            .zip(ys.iter().cloned())
            .collect::<Vec<_>>()
    };
    let mut written = Vec::new();

    let panels = [
        (
            "actions.svg",
            line_chart(
                &format!("{}: eat frequency", data.scenario_id),
                "timestep",
                "fraction eating",
                (0.0, 1.0),
                &[Series {
                    label: "eat frequency".into(),
                    points: points(&data.eat_frequency),
                }],
            ),
        ),
        (
            "food.svg",
            line_chart(
                &format!("{}: food level", data.scenario_id),
                "timestep",
                "mean food level",
                (0.0, data.mean_food.iter().cloned().fold(1.0, f64::max)),
                &[Series {
                    label: "food".into(),
                    points: points(&data.mean_food),
                }],
            ),
        ),
        (
            "satiety.svg",
            line_chart(
                &format!("{}: satiety level", data.scenario_id),
                "timestep",
                "mean satiety level",
                (0.0, data.mean_satiety.iter().cloned().fold(1.0, f64::max)),
                &[Series {
                    label: "satiety".into(),
                    points: points(&data.mean_satiety),
                }],
            ),
        ),
    ];
    for (name, svg) in panels {
        let path = dir.join(name);
        write_svg(&path, &svg)?;
        written.push(path);
    }

    if data.survival_per_run.len() > 1 {
        let path = dir.join("survival.svg");
        write_svg(
            &path,
            &line_chart(
                &format!("{}: survival per run", data.scenario_id),
                "run",
                "mean survival (steps)",
                (0.0, data.timesteps as f64),
                &[Series {
                    label: "mean survival".into(),
                    points: data
                        .survival_per_run
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| (i as f64, s))
                        .collect(),
                }],
            ),
        )?;
        written.push(path);
    }
    Ok(written)
}

/// Write the panel set for a batch summary into `dir`.
pub fn emit_plots(summary: &BatchSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    if summary.survival.is_empty() || summary.runs_alive.iter().all(|&n| n == 0) {
        return Err(Error::InvalidInput("empty summary: nothing to plot".into()));
    }
    let recorded = summary
        .runs_alive
        .iter()
        .rposition(|&n| n > 0)
        .map(|i| i + 1)
        .unwrap_or(0);
    let survival_per_run = if summary.num_runs_per_agent > 1 {
        (0..summary.num_runs_per_agent)
            .map(|j| summary.mean_survival_of_run(j))
            .collect()
    } else {
        Vec::new()
    };
    render_panels(
        &PanelData {
            scenario_id: summary.scenario_id.clone(),
            steps: (0..recorded).map(|t| t as f64).collect(),
            eat_frequency: summary.eat_frequency[..recorded].to_vec(),
            mean_food: summary.mean_food[..recorded].to_vec(),
            mean_satiety: summary.mean_satiety[..recorded].to_vec(),
            survival_per_run,
            timesteps: summary.timesteps,
        },
        dir,
    )
}

fn parse_csv(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Ok(text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect())
}

fn field<T: std::str::FromStr>(row: &[String], idx: usize, path: &Path) -> Result<T> {
    row.get(idx)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Config(format!("malformed row in {}", path.display())))
}

/// Rebuild the panel set from `survival.csv` and `timeseries.csv` in `dir`
/// (as written by the `run` subcommand) and write the SVGs next to them.
pub fn plot_from_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let ts_path = dir.join("timeseries.csv");
    let sv_path = dir.join("survival.csv");
    let ts_rows = parse_csv(&ts_path)?;
    let sv_rows = parse_csv(&sv_path)?;
    if ts_rows.is_empty() || sv_rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no data rows under {}",
            dir.display()
        )));
    }

    let mut steps = Vec::new();
    let mut eat = Vec::new();
    let mut food = Vec::new();
    let mut satiety = Vec::new();
    let mut recorded = 0usize;
    for row in &ts_rows {
        let alive: usize = field(row, 1, &ts_path)?;
        if alive == 0 {
            continue;
        }
        recorded += 1;
        steps.push(field::<f64>(row, 0, &ts_path)?);
        eat.push(field(row, 2, &ts_path)?);
        food.push(field(row, 3, &ts_path)?);
        satiety.push(field(row, 4, &ts_path)?);
    }

    let scenario_id = sv_rows[0][0].clone();
    let mut per_run: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for row in &sv_rows {
        let run: usize = field(row, 2, &sv_path)?;
        let survival: f64 = field(row, 3, &sv_path)?;
        per_run.entry(run).or_default().push(survival);
    }
    let survival_per_run: Vec<f64> = if per_run.len() > 1 {
        per_run
            .values()
            .map(|v| v.iter().sum::<f64>() / v.len() as f64)
            .collect()
    } else {
        Vec::new()
    };

    render_panels(
        &PanelData {
            scenario_id,
            steps,
            eat_frequency: eat,
            mean_food: food,
            mean_satiety: satiety,
            survival_per_run,
            timesteps: recorded.max(ts_rows.len()),
        },
        dir,
    )
}
