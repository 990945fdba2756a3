//! Log-log plots of the suite series, with the plotted data as CSV.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::config::SCHEMA_VERSION;
use crate::error::{CliError, Result};
use crate::formats::{num, write_file, Table, BUILD_ID};
use crate::suites::Suite;

/// The curves drawn for each instance, with their colors; the left side is drawn last.
const CURVES: [(&str, &str, RGBColor); 3] = [
    ("width", "width bound", RGBColor(44, 160, 44)),
    ("rhs", "theorem right side", RGBColor(214, 39, 40)),
    ("lhs", "left side (sigma)", RGBColor(31, 119, 180)),
];

#[derive(Debug, Default)]
pub struct PlotOutcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// One plotted point: x = n + 1 so that n = 0 fits on log axes.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotPoint {
    pub curve: String,
    pub instance: String,
    pub n: usize,
    pub x: f64,
    pub y: f64,
}

/// Positive finite points of a suite's series table.
pub fn plot_points(series: &Table) -> Result<Vec<PlotPoint>> {
    let col = |name: &str| {
        series
            .column(name)
            .ok_or_else(|| CliError::config(format!("series table has no {name} column")))
    };
    let (ci, cn) = (col("instance")?, col("n")?);
    let mut points = Vec::new();
    for (curve, _, _) in CURVES {
        let cy = col(curve)?;
        for row in &series.rows {
            let Ok(y) = row[cy].parse::<f64>() else {
                continue;
            };
            let n: usize = row[cn].parse().map_err(|_| {
                CliError::config(format!("bad index {:?} in series table", row[cn]))
            })?;
            if y > 0.0 && y.is_finite() {
                points.push(PlotPoint {
                    curve: curve.into(),
                    instance: row[ci].clone(),
                    n,
                    x: (n + 1) as f64,
                    y,
                });
            }
        }
    }
    Ok(points)
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn padded_log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi <= lo {
        (lo / 2.0, lo * 2.0)
    } else {
        (lo / 1.25, hi * 1.25)
    }
}

fn render_svg(title: &str, points: &[PlotPoint]) -> Result<String> {
    let plot_err = |e: &dyn std::fmt::Display| CliError::Plot(e.to_string());
    let (x0, x1) = padded_log_range(points.iter().map(|p| p.x));
    let (y0, y1) = padded_log_range(points.iter().map(|p| p.y));
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (900, 640)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| plot_err(&e))?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 22))
            .margin(16)
            .x_label_area_size(44)
            .y_label_area_size(72)
            .build_cartesian_2d((x0..x1).log_scale(), (y0..y1).log_scale())
            .map_err(|e| plot_err(&e))?;
        chart
            .configure_mesh()
            .x_desc("n + 1")
            .y_desc("value")
            .draw()
            .map_err(|e| plot_err(&e))?;
        for (curve, legend, color) in CURVES {
            let mut by_instance: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
            for p in points.iter().filter(|p| p.curve == curve) {
                by_instance.entry(&p.instance).or_default().push((p.x, p.y));
            }
            let mut labelled = false;
            for line in by_instance.into_values() {
                let series = chart
                    .draw_series(LineSeries::new(line, color.stroke_width(1)))
                    .map_err(|e| plot_err(&e))?;
                if !labelled {
                    series.label(legend).legend(move |(x, y)| {
                        PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
                    });
                    labelled = true;
                }
            }
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.85))
            .border_style(BLACK)
            .draw()
            .map_err(|e| plot_err(&e))?;
        root.present().map_err(|e| plot_err(&e))?;
    }
    let provenance = format!("<!-- schema_version={SCHEMA_VERSION} build={BUILD_ID} -->\n");
    Ok(match svg.find('\n') {
        Some(i) if svg.starts_with("<?xml") => {
            format!("{}{}{}", &svg[..=i], provenance, &svg[i + 1..])
        }
        _ => provenance + &svg,
    })
}

/// Writes `<suite>.svg` and `<suite>.csv` into `out` for every suite directory of `reports` with a series.
pub fn emit_plots(reports: &Path, out: &Path) -> Result<PlotOutcome> {
    let mut outcome = PlotOutcome::default();
    for suite in Suite::EACH {
        let series_path = reports.join(suite.name()).join("series.csv");
        if !series_path.is_file() {
            continue;
        }
        let series = Table::read(&series_path)?;
        let points = plot_points(&series)?;
        if points.is_empty() {
            outcome.warnings.push(format!(
                "{}: the series has no positive values to plot",
                suite.name()
            ));
            continue;
        }
        let mut data = Table::new(&["curve", "instance", "n", "x", "y"]);
        for p in &points {
            data.push(vec![
                p.curve.clone(),
                p.instance.clone(),
                p.n.to_string(),
                num(p.x),
                num(p.y),
            ]);
        }
        let csv_path = out.join(format!("{}.csv", suite.name()));
        write_file(&csv_path, &data.to_csv())?;
        let svg_path = out.join(format!("{}.svg", suite.name()));
        write_file(&svg_path, &render_svg(suite.name(), &points)?)?;
        outcome.files.push(svg_path);
        outcome.files.push(csv_path);
    }
    if outcome.files.is_empty() && outcome.warnings.is_empty() {
        outcome.warnings.push(format!(
            "{}: no suite series found, nothing plotted",
            reports.display()
        ));
    }
    Ok(outcome)
}
