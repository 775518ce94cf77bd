//! Static SVG plots over result CSVs.
//!
//! Rendering is a pure function of the CSV text: fixed canvas, fixed
//! palette, coordinates printed at two decimals, series sorted by label.
//! Identical input therefore yields byte-identical SVG, which makes the
//! artifacts diffable and golden-testable.
//!
//! Space sweeps aggregate trials per (algorithm, space) into a mean line
//! with a one-standard-deviation band; longitudinal plots read the trial
//! column as a stream index and require the CSV to contain a single
//! space value. Rows whose selected metric is NaN (infeasible cells) are
//! skipped.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// x = space, one aggregated point per (algorithm, space).
    SpaceSweep,
    /// x = trial index at one fixed space.
    Longitudinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    Weighted,
    Unweighted,
}

impl PlotMetric {
    fn column(self) -> &'static str {
        match self {
            PlotMetric::Weighted => "weighted_error",
            PlotMetric::Unweighted => "unweighted_error",
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            PlotMetric::Weighted => "weighted error",
            PlotMetric::Unweighted => "unweighted error",
        }
    }
}

struct Row {
    algorithm: String,
    space: usize,
    trial: usize,
    value: f64,
}

fn parse_rows(csv: &str, metric: PlotMetric) -> Result<Vec<Row>> {
    let mut lines = csv.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Schema("empty input, expected a CSV header".to_string()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let index_of = |name: &str| -> Result<usize> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Schema(format!("missing required column {name:?}")))
    };
    let algo_idx = index_of("algorithm")?;
    let space_idx = index_of("space")?;
    let trial_idx = index_of("trial")?;
    let value_idx = index_of(metric.column())?;
    let needed = algo_idx.max(space_idx).max(trial_idx).max(value_idx);

    let mut rows = Vec::new();
    for (offset, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = offset + 2;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() <= needed {
            return Err(Error::Schema(format!(
                "line {lineno}: expected at least {} fields, got {}",
                needed + 1,
                fields.len()
            )));
        }
        let space: usize = fields[space_idx]
            .parse()
            .map_err(|_| Error::Schema(format!("line {lineno}: bad space value")))?;
        let trial: usize = fields[trial_idx]
            .parse()
            .map_err(|_| Error::Schema(format!("line {lineno}: bad trial value")))?;
        let value: f64 = fields[value_idx]
            .parse()
            .map_err(|_| Error::Schema(format!("line {lineno}: bad {} value", metric.column())))?;
        if value.is_nan() {
            continue;
        }
        rows.push(Row {
            algorithm: fields[algo_idx].to_string(),
            space,
            trial,
            value,
        });
    }
    Ok(rows)
}

struct SeriesPoint {
    x: f64,
    mean: f64,
    /// Sample standard deviation; None with a single observation.
    std: Option<f64>,
}

/// (label, points sorted by x) pairs sorted by label.
fn aggregate(rows: &[Row], kind: PlotKind) -> Result<Vec<(String, Vec<SeriesPoint>)>> {
    if kind == PlotKind::Longitudinal {
        let spaces: std::collections::BTreeSet<usize> = rows.iter().map(|r| r.space).collect();
        if spaces.len() > 1 {
            return Err(Error::Schema(format!(
                "longitudinal plots need one fixed space, found {spaces:?}; filter the CSV first"
            )));
        }
    }
    let mut groups: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        let x = match kind {
            PlotKind::SpaceSweep => r.space,
            PlotKind::Longitudinal => r.trial,
        };
        groups
            .entry((r.algorithm.clone(), x))
            .or_default()
            .push(r.value);
    }
    let mut series: BTreeMap<String, Vec<SeriesPoint>> = BTreeMap::new();
    for ((label, x), values) in groups {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            Some(var.sqrt())
        } else {
            None
        };
        series.entry(label).or_default().push(SeriesPoint {
            x: x as f64,
            mean,
            std,
        });
    }
    // BTreeMap grouping already ordered points by x within each label.
    Ok(series.into_iter().collect())
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 640.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 450.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Largest of 1, 2, 5 times a power of ten not smaller than `raw`.
fn nice_step(raw: f64) -> f64 {
    if raw.is_nan() || raw <= 0.0 {
        return 1.0;
    }
    let base = 10f64.powf(raw.log10().floor());
    let frac = raw / base;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * base
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the CSV text to a complete SVG document.
pub fn render_plot(csv: &str, kind: PlotKind, metric: PlotMetric) -> Result<String> {
    let rows = parse_rows(csv, metric)?;
    let series = aggregate(&rows, kind)?;

    // Data ranges. Error metrics are nonnegative, so y starts at 0; bands
    // clamp there too.
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_max = 0f64;
    for (_, points) in &series {
        for p in points {
            x_min = x_min.min(p.x);
            x_max = x_max.max(p.x);
            y_max = y_max.max(p.mean + p.std.unwrap_or(0.0));
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
    }
    if x_min == x_max {
        let pad = (x_min.abs() * 0.1).max(1.0);
        x_min -= pad;
        x_max += pad;
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    y_max *= 1.05;

    let px = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * (RIGHT - LEFT);
    let py = |y: f64| BOTTOM - y / y_max * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(LEFT),
        fmt(BOTTOM),
        fmt(RIGHT),
        fmt(BOTTOM)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(LEFT),
        fmt(TOP),
        fmt(LEFT),
        fmt(BOTTOM)
    ));

    // Ticks.
    let x_step = nice_step((x_max - x_min) / 5.0);
    let mut tick = (x_min / x_step).ceil() * x_step;
    while tick <= x_max + 1e-9 {
        let x = px(tick);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            fmt(x),
            fmt(BOTTOM),
            fmt(BOTTOM + 5.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt(x),
            fmt(BOTTOM + 18.0),
            tick
        ));
        tick += x_step;
    }
    let y_step = nice_step(y_max / 5.0);
    let mut tick = 0.0;
    while tick <= y_max + 1e-9 {
        let y = py(tick);
        svg.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"black\"/>\n",
            fmt(y),
            fmt(LEFT - 5.0),
            fmt(LEFT)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fmt(LEFT - 8.0),
            fmt(y + 4.0),
            tick
        ));
        tick += y_step;
    }

    // Axis labels.
    let x_label = match kind {
        PlotKind::SpaceSweep => "space (total counters)",
        PlotKind::Longitudinal => "stream index",
    };
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        fmt((LEFT + RIGHT) / 2.0),
        fmt(HEIGHT - 10.0),
        x_label
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        fmt((TOP + BOTTOM) / 2.0),
        fmt((TOP + BOTTOM) / 2.0),
        metric.axis_label()
    ));

    // Series: band first so lines and markers draw on top.
    for (i, (label, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let banded: Vec<&SeriesPoint> = points.iter().filter(|p| p.std.is_some()).collect();
        if banded.len() > 1 {
            let mut poly = String::new();
            for p in &banded {
                poly.push_str(&format!(
                    "{},{} ",
                    fmt(px(p.x)),
                    fmt(py(p.mean + p.std.unwrap()))
                ));
            }
            for p in banded.iter().rev() {
                poly.push_str(&format!(
                    "{},{} ",
                    fmt(px(p.x)),
                    fmt(py((p.mean - p.std.unwrap()).max(0.0)))
                ));
            }
            svg.push_str(&format!(
                "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
                poly.trim_end(),
                color
            ));
        }
        if points.len() > 1 {
            let line: Vec<String> = points
                .iter()
                .map(|p| format!("{},{}", fmt(px(p.x)), fmt(py(p.mean))))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                line.join(" "),
                color
            ));
        }
        for p in points {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n",
                fmt(px(p.x)),
                fmt(py(p.mean)),
                color
            ));
        }
        // Legend row.
        let ly = TOP + 10.0 + i as f64 * 18.0;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
            fmt(RIGHT + 12.0),
            fmt(ly - 10.0),
            color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt(RIGHT + 30.0),
            fmt(ly),
            label
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads a CSV file and writes the rendered SVG next to it.
pub fn emit_plot(
    csv_path: &Path,
    kind: PlotKind,
    metric: PlotMetric,
    out_path: &Path,
) -> Result<()> {
    let csv = std::fs::read_to_string(csv_path).map_err(|source| Error::Io {
        path: csv_path.to_path_buf(),
        source,
    })?;
    let svg = render_plot(&csv, kind, metric)?;
    std::fs::write(out_path, svg).map_err(|source| Error::Io {
        path: out_path.to_path_buf(),
        source,
    })
}
