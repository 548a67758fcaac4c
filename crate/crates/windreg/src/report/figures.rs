//! Figure builders: the feature scatter matrix, the prediction overlay, and
//! per-model fit plots.

use chrono::NaiveDateTime;
use windreg_core::metrics;
use windreg_core::stats::pearson;

use super::svg::{ticks, LinearScale, SvgDocument};
use super::ReportError;
use crate::dataset::{Dataset, FEATURE_COUNT};

/// Display labels with units for the five canonical columns.
pub const COLUMN_LABELS: [&str; 5] = [
    "air temperature (°C)",
    "barometric pressure (hPa)",
    "wind direction (°)",
    "wind speed (m/s)",
    "wind power (kW)",
];

const POINT_COLOR: &str = "#4682b4";
const FRAME_COLOR: &str = "#bbbbbb";
const GRID_COLOR: &str = "#e8e8e8";
const BAR_COLOR: &str = "#9ecae1";
const SERIES_COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const HISTOGRAM_BINS: usize = 20;

fn series_range(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    (min, max)
}

/// 5×5 pairs plot of the dataset: histograms on the diagonal, scatter cells
/// with their Pearson correlation everywhere else.
pub fn scatter_matrix(dataset: &Dataset) -> Result<String, ReportError> {
    if dataset.rows() < 2 {
        return Err(ReportError::EmptyDataset);
    }
    let mut columns: Vec<Vec<f64>> =
        (0..FEATURE_COUNT).map(|j| dataset.features().column(j)).collect();
    columns.push(dataset.target().to_vec());
    let ranges: Vec<(f64, f64)> = columns.iter().map(|c| series_range(c)).collect();

    const CELL: f64 = 140.0;
    const GAP: f64 = 10.0;
    const LEFT: f64 = 70.0;
    const TOP: f64 = 16.0;
    const RIGHT: f64 = 16.0;
    const BOTTOM: f64 = 56.0;
    let k = columns.len();
    let grid = k as f64 * CELL + (k - 1) as f64 * GAP;
    let width = LEFT + grid + RIGHT;
    let height = TOP + grid + BOTTOM;

    let mut doc = SvgDocument::new(width, height);
    doc.rect(0.0, 0.0, width, height, "#ffffff", "none");
    for i in 0..k {
        for j in 0..k {
            let x0 = LEFT + j as f64 * (CELL + GAP);
            let y0 = TOP + i as f64 * (CELL + GAP);
            doc.rect(x0, y0, CELL, CELL, "none", FRAME_COLOR);
            if i == j {
                histogram_cell(&mut doc, x0, y0, CELL, &columns[i], ranges[i]);
            } else {
                let x_scale = LinearScale::new(ranges[j], (x0 + 4.0, x0 + CELL - 4.0));
                let y_scale = LinearScale::new(ranges[i], (y0 + CELL - 4.0, y0 + 4.0));
                for (&x, &y) in columns[j].iter().zip(&columns[i]) {
                    doc.circle(x_scale.apply(x), y_scale.apply(y), 1.0, POINT_COLOR);
                }
                let r = pearson(&columns[j], &columns[i]);
                doc.text(x0 + 5.0, y0 + 14.0, 10.0, "start", &format!("r = {r:.4}"));
            }
        }
    }
    for (j, label) in COLUMN_LABELS.iter().enumerate() {
        let center = LEFT + j as f64 * (CELL + GAP) + CELL / 2.0;
        doc.text(center, TOP + grid + 26.0, 11.0, "middle", label);
        doc.vertical_text(
            LEFT - 12.0,
            TOP + j as f64 * (CELL + GAP) + CELL / 2.0,
            11.0,
            "middle",
            label,
        );
    }
    Ok(doc.finish())
}

fn histogram_cell(
    doc: &mut SvgDocument,
    x0: f64,
    y0: f64,
    cell: f64,
    values: &[f64],
    (min, max): (f64, f64),
) {
    let mut counts = [0usize; HISTOGRAM_BINS];
    let span = max - min;
    for &v in values {
        let bin = if span == 0.0 {
            HISTOGRAM_BINS / 2
        } else {
            (((v - min) / span) * HISTOGRAM_BINS as f64) as usize
        };
        counts[bin.min(HISTOGRAM_BINS - 1)] += 1;
    }
    let peak = counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let bar_width = cell / HISTOGRAM_BINS as f64;
    for (b, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let bar_height = count as f64 / peak * (cell - 10.0);
        doc.rect(
            x0 + b as f64 * bar_width + 0.5,
            y0 + cell - bar_height,
            bar_width - 1.0,
            bar_height,
            BAR_COLOR,
            "none",
        );
    }
}

/// Actual power and one prediction series per model over a shared window,
/// one polyline each (so a series of n points has n vertices).
pub fn overlay_plot(
    timestamps: Option<&[NaiveDateTime]>,
    actual: &[f64],
    predictions: &[(String, Vec<f64>)],
) -> Result<String, ReportError> {
    if actual.len() < 2 {
        return Err(ReportError::LengthMismatch { expected: 2, found: actual.len() });
    }
    for (_, series) in predictions {
        if series.len() != actual.len() {
            return Err(ReportError::LengthMismatch {
                expected: actual.len(),
                found: series.len(),
            });
        }
    }
    if let Some(stamps) = timestamps {
        if stamps.len() != actual.len() {
            return Err(ReportError::LengthMismatch {
                expected: actual.len(),
                found: stamps.len(),
            });
        }
    }

    const W: f64 = 900.0;
    const H: f64 = 420.0;
    const L: f64 = 70.0;
    const R: f64 = 24.0;
    const T: f64 = 48.0;
    const B: f64 = 58.0;

    let (mut low, mut high) = series_range(actual);
    for (_, series) in predictions {
        let (s_low, s_high) = series_range(series);
        low = low.min(s_low);
        high = high.max(s_high);
    }
    let n = actual.len();
    let x_scale = LinearScale::new((0.0, (n - 1) as f64), (L, W - R));
    let y_scale = LinearScale::new((low, high), (H - B, T));

    let mut doc = SvgDocument::new(W, H);
    doc.rect(0.0, 0.0, W, H, "#ffffff", "none");
    for tick in ticks(&y_scale, 4) {
        let y = y_scale.apply(tick);
        doc.line(L, y, W - R, y, GRID_COLOR, 1.0);
        doc.text(L - 6.0, y + 3.5, 10.0, "end", &format!("{tick:.0}"));
    }
    doc.rect(L, T, W - R - L, H - B - T, "none", FRAME_COLOR);
    for index in [0, (n - 1) / 2, n - 1] {
        let x = x_scale.apply(index as f64);
        let label = match timestamps {
            Some(stamps) => stamps[index].format("%m-%d %H:%M").to_string(),
            None => index.to_string(),
        };
        doc.line(x, H - B, x, H - B + 4.0, FRAME_COLOR, 1.0);
        doc.text(x, H - B + 18.0, 10.0, "middle", &label);
    }

    let mut legend_x = L;
    let mut draw_series = |doc: &mut SvgDocument, name: &str, series: &[f64], color: &str| {
        let points: Vec<(f64, f64)> = series
            .iter()
            .enumerate()
            .map(|(i, &v)| (x_scale.apply(i as f64), y_scale.apply(v)))
            .collect();
        doc.polyline(&points, color, 1.4);
        doc.line(legend_x, 24.0, legend_x + 18.0, 24.0, color, 2.0);
        doc.text(legend_x + 23.0, 27.5, 11.0, "start", name);
        legend_x += 23.0 + 9.0 * name.len() as f64 + 22.0;
    };
    draw_series(&mut doc, "actual", actual, "#000000");
    for (i, (name, series)) in predictions.iter().enumerate() {
        draw_series(&mut doc, name, series, SERIES_COLORS[i % SERIES_COLORS.len()]);
    }

    doc.vertical_text(20.0, (T + H - B) / 2.0, 12.0, "middle", "wind power (kW)");
    let x_title = if timestamps.is_some() { "time" } else { "row" };
    doc.text((L + W - R) / 2.0, H - 10.0, 12.0, "middle", x_title);
    Ok(doc.finish())
}

/// Scatter of (actual, predicted) with the y = x reference line and the
/// coefficient of determination annotated to three decimals.
pub fn fit_plot(
    actual: &[f64],
    predicted: &[f64],
    model_name: &str,
) -> Result<String, ReportError> {
    if actual.len() != predicted.len() {
        return Err(ReportError::LengthMismatch { expected: actual.len(), found: predicted.len() });
    }
    if actual.len() < 2 {
        return Err(ReportError::LengthMismatch { expected: 2, found: actual.len() });
    }
    let r2 = metrics::r2_score(actual, predicted)
        .map_err(|e| ReportError::IncompleteResults(e.to_string()))?;

    const W: f64 = 480.0;
    const H: f64 = 480.0;
    const L: f64 = 70.0;
    const R: f64 = 24.0;
    const T: f64 = 46.0;
    const B: f64 = 58.0;

    let (a_low, a_high) = series_range(actual);
    let (p_low, p_high) = series_range(predicted);
    let low = a_low.min(p_low);
    let high = a_high.max(p_high);
    let pad = 0.02 * (high - low);
    let x_scale = LinearScale::new((low - pad, high + pad), (L, W - R));
    let y_scale = LinearScale::new((low - pad, high + pad), (H - B, T));

    let mut doc = SvgDocument::new(W, H);
    doc.rect(0.0, 0.0, W, H, "#ffffff", "none");
    for tick in ticks(&x_scale, 4) {
        let x = x_scale.apply(tick);
        let y = y_scale.apply(tick);
        doc.line(x, T, x, H - B, GRID_COLOR, 1.0);
        doc.line(L, y, W - R, y, GRID_COLOR, 1.0);
        doc.text(x, H - B + 16.0, 10.0, "middle", &format!("{tick:.0}"));
        doc.text(L - 6.0, y + 3.5, 10.0, "end", &format!("{tick:.0}"));
    }
    doc.rect(L, T, W - R - L, H - B - T, "none", FRAME_COLOR);
    let (d0, d1) = x_scale.domain();
    doc.dashed_line(
        x_scale.apply(d0),
        y_scale.apply(d0),
        x_scale.apply(d1),
        y_scale.apply(d1),
        "#555555",
        1.0,
    );
    for (&x, &y) in actual.iter().zip(predicted) {
        doc.circle(x_scale.apply(x), y_scale.apply(y), 2.0, POINT_COLOR);
    }
    doc.text(W / 2.0, 22.0, 14.0, "middle", model_name);
    doc.text(L + 10.0, T + 20.0, 13.0, "start", &format!("R\u{b2} = {r2:.3}"));
    doc.text((L + W - R) / 2.0, H - 10.0, 12.0, "middle", "actual (kW)");
    doc.vertical_text(20.0, (T + H - B) / 2.0, 12.0, "middle", "predicted (kW)");
    Ok(doc.finish())
}
