//! Line charts of a table as SVG.

use cavity_singlet::observables::TimeSeries;
use plotters::prelude::*;

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    Some((lo - pad, hi + pad))
}

/// Every column except standard errors against the index. Non-finite
/// samples break the line.
pub fn render_svg(series: &TimeSeries, title: &str) -> Result<String, String> {
    let columns: Vec<_> = series.columns.iter().filter(|c| !c.name.ends_with("_se")).collect();
    let x_range = finite_range(series.index.iter().copied()).unwrap_or((0.0, 1.0));
    let y_range = finite_range(columns.iter().flat_map(|c| c.values.iter().copied())).unwrap_or((0.0, 1.0));
    let mut out = String::new();
    {
        let root = SVGBackend::with_string(&mut out, (800, 500)).into_drawing_area();
        let err = |e: DrawingAreaErrorKind<_>| format!("plot: {e:?}");
        root.fill(&WHITE).map_err(err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(15)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(x_range.0..x_range.1, y_range.0..y_range.1)
            .map_err(err)?;
        chart
            .configure_mesh()
            .x_desc(series.index_name.as_str())
            .draw()
            .map_err(err)?;
        for (k, c) in columns.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for (&x, &y) in series.index.iter().zip(&c.values) {
                if y.is_finite() {
                    segments.last_mut().expect("nonempty").push((x, y));
                } else if !segments.last().expect("nonempty").is_empty() {
                    segments.push(Vec::new());
                }
            }
            for (i, seg) in segments.into_iter().enumerate() {
                let drawn = chart.draw_series(LineSeries::new(seg, color.stroke_width(2))).map_err(err)?;
                if i == 0 {
                    drawn
                        .label(c.name.as_str())
                        .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
                }
            }
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(err)?;
        root.present().map_err(err)?;
    }
    Ok(out)
}
