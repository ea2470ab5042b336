//! Static SVG chart of coverage curves.

use plotters::prelude::*;

use super::curve::CoverageCurve;
use super::MetricError;

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

fn plot_err(e: impl std::fmt::Display) -> MetricError {
    MetricError::Plot(e.to_string())
}

/// Mean hit rate (solid) and Recall@1 (dashed) per strategy against the
/// number of videos.
pub fn render_svg(curves: &[CoverageCurve]) -> Result<String, MetricError> {
    let max_x = curves
        .iter()
        .flat_map(|c| c.mean.iter().map(|p| p.video_count))
        .max()
        .unwrap_or(1)
        .max(1);
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (800, 500)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .margin(20)
            .x_label_area_size(40)
            .y_label_area_size(50)
            .build_cartesian_2d(0usize..max_x, 0f64..1.0)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc("videos available")
            .y_desc("score")
            .draw()
            .map_err(plot_err)?;
        for (i, c) in curves.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            chart
                .draw_series(LineSeries::new(
                    c.mean.iter().map(|p| (p.video_count, p.hit_rate)),
                    color.stroke_width(2),
                ))
                .map_err(plot_err)?
                .label(format!("{} hit rate", c.strategy))
                .legend(move |(x, y)| PathElement::new([(x, y), (x + 20, y)], color.stroke_width(2)));
            let recall: Vec<(usize, f64)> = c
                .mean
                .iter()
                .filter_map(|p| p.recall_at_1.map(|r| (p.video_count, r)))
                .collect();
            chart
                .draw_series(DashedLineSeries::new(recall, 6, 4, color.stroke_width(2)))
                .map_err(plot_err)?
                .label(format!("{} recall@1", c.strategy))
                .legend(move |(x, y)| PathElement::new([(x, y), (x + 20, y)], color.stroke_width(1)));
        }
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::LowerRight)
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::curve::{CurvePoint, CurveRun, SubsetPolicy};
    use crate::metrics::RecallDefinition;

    #[test]
    fn renders() {
        let points = vec![
            CurvePoint { video_count: 10, hit_rate: 0.3, recall_at_1: Some(0.9) },
            CurvePoint { video_count: 20, hit_rate: 0.6, recall_at_1: None },
        ];
        let c = CoverageCurve {
            strategy: "llm".into(),
            policy: SubsetPolicy::FrequencyDescending,
            recall_definition: RecallDefinition::Recoverable,
            runs: vec![CurveRun { seed: None, points: points.clone() }],
            mean: points,
        };
        let svg = render_svg(&[c]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("llm hit rate"));
    }
}
