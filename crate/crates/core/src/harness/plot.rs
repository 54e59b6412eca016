use std::fmt::Write as _;
use std::path::Path;

use super::{HarnessError, Report};
use crate::attack::TracePoint;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Running minimum of a trace as (query, distance) pairs.
fn envelope(trace: &[TracePoint]) -> Vec<(f64, f64)> {
    if trace.is_empty() {
        return vec![(0.0, 0.0)];
    }
    let mut best = f64::INFINITY;
    trace
        .iter()
        .map(|p| {
            best = best.min(p.distance);
            (p.query as f64, best)
        })
        .collect()
}

/// SVG of best distance against query index, one polyline per trace.
pub fn render_convergence_svg(traces: &[&[TracePoint]]) -> String {
    let series: Vec<Vec<(f64, f64)>> = if traces.is_empty() {
        vec![envelope(&[])]
    } else {
        traces.iter().map(|t| envelope(t)).collect()
    };
    let all = series.iter().flatten();
    let x_max = all.clone().map(|p| p.0).fold(1.0, f64::max);
    let y_max = all.map(|p| p.1).fold(0.0, f64::max).max(1e-9);
    let sx = |x: f64| MARGIN + x / x_max * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - y / y_max * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
            sx(f * x_max),
            y0 + 18.0,
            f * x_max
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            x0 - 6.0,
            sy(f * y_max) + 4.0,
            f * y_max
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">queries</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">best distance (m)</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if let [(x, y)] = s.as_slice() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(*x),
                sy(*y)
            );
            continue;
        }
        // steps: the best distance holds until the next improvement
        let mut d = format!("M{:.2},{:.2}", sx(s[0].0), sy(s[0].1));
        for w in s.windows(2) {
            let _ = write!(
                d,
                " L{:.2},{:.2} L{:.2},{:.2}",
                sx(w[1].0),
                sy(w[0].1),
                sx(w[1].0),
                sy(w[1].1)
            );
        }
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-opacity="0.8" stroke-width="1.5"/>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_convergence_plot(
    trace: &[TracePoint],
    path: impl AsRef<Path>,
) -> Result<(), HarnessError> {
    write(path.as_ref(), &render_convergence_svg(&[trace]))
}

/// One curve per scenario record.
pub fn emit_report_plot(report: &Report, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let traces: Vec<&[TracePoint]> = report.records.iter().map(|r| r.trace.as_slice()).collect();
    write(path.as_ref(), &render_convergence_svg(&traces))
}

fn write(path: &Path, svg: &str) -> Result<(), HarnessError> {
    std::fs::write(path, svg).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trace_is_a_single_point() {
        let svg = render_convergence_svg(&[&[]]);
        assert!(svg.contains("<circle"));
        assert!(!svg.contains("stroke-opacity"));
    }

    #[test]
    fn envelope_never_rises() {
        let trace: Vec<TracePoint> = [(1, 3.0), (4, 2.0), (9, 2.5), (12, 1.0)]
            .iter()
            .map(|&(query, distance)| TracePoint { query, distance })
            .collect();
        let env = envelope(&trace);
        assert_eq!(
            env.iter().map(|p| p.1).collect::<Vec<_>>(),
            vec![3.0, 2.0, 2.0, 1.0]
        );
        assert!(render_convergence_svg(&[&trace]).contains("<path d=\"M"));
    }
}
