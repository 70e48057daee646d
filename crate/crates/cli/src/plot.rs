//! Cobweb exports.
//!
//! The CSV has one row per iteration step: from the graph point `(x_k, x_{k+1})` to
//! the graph point `(x_{k+1}, x_{k+2})`, the path between them running horizontally
//! to the diagonal and then vertically back to the graph. The `y0` column is
//! therefore the orbit `x_1, x_2, …`.

use std::fmt::Write as _;

use cantor_core::orbit::CobwebTrace;

use crate::fmt17;

/// Samples drawn along the graph of the map.
pub const CURVE_SAMPLES: usize = 1024;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;

/// Graph points `(x_k, x_{k+1})` of a trace.
fn graph_points(trace: &CobwebTrace) -> Vec<(f64, f64)> {
    trace.points.iter().step_by(2).copied().collect()
}

pub fn cobweb_csv(trace: &CobwebTrace) -> String {
    let mut out = String::from("x0,y0,x1,y1\n");
    for w in graph_points(trace).windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let _ = writeln!(out, "{},{},{},{}", fmt17(x0), fmt17(y0), fmt17(x1), fmt17(y1));
    }
    out
}

/// Square window `[lo, hi]²` holding every trace point and `extra`, padded by 5%.
pub fn view_window(trace: &CobwebTrace, extra: &[f64]) -> (f64, f64) {
    let values = trace.points.iter().flat_map(|&(x, y)| [x, y]).chain(extra.iter().copied()).filter(|v| v.is_finite());
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(lo <= hi) {
        return (-1.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5f64.max(0.05 * lo.abs()) };
    (lo - pad, hi + pad)
}

/// SVG 1.1 drawing of the diagonal, the graph of `map` over the window, and the trace.
/// A trace that never moves is drawn as a single point marker.
pub fn cobweb_svg(trace: &CobwebTrace, map: impl Fn(f64) -> f64, window: (f64, f64)) -> String {
    let (lo, hi) = window;
    let span = hi - lo;
    let inner = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - lo) / span * inner;
    // Far-off values are pulled in so the clip path hides them without huge coordinates.
    let sy = |y: f64| MARGIN + (hi - y.clamp(lo - span, hi + span)) / span * inner;
    let pt = |x: f64, y: f64| format!("{:.3},{:.3}", sx(x), sy(y));

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        out,
        "  <defs><clipPath id=\"plot\"><rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{inner}\" height=\"{inner}\"/></clipPath></defs>"
    );
    let _ = writeln!(
        out,
        "  <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{inner}\" height=\"{inner}\" fill=\"white\" stroke=\"black\"/>"
    );
    out.push_str("  <g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.5\">\n");
    let _ =
        writeln!(out, "    <polyline class=\"diagonal\" stroke=\"#888888\" points=\"{} {}\"/>", pt(lo, lo), pt(hi, hi));

    let curve: Vec<String> = (0..CURVE_SAMPLES)
        .map(|i| lo + span * i as f64 / (CURVE_SAMPLES - 1) as f64)
        .map(|x| (x, map(x)))
        .filter(|(_, y)| y.is_finite())
        .map(|(x, y)| pt(x, y))
        .collect();
    let _ = writeln!(out, "    <polyline class=\"map\" stroke=\"#1f4e9c\" points=\"{}\"/>", curve.join(" "));

    if trace.is_degenerate() {
        let (x, y) = trace.points[0];
        let _ = writeln!(
            out,
            "    <circle class=\"fixed-point\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#c0392b\" stroke=\"none\"/>",
            sx(x),
            sy(y)
        );
    } else {
        let path: Vec<String> = trace.points.iter().map(|&(x, y)| pt(x, y)).collect();
        let _ = writeln!(out, "    <polyline class=\"trace\" stroke=\"#c0392b\" points=\"{}\"/>", path.join(" "));
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cantor_core::orbit::cobweb_trace;
    use cantor_core::QuadraticParams;

    #[test]
    fn csv_rows_follow_the_orbit() {
        let f = QuadraticParams::new(0.5).unwrap();
        let trace = cobweb_trace(&f, 0.0, 6).unwrap();
        let csv = cobweb_csv(&trace);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x0,y0,x1,y1"));
        let ys: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        let expected = [0.5, 0.75, 1.0625, 1.629, 3.153];
        assert_eq!(ys.len(), 5);
        for (y, e) in ys.iter().zip(expected) {
            assert!((y - e).abs() < 1e-3);
        }
        assert!(csv.starts_with("x0,y0,x1,y1\n0,0.5,0.5,0.75\n"));
    }

    #[test]
    fn svg_has_diagonal_curve_and_trace() {
        let f = QuadraticParams::new(0.5).unwrap();
        let trace = cobweb_trace(&f, 0.0, 4).unwrap();
        let svg = cobweb_svg(&trace, |x| f.eval(x), view_window(&trace, &[]));
        assert!(svg.contains("version=\"1.1\""));
        assert!(svg.contains("class=\"diagonal\""));
        assert!(svg.contains("class=\"trace\""));
        let curve = svg.lines().find(|l| l.contains("class=\"map\"")).unwrap();
        assert!(curve.matches(',').count() >= 512);
    }

    #[test]
    fn fixed_point_is_a_single_marker() {
        let f = QuadraticParams::new(-3.0).unwrap();
        let trace = cobweb_trace(&f, f.p().unwrap(), 3).unwrap();
        let svg = cobweb_svg(&trace, |x| f.eval(x), view_window(&trace, &[-2.4, 2.4]));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("class=\"trace\""));
    }
}
