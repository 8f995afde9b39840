//! Minimal deterministic SVG line plots.
//!
//! Fixed 800x600 viewport, one or more vertically stacked panels, each
//! with axes, tick labels, polyline series, point markers, and a small
//! legend. Everything is written directly as SVG text so identical inputs
//! produce identical bytes.

use std::fmt::Write as _;

/// Stroke palette applied to series in order.
pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Total viewport width in pixels.
pub const WIDTH: f64 = 800.0;
/// Total viewport height in pixels.
pub const HEIGHT: f64 = 600.0;

/// One polyline with a legend label.
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// One labeled marker point.
pub struct Marker {
    pub x: f64,
    pub y: f64,
    pub label: String,
    pub color: &'static str,
}

/// One set of axes with its own data ranges.
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
}

impl Panel {
    /// Data bounds over all series and markers, padded by 5 percent, with
    /// degenerate spans widened to unit size.
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                xs.push(x);
                ys.push(y);
            }
        }
        for m in &self.markers {
            xs.push(m.x);
            ys.push(m.y);
        }
        let (x_min, x_max) = span(&xs);
        let (y_min, y_max) = span(&ys);
        let x_pad = 0.05 * (x_max - x_min);
        let y_pad = 0.05 * (y_max - y_min);
        (x_min - x_pad, x_max + x_pad, y_min - y_pad, y_max + y_pad)
    }
}

fn span(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

/// Renders panels stacked top to bottom into one 800x600 SVG document.
pub fn render(panels: &[Panel]) -> String {
    assert!(!panels.is_empty(), "a plot needs at least one panel");
    let panel_height = HEIGHT / panels.len() as f64;
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\">\n"
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n");
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, i as f64 * panel_height, panel_height);
    }
    out.push_str("</svg>\n");
    out
}

fn render_panel(out: &mut String, panel: &Panel, y_off: f64, height: f64) {
    let (left, right, top, bottom) = (64.0, 16.0, 34.0, 44.0);
    let plot_w = WIDTH - left - right;
    let plot_h = height - top - bottom;
    let (x_min, x_max, y_min, y_max) = panel.bounds();
    let to_sx = |x: f64| left + (x - x_min) / (x_max - x_min) * plot_w;
    let to_sy = |y: f64| y_off + top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        left + plot_w / 2.0,
        y_off + 18.0,
        escape(&panel.title)
    );

    // Axis frame.
    let _ = write!(
        out,
        "<rect x=\"{left:.1}\" y=\"{:.1}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" \
         fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        y_off + top
    );

    // Ticks and grid.
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let sx = to_sx(fx);
        let _ = write!(
            out,
            "<line x1=\"{sx:.1}\" y1=\"{:.1}\" x2=\"{sx:.1}\" y2=\"{:.1}\" \
             stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
            y_off + top,
            y_off + top + plot_h
        );
        let _ = write!(
            out,
            "<text x=\"{sx:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            y_off + top + plot_h + 16.0,
            tick_label(fx)
        );
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let sy = to_sy(fy);
        let _ = write!(
            out,
            "<line x1=\"{left:.1}\" y1=\"{sy:.1}\" x2=\"{:.1}\" y2=\"{sy:.1}\" \
             stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n",
            left + plot_w
        );
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
            left - 6.0,
            sy + 4.0,
            tick_label(fy)
        );
    }

    // Axis labels.
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        left + plot_w / 2.0,
        y_off + height - 8.0,
        escape(&panel.x_label)
    );
    let _ = write!(
        out,
        "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
        y_off + top + plot_h / 2.0,
        y_off + top + plot_h / 2.0,
        escape(&panel.y_label)
    );

    // Series.
    for s in &panel.series {
        if s.points.is_empty() {
            continue;
        }
        let mut path = String::new();
        for &(x, y) in &s.points {
            let _ = write!(path, "{:.2},{:.2} ", to_sx(x), to_sy(y));
        }
        let _ = write!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            path.trim_end(),
            s.color
        );
    }

    // Markers.
    for m in &panel.markers {
        let (sx, sy) = (to_sx(m.x), to_sy(m.y));
        let _ = write!(
            out,
            "<circle cx=\"{sx:.2}\" cy=\"{sy:.2}\" r=\"4\" fill=\"{}\" stroke=\"#333333\" \
             stroke-width=\"0.8\"/>\n",
            m.color
        );
        if !m.label.is_empty() {
            let _ = write!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
                sx + 6.0,
                sy - 6.0,
                escape(&m.label)
            );
        }
    }

    // Legend, top-right inside the frame.
    for (i, s) in panel.series.iter().enumerate() {
        let ly = y_off + top + 14.0 + 14.0 * i as f64;
        let lx = left + plot_w - 150.0;
        let _ = write!(
            out,
            "<line x1=\"{lx:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{}\" \
             stroke-width=\"2\"/>\n",
            ly - 4.0,
            lx + 18.0,
            ly - 4.0,
            s.color
        );
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{ly:.1}\" font-size=\"11\">{}</text>\n",
            lx + 24.0,
            escape(&s.label)
        );
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_panel() -> Panel {
        Panel {
            title: "demo".into(),
            x_label: "x".into(),
            y_label: "f(x)".into(),
            series: vec![Series {
                label: "curve".into(),
                color: PALETTE[0],
                points: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)],
            }],
            markers: vec![Marker { x: 1.0, y: 1.0, label: "p".into(), color: PALETTE[1] }],
        }
    }

    #[test]
    fn render_is_wellformed_and_deterministic() {
        let a = render(&[sample_panel()]);
        let b = render(&[sample_panel()]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("<polyline"));
        assert!(a.contains("<circle"));
    }

    #[test]
    fn two_panels_split_the_viewport() {
        let svg = render(&[sample_panel(), sample_panel()]);
        assert_eq!(svg.matches("<rect").count(), 3);
        assert_eq!(svg.matches("polyline").count(), 2);
    }

    #[test]
    fn degenerate_ranges_are_widened() {
        let panel = Panel {
            title: "flat".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "one point".into(),
                color: PALETTE[0],
                points: vec![(0.5, 0.5), (0.5, 0.5)],
            }],
            markers: vec![],
        };
        let svg = render(&[panel]);
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }

    #[test]
    fn labels_are_escaped() {
        let mut panel = sample_panel();
        panel.title = "a < b & c".into();
        let svg = render(&[panel]);
        assert!(svg.contains("a &lt; b &amp; c"));
    }

    #[test]
    fn tick_labels_drop_trailing_zeros() {
        assert_eq!(tick_label(1.5), "1.5");
        assert_eq!(tick_label(2.0), "2");
        assert_eq!(tick_label(-0.0001), "0");
        assert_eq!(tick_label(1.2345), "1.234");
    }
}
