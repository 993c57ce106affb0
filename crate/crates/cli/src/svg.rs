//! Minimal hand-generated SVG line plots: polylines, axes, tick labels.
//! Zero rendering dependencies and byte-stable output.

use anyhow::{Context, Result};
use std::path::Path;

const W: f64 = 900.0;
const H: f64 = 560.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    /// "data" or "guide"; styles defined in the embedded stylesheet.
    pub class: &'a str,
}

/// Write a self-contained SVG with the given series on linear axes.
pub fn polyline_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<()> {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !(x_min < x_max) {
        x_max = x_min + 1.0;
    }
    if !(y_min < y_max) {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
    let sx = (W - ML - MR) / (x_max - x_min);
    let sy = (H - MT - MB) / (y_max - y_min);
    let px = |x: f64| ML + (x - x_min) * sx;
    let py = |y: f64| H - MB - (y - y_min) * sy;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(
        "<style>\
         .data{fill:none;stroke:#1f77b4;stroke-width:1}\
         .guide{fill:none;stroke:#d62728;stroke-width:1;stroke-dasharray:6 4}\
         .axis{stroke:#000;stroke-width:1}\
         text{font-family:monospace;font-size:12px;fill:#000}\
         </style>\n",
    );
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    ));
    // axes
    svg.push_str(&format!(
        "<line class=\"axis\" x1=\"{ML:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    svg.push_str(&format!(
        "<line class=\"axis\" x1=\"{ML:.1}\" y1=\"{MT:.1}\" x2=\"{ML:.1}\" y2=\"{:.1}\"/>\n",
        H - MB
    ));
    // ticks
    for k in 0..=5 {
        let x = x_min + (x_max - x_min) * k as f64 / 5.0;
        svg.push_str(&format!(
            "<line class=\"axis\" x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\"/>\n",
            px(x),
            H - MB,
            H - MB + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            px(x),
            H - MB + 20.0,
            tick(x)
        ));
        let y = y_min + (y_max - y_min) * k as f64 / 5.0;
        svg.push_str(&format!(
            "<line class=\"axis\" x1=\"{:.1}\" y1=\"{1:.1}\" x2=\"{ML:.1}\" y2=\"{1:.1}\"/>\n",
            ML - 5.0,
            py(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            ML - 8.0,
            py(y) + 4.0,
            tick(y)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        (ML + W - MR) / 2.0,
        H - 10.0,
        escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0:.1})\">{1}</text>\n",
        (MT + H - MB) / 2.0,
        escape(y_label)
    ));
    for s in series {
        svg.push_str(&format!("<polyline class=\"{}\" points=\"", s.class));
        for &(x, y) in s.points {
            svg.push_str(&format!("{:.2},{:.2} ", px(x), py(y)));
        }
        svg.push_str("\"/>\n");
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).with_context(|| path.display().to_string())
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-3 {
        format!("{v:.2e}")
    } else {
        format!("{v:.5}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
