//! Overlay of a case's histogram and its quasi-distribution as SVG.

use std::fmt::Write as _;
use std::io::Write;

use qda_core::FitReport;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Roughly `count` round tick values covering `[0, max]`.
fn ticks(max: f64, count: usize) -> Vec<f64> {
    if max.is_nan() || max <= 0.0 {
        return vec![0.0];
    }
    let raw = max / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    (0..)
        .map(|i| i as f64 * step)
        .take_while(|v| *v <= max * (1.0 + 1e-12))
        .collect()
}

fn polyline(values: &[f64], sx: impl Fn(f64) -> f64, sy: impl Fn(f64) -> f64, style: &str) -> String {
    let mut pts = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            pts.push(' ');
        }
        let _ = write!(pts, "{:.2},{:.2}", sx((k + 1) as f64), sy(*v));
    }
    format!("<polyline fill=\"none\" {style} points=\"{pts}\"/>\n")
}

/// Renders the histogram (`probs`) and the report's quasi-distribution.
pub fn render_svg(report: &FitReport, probs: &[f64]) -> String {
    let k = probs.len().max(2) as f64;
    let y_max = probs
        .iter()
        .chain(&report.density)
        .fold(0.0f64, |m, v| m.max(*v))
        .max(f64::MIN_POSITIVE)
        * 1.05;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - 1.0) / (k - 1.0) * plot_w;
    let sy = |y: f64| TOP + plot_h - y.clamp(0.0, y_max) / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        WIDTH / 2.0,
        escape(&report.case_id)
    );

    // axes
    let _ = writeln!(
        svg,
        "<path d=\"M{LEFT},{TOP} V{} H{}\" stroke=\"black\" fill=\"none\"/>",
        TOP + plot_h,
        LEFT + plot_w
    );
    let x_ticks: Vec<f64> = ticks(k - 1.0, 7).into_iter().map(|v| v + 1.0).collect();
    for x in x_ticks {
        let px = sx(x);
        let _ = writeln!(
            svg,
            "<line class=\"tick\" x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            TOP + plot_h,
            TOP + plot_h + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            TOP + plot_h + 18.0,
            x
        );
    }
    for y in ticks(y_max, 5) {
        let py = sy(y);
        let _ = writeln!(
            svg,
            "<line class=\"tick\" x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT}\" y2=\"{py:.2}\" stroke=\"black\"/>",
            LEFT - 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.4}</text>",
            LEFT - 8.0,
            py + 4.0,
            y
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">bin</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );

    svg.push_str(&polyline(probs, sx, sy, "class=\"histogram\" stroke=\"#d62728\" stroke-width=\"1\""));
    svg.push_str(&polyline(
        &report.density,
        sx,
        sy,
        "class=\"quasi\" stroke=\"#1f77b4\" stroke-width=\"2\"",
    ));

    let _ = writeln!(
        svg,
        "<text class=\"zero\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">zero = {:.4}</text>",
        LEFT + plot_w - 10.0,
        TOP + 16.0,
        report.zero_fraction
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">omega = {:.3}, variance = {:.4}</text>",
        LEFT + plot_w - 10.0,
        TOP + 32.0,
        report.omega,
        report.variance
    );
    svg.push_str("</svg>\n");
    svg
}

/// `k,prob,fit` rows: histogram and resampled fitted signal per bin.
pub fn write_plot_csv<W: Write>(report: &FitReport, probs: &[f64], mut out: W) -> std::io::Result<()> {
    writeln!(out, "k,prob,fit")?;
    for (k, (p, f)) in probs.iter().zip(&report.signal).enumerate() {
        writeln!(out, "{},{},{}", k + 1, p, f)?;
    }
    out.flush()
}
