//! Minimal SVG line plots of report columns. Presentation only; the CSV
//! files are the contract.

use std::fmt::Write as _;
use std::path::Path;

use crate::report::atomic_write;
use crate::HarnessError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One named series of (x, y) points.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn transform(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64, log: bool) -> f64 {
    let (v, lo, hi) = if log {
        (v.log10(), lo.log10(), hi.log10())
    } else {
        (v, lo, hi)
    };
    if hi == lo {
        return 0.5 * (out_lo + out_hi);
    }
    out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
}

/// Renders the series into an SVG file; logarithmic axes are used when
/// requested and all values on that axis are positive.
pub fn line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    log_x: bool,
    log_y: bool,
) -> Result<(), HarnessError> {
    let points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    if points.is_empty() {
        return Err(HarnessError::Run(format!("nothing to plot for {title}")));
    }
    let log_x = log_x && points.iter().all(|(x, _)| *x > 0.0);
    let log_y = log_y && points.iter().all(|(_, y)| *y > 0.0);
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &points {
        x_lo = x_lo.min(*x);
        x_hi = x_hi.max(*x);
        y_lo = y_lo.min(*y);
        y_hi = y_hi.max(*y);
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        title
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        x_label,
        if log_x { " (log)" } else { "" }
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {})">{}{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label,
        if log_y { " (log)" } else { "" }
    );
    // Axis extent labels.
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-size="10">{x_lo:.3e}</text>"#,
        HEIGHT - MARGIN + 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{x_hi:.3e}</text>"#,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{y_lo:.3e}</text>"#,
        MARGIN - 6.0,
        HEIGHT - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{y_hi:.3e}</text>"#,
        MARGIN - 6.0,
        MARGIN + 10.0
    );

    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| {
                let px = transform(*x, x_lo, x_hi, MARGIN, WIDTH - MARGIN, log_x);
                let py = transform(*y, y_lo, y_hi, HEIGHT - MARGIN, MARGIN, log_y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        for p in &pts {
            let (px, py) = p.split_once(',').unwrap();
            let _ = writeln!(svg, r#"<circle cx="{px}" cy="{py}" r="2.5" fill="{color}"/>"#);
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * idx as f64,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    atomic_write(path, svg.as_bytes())
}
