//! Report files: JSON summary, flat band CSV and an SVG plot for
//! one-dimensional comparisons. Every file is written atomically.

use std::io::Write;
use std::path::Path;

use gpcompare_core::DifferenceBand;

use crate::error::{CliError, Result};

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// One row per grid point: coordinates, then diff, upper, lower, delta.
pub fn band_csv(band: &DifferenceBand, input_names: &[String]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = input_names.to_vec();
    header.extend(["diff", "upper", "lower", "delta"].map(String::from));
    w.write_record(&header).map_err(|e| CliError::Usage(e.to_string()))?;
    for (j, x) in band.grid.points().row_iter().enumerate() {
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        for v in [band.diff[j], band.upper[j], band.lower[j], band.delta[j]] {
            row.push(v.to_string());
        }
        w.write_record(&row).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

/// Difference curve with its band; grid intervals where the band is violated
/// are shaded. Only meaningful for one input dimension.
pub fn band_svg(band: &DifferenceBand, x_label: &str) -> Option<String> {
    if band.grid.dim() != 1 {
        return None;
    }
    let xs = band.grid.points().as_slice();
    let (x0, x1) = band.grid.bounds()[0];
    let lo = band.lower.iter().chain(&band.diff).fold(f64::INFINITY, |a, b| a.min(*b));
    let hi = band.upper.iter().chain(&band.diff).fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
    let (y0, y1) = (lo - pad, hi + pad);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Rejected stretches, extended halfway to the neighbouring grid points.
    let n = xs.len();
    let mut j = 0;
    while j < n {
        if band.delta[j] > 0.0 {
            let start = j;
            while j + 1 < n && band.delta[j + 1] > 0.0 {
                j += 1;
            }
            let left = if start == 0 { xs[0] } else { 0.5 * (xs[start - 1] + xs[start]) };
            let right = if j + 1 == n { xs[n - 1] } else { 0.5 * (xs[j] + xs[j + 1]) };
            s.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{TOP}\" width=\"{:.2}\" height=\"{plot_h}\" fill=\"#f4c7c3\"/>\n",
                sx(left),
                (sx(right) - sx(left)).max(1.0)
            ));
        }
        j += 1;
    }

    let mut poly: Vec<String> = xs.iter().zip(&band.upper).map(|(x, u)| format!("{:.2},{:.2}", sx(*x), sy(*u))).collect();
    poly.extend(xs.iter().zip(&band.lower).rev().map(|(x, l)| format!("{:.2},{:.2}", sx(*x), sy(*l))));
    s.push_str(&format!("<polygon points=\"{}\" fill=\"#c6dbef\" stroke=\"#6baed6\"/>\n", poly.join(" ")));
    if y0 < 0.0 && y1 > 0.0 {
        s.push_str(&format!(
            "<line x1=\"{LEFT}\" x2=\"{:.2}\" y1=\"{y:.2}\" y2=\"{y:.2}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n",
            LEFT + plot_w,
            y = sy(0.0)
        ));
    }
    let line: Vec<String> = xs.iter().zip(&band.diff).map(|(x, g)| format!("{:.2},{:.2}", sx(*x), sy(*g))).collect();
    s.push_str(&format!("<polyline points=\"{}\" fill=\"none\" stroke=\"#08306b\" stroke-width=\"1.5\"/>\n", line.join(" ")));

    s.push_str(&format!(
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            sx(xv),
            TOP + plot_h + 18.0,
            tick(xv)
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            LEFT - 6.0,
            sy(yv) + 4.0,
            tick(yv)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    ));
    s.push_str(&format!(
        "<text x=\"{LEFT}\" y=\"24\">Difference in fitted curves with {:.0}% band ({}, {:.1}% of grid rejected)</text>\n",
        100.0 * (1.0 - band.alpha),
        if band.decision.is_reject() { "reject" } else { "accept" },
        band.rejected_percent()
    ));
    s.push_str("</svg>\n");
    Some(s)
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
