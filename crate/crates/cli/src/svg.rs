//! Minimal SVG emitter for orbits in the (phi, theta) plane.

use std::fmt::Write;

use lissajous_core::dynamics::TurningPoints;
use serde::Serialize;

use crate::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 70.0;
pub const STROKE_WIDTH: f64 = 1.2;
const PAD: f64 = 0.05;

/// Placement data written into the `<metadata>` element.
#[derive(Debug, Clone, Serialize)]
pub struct PlotFrame {
    pub phi_min: f64,
    pub phi_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Data window mapped onto the plot area, `[x_lo, x_hi, y_lo, y_hi]`.
    pub window: [f64; 4],
    pub plot_area: [f64; 4],
    pub true_coords: bool,
    pub k: f64,
    pub points: usize,
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = (hi - lo).max(1e-6);
    (lo - PAD * span, hi + PAD * span)
}

/// Renders `(phi, theta)` points with the turning-point rectangle. With
/// `true_coords` the abscissa is `phi / k`.
pub fn render(points: &[(f64, f64)], bounds: &TurningPoints, k: f64, true_coords: bool) -> Result<String, CliError> {
    if points.is_empty() {
        return Err(CliError::EmptyOrbit);
    }
    let scale = if true_coords { 1.0 / k } else { 1.0 };
    let (phi_min, phi_max) = (bounds.phi1 * scale, bounds.phi2 * scale);
    let (theta_min, theta_max) = (bounds.theta1, bounds.theta2);
    let (x_lo, x_hi) = padded(phi_min, phi_max);
    let (y_lo, y_hi) = padded(theta_min, theta_max);
    let (plot_w, plot_h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let px = |phi: f64| MARGIN + (phi - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |theta: f64| MARGIN + plot_h - (theta - y_lo) / (y_hi - y_lo) * plot_h;

    let frame = PlotFrame {
        phi_min,
        phi_max,
        theta_min,
        theta_max,
        window: [x_lo, x_hi, y_lo, y_hi],
        plot_area: [MARGIN, MARGIN, plot_w, plot_h],
        true_coords,
        k,
        points: points.len(),
    };
    let meta = serde_json::to_string(&frame).map_err(|e| CliError::Config(e.to_string()))?;
    let x_label = if true_coords { "phi / k" } else { "phi" };

    let mut svg = String::new();
    // writing to a String cannot fail
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, "<metadata>{meta}</metadata>");
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<rect id="turning-rectangle" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#777777" stroke-width="1" stroke-dasharray="6 4"/>"##,
        px(phi_min),
        py(theta_max),
        px(phi_max) - px(phi_min),
        py(theta_min) - py(theta_max)
    );
    let coords: Vec<String> = points
        .iter()
        .map(|&(phi, theta)| format!("{:.3},{:.3}", px(phi * scale), py(theta)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline id="orbit" fill="none" stroke="#1f4e9c" stroke-width="{STROKE_WIDTH}" points="{}"/>"##,
        coords.join(" ")
    );
    let axis_y = MARGIN + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{axis_y}" x2="{}" y2="{axis_y}" stroke="black"/>"#,
        MARGIN + plot_w
    );
    let _ = writeln!(svg, r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{axis_y}" stroke="black"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{x_label}</text>"#,
        MARGIN + plot_w / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">theta</text>"#,
        MARGIN + plot_h / 2.0,
        MARGIN + plot_h / 2.0
    );
    for (x, label) in [(px(phi_min), phi_min), (px(phi_max), phi_max)] {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.3}" y="{}" font-size="11" text-anchor="middle">{label:.4}</text>"#,
            axis_y + 16.0
        );
    }
    for (y, label) in [(py(theta_min), theta_min), (py(theta_max), theta_max)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.3}" font-size="11" text-anchor="end">{label:.4}</text>"#,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds() -> TurningPoints {
        TurningPoints {
            theta1: 0.5,
            theta2: 2.6,
            phi1: 0.3,
            phi2: 1.2,
        }
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(render(&[], &bounds(), 1.0, false), Err(CliError::EmptyOrbit)));
    }

    #[test]
    fn rectangle_corners() {
        let svg = render(&[(0.3, 0.5), (1.2, 2.6)], &bounds(), 2.0, true).unwrap();
        assert!(svg.contains("stroke-dasharray"));
        let meta = &svg[svg.find("<metadata>").unwrap() + 10..svg.find("</metadata>").unwrap()];
        let v: serde_json::Value = serde_json::from_str(meta).unwrap();
        assert_eq!(v["phi_min"], 0.15);
        assert_eq!(v["phi_max"], 0.6);
        assert!(svg.contains("phi / k"));
    }
}
