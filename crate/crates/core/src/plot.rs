//! Static SVG rendering of persistence diagrams.
//!
//! Output depends only on the inputs, so identical diagrams give identical
//! bytes. Coordinates are printed with two decimals.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::filtration::{PersistenceDiagram, Scale};
use crate::inference::RejectionBand;

pub const WIDTH: f64 = 480.0;
pub const HEIGHT: f64 = 480.0;
pub const MARGIN: f64 = 56.0;

/// Data window `[lo, hi]` shared by both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    /// Covers every finite coordinate with 5% headroom; `[0, 1]` if none.
    pub fn for_diagram(d: &PersistenceDiagram) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &d.points {
            for v in [p.birth, p.death] {
                if v.is_finite() {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 {
            return Self { lo: lo - 0.5, hi: hi + 0.5 };
        }
        let pad = 0.05 * (hi - lo);
        Self { lo: lo - pad, hi: hi + pad }
    }

    /// Pixel position of data point `(birth, death)`.
    pub fn to_pixel(&self, birth: f64, death: f64) -> (f64, f64) {
        let span = self.hi - self.lo;
        let plot_w = WIDTH - 2.0 * MARGIN;
        let plot_h = HEIGHT - 2.0 * MARGIN;
        (
            MARGIN + (birth - self.lo) / span * plot_w,
            HEIGHT - MARGIN - (death - self.lo) / span * plot_h,
        )
    }
}

/// Corners, in data coordinates, of the band `{b <= d <= b + 2t}` clipped
/// to the window square.
pub fn band_polygon(w: Window, t_alpha: f64) -> Vec<(f64, f64)> {
    let width = 2.0 * t_alpha;
    let mut poly = vec![(w.lo, w.lo), (w.hi, w.hi)];
    if w.lo + width < w.hi {
        poly.push((w.hi - width, w.hi));
        poly.push((w.lo, w.lo + width));
    } else {
        poly.push((w.lo, w.hi));
    }
    poly
}

fn axis_labels(scale: Scale) -> (&'static str, &'static str) {
    match scale {
        Scale::Distance => ("birth", "death"),
        Scale::FunctionLower => ("birth (level)", "death (level)"),
        Scale::FunctionUpper => ("birth (negated level)", "death (negated level)"),
    }
}

pub fn diagram_svg(d: &PersistenceDiagram, band: Option<&RejectionBand>) -> String {
    let w = Window::for_diagram(d);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if let Some(b) = band {
        let pts: Vec<String> = band_polygon(w, b.t_alpha)
            .into_iter()
            .map(|(x, y)| {
                let (px, py) = w.to_pixel(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(s, r##"<polygon class="band" points="{}" fill="#9ecae1" fill-opacity="0.5"/>"##, pts.join(" "));
    }
    // axes frame
    let (x0, y0) = w.to_pixel(w.lo, w.lo);
    let (x1, y1) = w.to_pixel(w.hi, w.hi);
    let _ = writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line class="diagonal" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="gray"/>"#);
    for (v, anchor) in [(w.lo, "start"), (w.hi, "end")] {
        let (px, _) = w.to_pixel(v, w.lo);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="{anchor}">{v:.3}</text>"#, y0 + 16.0);
        let (_, py) = w.to_pixel(w.lo, v);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{py:.2}" font-size="11" text-anchor="end">{v:.3}</text>"#, x0 - 4.0);
    }
    let (xl, yl) = axis_labels(d.scale);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{xl}</text>"#, WIDTH / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">{yl}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    // essential classes sit on a dashed line above the window
    let top = MARGIN * 0.5;
    if d.points.iter().any(|p| p.is_essential()) {
        let _ = writeln!(
            s,
            r#"<line class="infinity" x1="{x0:.2}" y1="{top:.2}" x2="{x1:.2}" y2="{top:.2}" stroke="gray" stroke-dasharray="4 3"/>"#
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">inf</text>"#, x1 + 4.0, top + 4.0);
    }
    for p in &d.points {
        let (px, py) = w.to_pixel(p.birth, p.death);
        let py = if p.is_essential() { top } else { py };
        match p.dim {
            0 => {
                let _ = writeln!(s, r##"<circle class="h0" cx="{px:.2}" cy="{py:.2}" r="3.5" fill="#d62728"/>"##);
            }
            _ => {
                let _ = writeln!(
                    s,
                    r##"<rect class="h1" x="{:.2}" y="{:.2}" width="7" height="7" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
                    px - 3.5,
                    py - 3.5
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Writes [`diagram_svg`] to `path`.
pub fn render_diagram_svg(d: &PersistenceDiagram, band: Option<&RejectionBand>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, diagram_svg(d, band))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::PersistencePoint;

    #[test]
    fn empty_diagram_has_axes_only() {
        let svg = diagram_svg(&PersistenceDiagram::empty(Scale::Distance), None);
        assert!(svg.contains("class=\"diagonal\""));
        assert!(!svg.contains("<circle") && !svg.contains("class=\"h1\"") && !svg.contains("polygon"));
    }

    #[test]
    fn band_covers_twice_t() {
        let w = Window { lo: 0.0, hi: 10.0 };
        assert_eq!(band_polygon(w, 1.0), vec![(0.0, 0.0), (10.0, 10.0), (8.0, 10.0), (0.0, 2.0)]);
        assert_eq!(band_polygon(w, 6.0), vec![(0.0, 0.0), (10.0, 10.0), (0.0, 10.0)]);
    }

    #[test]
    fn band_corners_in_output() {
        // window becomes [-0.5, 10.5] from the 5% headroom
        let d = PersistenceDiagram::new(vec![PersistencePoint::new(1, 0.0, 10.0)], Scale::Distance);
        let band = RejectionBand { alpha: 0.05, t_alpha: 1.0, dim: 1, n: 10 };
        let svg = diagram_svg(&d, Some(&band));
        let w = Window::for_diagram(&d);
        assert_eq!((w.lo, w.hi), (-0.5, 10.5));
        let (px, py) = w.to_pixel(-0.5, 1.5);
        assert!(svg.contains(&format!("{px:.2},{py:.2}\"")), "{svg}");
        let (qx, qy) = w.to_pixel(8.5, 10.5);
        assert!(svg.contains(&format!("{qx:.2},{qy:.2} ")));
    }

    #[test]
    fn deterministic_bytes() {
        let d = PersistenceDiagram::new(
            vec![PersistencePoint::new(0, 0.0, f64::INFINITY), PersistencePoint::new(1, 0.3, 0.9)],
            Scale::Distance,
        );
        assert_eq!(diagram_svg(&d, None), diagram_svg(&d, None));
    }
}
