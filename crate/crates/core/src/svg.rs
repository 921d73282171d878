//! SVG drawings of embeddings and disk representations. Rendering only:
//! coordinates are converted to floating point here and nowhere else.

use std::fmt::Write;

use crate::embed::RectilinearEmbedding;
use crate::geometry::DiskRepresentation;

const SCALE: f64 = 40.0;
const MARGIN: f64 = 20.0;

struct Frame {
    min_x: f64,
    max_y: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(points: impl Iterator<Item = (f64, f64)>, pad: f64) -> Self {
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for (x, y) in points {
            lo_x = lo_x.min(x);
            lo_y = lo_y.min(y);
            hi_x = hi_x.max(x);
            hi_y = hi_y.max(y);
        }
        if lo_x > hi_x {
            (lo_x, lo_y, hi_x, hi_y) = (0.0, 0.0, 0.0, 0.0);
        }
        Frame {
            min_x: lo_x - pad,
            max_y: hi_y + pad,
            width: (hi_x - lo_x + 2.0 * pad) * SCALE + 2.0 * MARGIN,
            height: (hi_y - lo_y + 2.0 * pad) * SCALE + 2.0 * MARGIN,
        }
    }

    /// Screen coordinates; y grows downwards on screen.
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.min_x) * SCALE + MARGIN, (self.max_y - y) * SCALE + MARGIN)
    }

    fn open(&self, out: &mut String) {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
            self.width, self.height, self.width, self.height
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    }
}

/// Edge polylines in grey, vertices as labelled dots.
pub fn embedding_svg(emb: &RectilinearEmbedding) -> String {
    let pts = emb
        .vpoint
        .iter()
        .chain(emb.epath.iter().flat_map(|p| p.points.iter()))
        .map(|p| (p.x as f64, p.y as f64));
    let frame = Frame::new(pts, 0.5);
    let mut out = String::new();
    frame.open(&mut out);
    for path in &emb.epath {
        let coords: Vec<String> = path
            .points
            .iter()
            .map(|p| {
                let (x, y) = frame.map(p.x as f64, p.y as f64);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#888" stroke-width="2"/>"##,
            coords.join(" ")
        );
    }
    for (v, p) in emb.vpoint.iter().enumerate() {
        let (x, y) = frame.map(p.x as f64, p.y as f64);
        let _ = writeln!(out, r##"<circle cx="{x:.1}" cy="{y:.1}" r="6" fill="#1f5fa8"/>"##);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" font-family="monospace">{v}</text>"#,
            x + 8.0,
            y - 8.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Every disk as a translucent circle of the shared diameter.
pub fn disks_svg(rep: &DiskRepresentation) -> String {
    let d = rep.diameter.to_f64();
    let centers: Vec<(f64, f64)> = rep.centers.iter().map(|c| (c.x.to_f64(), c.y.to_f64())).collect();
    let frame = Frame::new(centers.iter().copied(), d);
    let mut out = String::new();
    frame.open(&mut out);
    for (x, y) in centers {
        let (sx, sy) = frame.map(x, y);
        let _ = writeln!(
            out,
            r##"<circle cx="{sx:.2}" cy="{sy:.2}" r="{:.2}" fill="#1f5fa8" fill-opacity="0.2" stroke="#1f5fa8" stroke-width="0.5"/>"##,
            d / 2.0 * SCALE
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{grid_disks, GridCoords, GridPoint};

    #[test]
    fn disk_drawing_has_one_circle_per_disk() {
        let rep = grid_disks(&GridCoords::new(vec![GridPoint::new(0, 0), GridPoint::new(1, 0)]));
        let svg = disks_svg(&rep);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}
