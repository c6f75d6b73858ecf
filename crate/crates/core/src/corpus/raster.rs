//! Procedural rasters for synthetic diagrams. A recipe is a list of draw
//! operations rendered on demand, so large synthetic corpora need not hold
//! decoded images in memory.

use image::{Rgb, RgbImage};

use crate::geometry::{point_in_polygon, Point};

#[derive(Debug, Clone, PartialEq)]
pub enum DrawOp {
    /// Solid polygon fill.
    Fill { polygon: Vec<Point>, color: [u8; 3] },
    /// Polygon filled with equal-height horizontal bands.
    Bands {
        polygon: Vec<Point>,
        colors: Vec<[u8; 3]>,
    },
    /// Polyline of the given stroke width.
    Stroke {
        points: Vec<Point>,
        closed: bool,
        width: f64,
        color: [u8; 3],
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterRecipe {
    pub width: u32,
    pub height: u32,
    pub background: [u8; 3],
    pub ops: Vec<DrawOp>,
}

fn pixel_span(lo: f64, hi: f64, limit: u32) -> std::ops::Range<u32> {
    let lo = lo.floor().max(0.0) as u32;
    let hi = (hi.ceil().max(0.0) as u32).min(limit);
    lo.min(hi)..hi
}

fn bounds(points: &[Point]) -> (f64, f64, f64, f64) {
    points.iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.x), b.min(p.y), c.max(p.x), d.max(p.y)),
    )
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.x + t * dx, a.y + t * dy);
    ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt()
}

impl RasterRecipe {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            background: [255, 255, 255],
            ops: Vec::new(),
        }
    }

    pub fn render(&self) -> RgbImage {
        let mut img = RgbImage::from_pixel(self.width, self.height, Rgb(self.background));
        for op in &self.ops {
            self.apply(&mut img, op);
        }
        img
    }

    fn apply(&self, img: &mut RgbImage, op: &DrawOp) {
        match op {
            DrawOp::Fill { polygon, color } => {
                let (x0, y0, x1, y1) = bounds(polygon);
                for py in pixel_span(y0, y1, self.height) {
                    for px in pixel_span(x0, x1, self.width) {
                        let c = Point::new(px as f64 + 0.5, py as f64 + 0.5);
                        if point_in_polygon(c, polygon) {
                            img.put_pixel(px, py, Rgb(*color));
                        }
                    }
                }
            }
            DrawOp::Bands { polygon, colors } => {
                if colors.is_empty() {
                    return;
                }
                let (x0, y0, x1, y1) = bounds(polygon);
                let band = ((y1 - y0) / colors.len() as f64).max(1e-9);
                for py in pixel_span(y0, y1, self.height) {
                    let cy = py as f64 + 0.5;
                    let idx = (((cy - y0) / band) as usize).min(colors.len() - 1);
                    for px in pixel_span(x0, x1, self.width) {
                        if point_in_polygon(Point::new(px as f64 + 0.5, cy), polygon) {
                            img.put_pixel(px, py, Rgb(colors[idx]));
                        }
                    }
                }
            }
            DrawOp::Stroke {
                points,
                closed,
                width,
                color,
            } => {
                if points.len() < 2 {
                    return;
                }
                let half = width / 2.0;
                let mut segments: Vec<(Point, Point)> =
                    points.windows(2).map(|w| (w[0], w[1])).collect();
                if *closed {
                    segments.push((points[points.len() - 1], points[0]));
                }
                let (x0, y0, x1, y1) = bounds(points);
                for py in pixel_span(y0 - half, y1 + half, self.height) {
                    for px in pixel_span(x0 - half, x1 + half, self.width) {
                        let c = Point::new(px as f64 + 0.5, py as f64 + 0.5);
                        if segments
                            .iter()
                            .any(|(a, b)| segment_distance(c, *a, *b) <= half)
                        {
                            img.put_pixel(px, py, Rgb(*color));
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_covers_square_interior() {
        let mut r = RasterRecipe::new(10, 10);
        r.ops.push(DrawOp::Fill {
            polygon: vec![
                Point::new(2.0, 2.0),
                Point::new(6.0, 2.0),
                Point::new(6.0, 6.0),
                Point::new(2.0, 6.0),
            ],
            color: [10, 20, 30],
        });
        let img = r.render();
        assert_eq!(img.get_pixel(3, 3).0, [10, 20, 30]);
        assert_eq!(img.get_pixel(1, 1).0, [255, 255, 255]);
        let filled = img.pixels().filter(|p| p.0 == [10, 20, 30]).count();
        assert_eq!(filled, 16);
    }

    #[test]
    fn stroke_draws_line() {
        let mut r = RasterRecipe::new(10, 10);
        r.ops.push(DrawOp::Stroke {
            points: vec![Point::new(0.0, 5.0), Point::new(10.0, 5.0)],
            closed: false,
            width: 2.0,
            color: [0, 0, 0],
        });
        let img = r.render();
        assert_eq!(img.get_pixel(5, 4).0, [0, 0, 0]);
        assert_eq!(img.get_pixel(5, 5).0, [0, 0, 0]);
        assert_eq!(img.get_pixel(5, 8).0, [255, 255, 255]);
    }
}
