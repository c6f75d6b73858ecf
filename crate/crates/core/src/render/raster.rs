//! Software rasterizer for scenes. Text items are not drawn.

use image::{Rgba as Px, RgbaImage};

use super::scene::{Item, Rgba, Scene};
use crate::geometry::{point_in_polygon, Point};

fn blend(dst: &mut Px<u8>, src: Rgba) {
    let a = src[3] as u32;
    if a == 0 {
        return;
    }
    if a == 255 {
        dst.0 = src;
        return;
    }
    for c in 0..3 {
        dst.0[c] = ((src[c] as u32 * a + dst.0[c] as u32 * (255 - a) + 127) / 255) as u8;
    }
    dst.0[3] = (a + dst.0[3] as u32 * (255 - a) / 255).min(255) as u8;
}

fn span(lo: f64, hi: f64, limit: u32) -> std::ops::Range<u32> {
    let lo = lo.floor().max(0.0).min(limit as f64) as u32;
    let hi = hi.ceil().max(0.0).min(limit as f64) as u32;
    lo..hi.max(lo)
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn stroke(img: &mut RgbaImage, pts: &[[f64; 2]], closed: bool, color: Rgba, width: f64) {
    if pts.len() < 2 {
        return;
    }
    let half = (width / 2.0).max(0.5);
    let mut segs: Vec<([f64; 2], [f64; 2])> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    if closed {
        segs.push((pts[pts.len() - 1], pts[0]));
    }
    let (w, h) = img.dimensions();
    for (a, b) in segs {
        for y in span(a[1].min(b[1]) - half, a[1].max(b[1]) + half, h) {
            for x in span(a[0].min(b[0]) - half, a[0].max(b[0]) + half, w) {
                if seg_dist([x as f64 + 0.5, y as f64 + 0.5], a, b) <= half {
                    blend(img.get_pixel_mut(x, y), color);
                }
            }
        }
    }
}

pub fn rasterize(scene: &Scene) -> RgbaImage {
    let mut img = RgbaImage::from_pixel(scene.width, scene.height, Px(scene.background));
    let (w, h) = (scene.width, scene.height);
    for item in &scene.items {
        match item {
            Item::Rect { x, y, w: rw, h: rh, fill } => {
                for py in span(*y, y + rh, h) {
                    for px in span(*x, x + rw, w) {
                        let (cx, cy) = (px as f64 + 0.5, py as f64 + 0.5);
                        if cx >= *x && cx < x + rw && cy >= *y && cy < y + rh {
                            blend(img.get_pixel_mut(px, py), *fill);
                        }
                    }
                }
            }
            Item::Polygon { points, fill, stroke: s } => {
                let verts: Vec<Point> = points.iter().map(|p| Point::new(p[0], p[1])).collect();
                let (x0, x1) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, p| (r.0.min(p[0]), r.1.max(p[0])));
                let (y0, y1) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, p| (r.0.min(p[1]), r.1.max(p[1])));
                for py in span(y0, y1, h) {
                    for px in span(x0, x1, w) {
                        if point_in_polygon(Point::new(px as f64 + 0.5, py as f64 + 0.5), &verts) {
                            blend(img.get_pixel_mut(px, py), *fill);
                        }
                    }
                }
                if let Some((c, width)) = s {
                    stroke(&mut img, points, true, *c, *width);
                }
            }
            Item::Circle { cx, cy, r, fill } => {
                for py in span(cy - r, cy + r, h) {
                    for px in span(cx - r, cx + r, w) {
                        if (px as f64 + 0.5 - cx).hypot(py as f64 + 0.5 - cy) <= *r {
                            blend(img.get_pixel_mut(px, py), *fill);
                        }
                    }
                }
            }
            Item::Polyline { points, stroke: c, width } => stroke(&mut img, points, false, *c, *width),
            Item::Text { .. } => {}
            Item::Image { x, y, w: iw, h: ih, pixels } => {
                let (sw, sh) = pixels.dimensions();
                if sw == 0 || sh == 0 || *iw <= 0.0 || *ih <= 0.0 {
                    continue;
                }
                for py in span(*y, y + ih, h) {
                    for px in span(*x, x + iw, w) {
                        let u = (px as f64 + 0.5 - x) / iw;
                        let v = (py as f64 + 0.5 - y) / ih;
                        if !(0.0..1.0).contains(&u) || !(0.0..1.0).contains(&v) {
                            continue;
                        }
                        let sx = ((u * sw as f64) as u32).min(sw - 1);
                        let sy = ((v * sh as f64) as u32).min(sh - 1);
                        blend(img.get_pixel_mut(px, py), pixels.get_pixel(sx, sy).0);
                    }
                }
            }
        }
    }
    img
}
