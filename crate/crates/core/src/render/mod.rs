//! Static plots: density heatmaps, embedding scatter plots and hexbin
//! panels. Every plot is built as a [`Scene`] and written as SVG and PNG.

pub mod palette;
pub mod raster;
pub mod scene;
pub mod svg;

use std::collections::BTreeMap;
use std::path::Path;

use image::{imageops, RgbImage, RgbaImage};

use crate::embedding::HexSummary;
use crate::error::{Error, Result};
use crate::layout::{kde1d, DensityGrid, LayoutKind};
pub use palette::Palette;
pub use raster::rasterize;
pub use scene::{Anchor, Item, Scene};
pub use svg::to_svg;

use palette::{kind_color, CATEGORICAL};
use scene::{rgb, text_width, with_alpha};

pub const THUMBNAIL_MAX: u32 = 32;

/// Raster type of blob thumbnails.
pub type Thumbnail = RgbImage;
const AXIS: scene::Rgba = [60, 60, 60, 255];

/// Three significant digits.
pub fn tick_label(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-3..=4).contains(&exp) {
        return format!("{v:.2e}");
    }
    let decimals = (2 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn value_range(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, v| (r.0.min(*v), r.1.max(*v)))
}

fn colorbar(scene: &mut Scene, x: f64, y: f64, h: f64, lo: f64, hi: f64, color: impl Fn(f64) -> [u8; 3]) {
    let steps = 64;
    for i in 0..steps {
        let t = 1.0 - (i as f64 + 0.5) / steps as f64;
        scene.push(Item::Rect {
            x,
            y: y + h * i as f64 / steps as f64,
            w: 14.0,
            h: h / steps as f64 + 0.01,
            fill: rgb(color(t)),
        });
    }
    let ticks: Vec<f64> = if hi > lo { vec![0.0, 0.25, 0.5, 0.75, 1.0] } else { vec![0.5] };
    for t in ticks {
        let ty = y + h * (1.0 - t);
        scene.push(Item::Polyline {
            points: vec![[x + 14.0, ty], [x + 18.0, ty]],
            stroke: AXIS,
            width: 1.0,
        });
        scene.text(x + 20.0, ty + 3.0, 9.0, Anchor::Start, tick_label(lo + t * (hi - lo)));
    }
}

/// Heatmap of one density grid, or a per-kind overlay of several (text
/// blue, arrow/line green, blob red) composited with alpha.
pub fn render_density(layers: &[(LayoutKind, &DensityGrid)], palette: &Palette, title: &str) -> Result<Scene> {
    let Some((_, first)) = layers.first() else {
        return Err(Error::usage("nothing to render"));
    };
    if layers.iter().any(|(_, g)| g.nx != first.nx || g.ny != first.ny) {
        return Err(Error::usage("overlaid grids must share a resolution"));
    }
    let (nx, ny) = (first.nx as u32, first.ny as u32);
    let side = 320.0;
    let bars = layers.len() as f64;
    let mut scene = Scene::new((side + 90.0 + 50.0 * bars) as u32, (side + 70.0) as u32);
    scene.text(20.0, 24.0, 12.0, Anchor::Start, title);
    let (ox, oy) = (20.0, 40.0);

    let mut pixels = RgbaImage::from_pixel(nx, ny, image::Rgba([255, 255, 255, 255]));
    let ranges: Vec<(f64, f64)> = layers.iter().map(|(_, g)| value_range(&g.values)).collect();
    if layers.len() == 1 {
        let (lo, hi) = ranges[0];
        for (i, v) in first.values.iter().enumerate() {
            let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
            pixels.put_pixel(i as u32 % nx, i as u32 / nx, image::Rgba(rgb(palette.color(t))));
        }
    } else {
        for ((kind, grid), (_, hi)) in layers.iter().zip(&ranges) {
            for (i, v) in grid.values.iter().enumerate() {
                let alpha = if *hi > 0.0 { 0.85 * v / hi } else { 0.0 };
                let px = pixels.get_pixel_mut(i as u32 % nx, i as u32 / nx);
                let src = with_alpha(kind_color(*kind), alpha);
                let a = src[3] as u32;
                for c in 0..3 {
                    px.0[c] = ((src[c] as u32 * a + px.0[c] as u32 * (255 - a) + 127) / 255) as u8;
                }
            }
        }
    }
    scene.push(Item::Image {
        x: ox,
        y: oy,
        w: side,
        h: side,
        pixels,
    });
    scene.push(Item::Polygon {
        points: vec![[ox, oy], [ox + side, oy], [ox + side, oy + side], [ox, oy + side]],
        fill: [0, 0, 0, 0],
        stroke: Some((AXIS, 1.0)),
    });
    for (t, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        scene.text(ox + side * t, oy + side + 14.0, 9.0, Anchor::Middle, label);
    }

    for (b, ((kind, _), (lo, hi))) in layers.iter().zip(&ranges).enumerate() {
        let x = ox + side + 20.0 + 50.0 * b as f64;
        if layers.len() == 1 {
            colorbar(&mut scene, x, oy, side, *lo, *hi, |t| palette.color(t));
        } else {
            let base = kind_color(*kind);
            colorbar(&mut scene, x, oy, side, 0.0, *hi, move |t| {
                let a = 0.85 * t;
                std::array::from_fn(|c| (base[c] as f64 * a + 255.0 * (1.0 - a)).round() as u8)
            });
            scene.text(x, oy + side + 28.0, 9.0, Anchor::Start, kind.as_str());
        }
    }
    Ok(scene)
}

/// Maps data coordinates into a pixel box; the data y axis points up.
#[derive(Debug, Clone, Copy)]
struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Frame {
    fn new(x: f64, y: f64, w: f64, h: f64, xr: (f64, f64), yr: (f64, f64)) -> Self {
        let pad = |r: (f64, f64)| if r.1 > r.0 { r } else { (r.0 - 0.5, r.0 + 0.5) };
        Self { x, y, w, h, xr: pad(xr), yr: pad(yr) }
    }

    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.x + (p[0] - self.xr.0) / (self.xr.1 - self.xr.0) * self.w,
            self.y + self.h - (p[1] - self.yr.0) / (self.yr.1 - self.yr.0) * self.h,
        ]
    }

    fn axes(&self, scene: &mut Scene, x_label: &str, y_label: &str) {
        let (x, y, w, h) = (self.x, self.y, self.w, self.h);
        scene.push(Item::Polygon {
            points: vec![[x, y], [x + w, y], [x + w, y + h], [x, y + h]],
            fill: [0, 0, 0, 0],
            stroke: Some((AXIS, 1.0)),
        });
        scene.text(x, y + h + 14.0, 9.0, Anchor::Start, tick_label(self.xr.0));
        scene.text(x + w, y + h + 14.0, 9.0, Anchor::End, tick_label(self.xr.1));
        scene.text(x - 4.0, y + h, 9.0, Anchor::End, tick_label(self.yr.0));
        scene.text(x - 4.0, y + 9.0, 9.0, Anchor::End, tick_label(self.yr.1));
        scene.text(x + w / 2.0, y + h + 28.0, 10.0, Anchor::Middle, x_label);
        scene.text(x - 4.0, y + h / 2.0, 10.0, Anchor::End, y_label);
    }
}

pub enum ScatterMarks<'a> {
    /// One category label per point.
    Labels(&'a [String]),
    /// One optional thumbnail per point; missing ones fall back to a dot.
    Thumbnails(&'a [Option<RgbImage>]),
}

/// Downscales so the longer side is at most [`THUMBNAIL_MAX`] pixels.
pub fn thumbnail(img: &RgbImage) -> RgbImage {
    let (w, h) = img.dimensions();
    let longest = w.max(h).max(1);
    if longest <= THUMBNAIL_MAX {
        return img.clone();
    }
    let scale = THUMBNAIL_MAX as f64 / longest as f64;
    let (tw, th) = (((w as f64 * scale).round() as u32).max(1), ((h as f64 * scale).round() as u32).max(1));
    imageops::resize(img, tw, th, imageops::FilterType::Triangle)
}

/// Bounding-box crop of a region, or `None` when it misses the image.
pub fn crop_rgb(img: &RgbImage, region: &crate::model::Region) -> Option<RgbImage> {
    let (x0, y0, x1, y1) = region.bounds();
    let (w, h) = img.dimensions();
    let left = x0.floor().max(0.0) as u32;
    let top = y0.floor().max(0.0) as u32;
    let right = (x1.ceil().max(0.0) as u32).min(w);
    let bottom = (y1.ceil().max(0.0) as u32).min(h);
    (right > left && bottom > top).then(|| imageops::crop_imm(img, left, top, right - left, bottom - top).to_image())
}

pub fn render_scatter(points: &[[f64; 2]], marks: ScatterMarks<'_>, title: &str) -> Result<Scene> {
    let n = points.len();
    let count = match &marks {
        ScatterMarks::Labels(l) => l.len(),
        ScatterMarks::Thumbnails(t) => t.len(),
    };
    if count != n {
        return Err(Error::usage(format!("{n} points but {count} marks")));
    }
    let mut scene = Scene::new(720, 600);
    scene.text(20.0, 24.0, 12.0, Anchor::Start, title);
    let xr = value_range(&points.iter().map(|p| p[0]).collect::<Vec<_>>());
    let yr = value_range(&points.iter().map(|p| p[1]).collect::<Vec<_>>());
    let frame = Frame::new(60.0, 40.0, 500.0, 500.0, xr, yr);
    frame.axes(&mut scene, "dimension 1", "dimension 2");
    match marks {
        ScatterMarks::Labels(labels) => {
            let mut names: Vec<&String> = labels.iter().collect();
            names.sort();
            names.dedup();
            let index: BTreeMap<&String, usize> = names.iter().enumerate().map(|(i, l)| (*l, i)).collect();
            for (p, l) in points.iter().zip(labels) {
                let [cx, cy] = frame.map(*p);
                scene.push(Item::Circle {
                    cx,
                    cy,
                    r: 3.0,
                    fill: with_alpha(CATEGORICAL[index[l] % CATEGORICAL.len()], 0.8),
                });
            }
            for (i, name) in names.iter().enumerate() {
                let y = 50.0 + 16.0 * i as f64;
                scene.push(Item::Circle {
                    cx: 580.0,
                    cy: y,
                    r: 4.0,
                    fill: rgb(CATEGORICAL[i % CATEGORICAL.len()]),
                });
                scene.text(590.0, y + 3.0, 9.0, Anchor::Start, name.as_str());
            }
        }
        ScatterMarks::Thumbnails(thumbs) => {
            let mut missing = 0;
            for (p, t) in points.iter().zip(thumbs) {
                let [cx, cy] = frame.map(*p);
                match t {
                    Some(img) => {
                        let small = thumbnail(img);
                        let (w, h) = (small.width() as f64, small.height() as f64);
                        scene.push(Item::Image {
                            x: cx - w / 2.0,
                            y: cy - h / 2.0,
                            w,
                            h,
                            pixels: image::DynamicImage::ImageRgb8(small).to_rgba8(),
                        });
                    }
                    None => {
                        missing += 1;
                        scene.push(Item::Circle {
                            cx,
                            cy,
                            r: 3.0,
                            fill: AXIS,
                        });
                    }
                }
            }
            if missing > 0 {
                log::warn!("{missing} thumbnail(s) unavailable; drawn as points");
            }
        }
    }
    Ok(scene)
}

/// Hexbin heatmap with marginal histograms and kernel density curves. `xs`
/// and `ys` are the binned points.
pub fn render_hex_panel(summary: &HexSummary, xs: &[f64], ys: &[f64], palette: &Palette, title: &str) -> Result<Scene> {
    if summary.counts.is_empty() {
        return Err(Error::usage("empty hexbin summary"));
    }
    let mut scene = Scene::new(600, 600);
    scene.text(20.0, 24.0, 12.0, Anchor::Start, title);
    let g = &summary.grid;
    let main = Frame::new(60.0, 150.0, 380.0, 380.0, (g.x_range[0], g.x_range[1]), (g.y_range[0], g.y_range[1]));
    let max = summary.counts.values().copied().max().unwrap_or(1) as f64;
    for (&(q, r), &c) in &summary.counts {
        let corners: Vec<[f64; 2]> = g.corners(q, r).iter().map(|p| main.map(*p)).collect();
        scene.push(Item::Polygon {
            points: corners,
            fill: rgb(palette.color(c as f64 / max)),
            stroke: None,
        });
    }
    main.axes(&mut scene, "dimension 1", "dimension 2");

    // top marginal: x histogram
    let top = Frame::new(main.x, 40.0, main.w, 100.0, main.xr, (0.0, 1.0));
    let right = Frame::new(450.0, main.y, 100.0, main.h, (0.0, 1.0), main.yr);
    let hx = &summary.marginal_x;
    let hy = &summary.marginal_y;
    let peak = |counts: &[usize]| counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let (px, py) = (peak(&hx.counts), peak(&hy.counts));
    let bar = rgb(palette.color(0.6));
    for (i, c) in hx.counts.iter().enumerate() {
        let [x0, y0] = top.map([hx.edges[i], *c as f64 / px]);
        let [x1, y1] = top.map([hx.edges[i + 1], 0.0]);
        scene.push(Item::Rect { x: x0, y: y0, w: x1 - x0, h: y1 - y0, fill: bar });
    }
    for (i, c) in hy.counts.iter().enumerate() {
        let [x0, y0] = right.map([0.0, hy.edges[i + 1]]);
        let [x1, y1] = right.map([*c as f64 / py, hy.edges[i]]);
        scene.push(Item::Rect { x: x0, y: y0, w: x1 - x0, h: y1 - y0, fill: bar });
    }

    let curve = |values: &[f64], edges: &[f64], peak: f64| -> Result<Vec<(f64, f64)>> {
        let (lo, hi) = (edges[0], edges[edges.len() - 1]);
        let width = (hi - lo) / (edges.len() - 1) as f64;
        let grid: Vec<f64> = (0..100).map(|i| lo + (hi - lo) * i as f64 / 99.0).collect();
        let dens = kde1d(values, &grid, None)?;
        // density scaled to expected counts per bin
        Ok(grid.into_iter().zip(dens).map(|(x, d)| (x, d * values.len() as f64 * width / peak)).collect())
    };
    let line = rgb([30, 30, 30]);
    if hx.edges[0] < hx.edges[hx.edges.len() - 1] {
        let pts = curve(xs, &hx.edges, px)?.into_iter().map(|(x, v)| top.map([x, v.min(1.2)])).collect();
        scene.push(Item::Polyline { points: pts, stroke: line, width: 1.5 });
    }
    if hy.edges[0] < hy.edges[hy.edges.len() - 1] {
        let pts = curve(ys, &hy.edges, py)?.into_iter().map(|(y, v)| right.map([v.min(1.2), y])).collect();
        scene.push(Item::Polyline { points: pts, stroke: line, width: 1.5 });
    }
    scene.text(560.0, 40.0 + text_width("n", 9.0), 9.0, Anchor::End, format!("n={}", summary.n));
    Ok(scene)
}

pub fn write_svg(scene: &Scene, path: &Path) -> Result<()> {
    std::fs::write(path, to_svg(scene)).map_err(|e| Error::io(path, e))
}

pub fn write_png(scene: &Scene, path: &Path) -> Result<()> {
    let bytes = svg::encode_rgba(&rasterize(scene)).map_err(|e| Error::data(format!("png encoding failed: {e}")))?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::hexbin;
    use crate::geometry::Point;
    use crate::layout::kde2d;

    fn luma(p: &image::Rgba<u8>) -> f64 {
        palette::luminance([p.0[0], p.0[1], p.0[2]])
    }

    #[test]
    fn constant_grid_single_tick() {
        let grid = DensityGrid { nx: 4, ny: 4, values: vec![2.0; 16], bandwidth: (0.1, 0.1), n_points: 1 };
        let s = render_density(&[(LayoutKind::Blob, &grid)], &Palette::default(), "c").unwrap();
        let ticks = s.count(|i| matches!(i, Item::Polyline { points, .. } if points.len() == 2));
        assert_eq!(ticks, 1);
        let Item::Image { pixels, .. } = &s.items[1] else { panic!() };
        let first = pixels.get_pixel(0, 0);
        assert!(pixels.pixels().all(|p| p == first));
    }

    #[test]
    fn brightest_pixel_in_argmax_cell() {
        let grid = kde2d(&[Point::new(0.3, 0.7)], (32, 32), Some((0.08, 0.08))).unwrap();
        let s = render_density(&[(LayoutKind::Blob, &grid)], &Palette::default(), "peak").unwrap();
        let img = rasterize(&s);
        let (mut best, mut at) = (f64::MIN, (0, 0));
        for y in 40..360 {
            for x in 20..340 {
                let l = luma(img.get_pixel(x, y));
                if l > best {
                    best = l;
                    at = (x, y);
                }
            }
        }
        let arg = grid.argmax();
        let cell = 320.0 / 32.0;
        let (cx, cy) = (20.0 + arg.x * 320.0, 40.0 + arg.y * 320.0);
        assert!((at.0 as f64 + 0.5 - cx).abs() <= cell / 2.0 + 0.5 && (at.1 as f64 + 0.5 - cy).abs() <= cell / 2.0 + 0.5);
    }

    #[test]
    fn rerender_is_identical() {
        let grid = kde2d(&[Point::new(0.3, 0.7), Point::new(0.6, 0.2)], (16, 16), None).unwrap();
        let a = to_svg(&render_density(&[(LayoutKind::Text, &grid), (LayoutKind::Blob, &grid)], &Palette::default(), "x").unwrap());
        let b = to_svg(&render_density(&[(LayoutKind::Text, &grid), (LayoutKind::Blob, &grid)], &Palette::default(), "x").unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn scatter_label_colors() {
        let labels = vec!["a".to_string(), "b".into(), "c".into()];
        let s = render_scatter(&[[0.0, 0.0], [1.0, 1.0], [2.0, 0.5]], ScatterMarks::Labels(&labels), "s").unwrap();
        let fills: Vec<scene::Rgba> = s
            .items
            .iter()
            .filter_map(|i| match i {
                Item::Circle { r, fill, .. } if *r == 3.0 => Some(*fill),
                _ => None,
            })
            .collect();
        assert_eq!(fills.len(), 3);
        assert!(fills[0] != fills[1] && fills[1] != fills[2] && fills[0] != fills[2]);
    }

    #[test]
    fn scatter_thumbnails_one_per_point() {
        let thumbs = vec![Some(RgbImage::new(64, 40)), None, Some(RgbImage::new(10, 10))];
        let s = render_scatter(&[[0.0, 0.0], [1.0, 1.0], [2.0, 0.5]], ScatterMarks::Thumbnails(&thumbs), "t").unwrap();
        assert_eq!(s.count(|i| matches!(i, Item::Image { .. })), 2);
        let big = s.items.iter().find_map(|i| match i {
            Item::Image { pixels, .. } if pixels.width() == 32 => Some(pixels.height()),
            _ => None,
        });
        assert_eq!(big, Some(20));
    }

    #[test]
    fn hex_panel_has_twenty_bars_per_margin() {
        let pts: Vec<[f64; 2]> = (0..50).map(|i| [i as f64, (i * 7 % 13) as f64]).collect();
        let h = hexbin(&pts, &vec![true; 50], 10).unwrap();
        let xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p[1]).collect();
        let s = render_hex_panel(&h, &xs, &ys, &Palette::default(), "h").unwrap();
        assert_eq!(s.count(|i| matches!(i, Item::Rect { .. })), 40);
        assert_eq!(s.count(|i| matches!(i, Item::Polygon { stroke: None, .. })), h.counts.len());
        let a = to_svg(&s);
        assert_eq!(a, to_svg(&render_hex_panel(&h, &xs, &ys, &Palette::default(), "h").unwrap()));
    }

    #[test]
    fn crop_clips_to_image() {
        let img = RgbImage::from_fn(10, 10, |x, y| image::Rgb([x as u8, y as u8, 0]));
        let c = crop_rgb(&img, &crate::model::Region::bbox(7.5, 2.0, 20.0, 4.0)).unwrap();
        assert_eq!(c.dimensions(), (3, 2));
        assert_eq!(c.get_pixel(0, 0).0, [7, 2, 0]);
        assert!(crop_rgb(&img, &crate::model::Region::bbox(20.0, 20.0, 30.0, 30.0)).is_none());
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick_label(0.0), "0");
        assert_eq!(tick_label(1.2345), "1.23");
        assert_eq!(tick_label(123.4), "123");
        assert_eq!(tick_label(0.01234), "0.0123");
    }
}
