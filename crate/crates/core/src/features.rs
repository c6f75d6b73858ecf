//! Brightness and texture descriptors of blob crops.
//!
//! Each blob yields a 64-bin grayscale histogram and a rotation-invariant
//! uniform LBP histogram (26 bins at the default 24 neighbours), both
//! normalized to relative frequencies.

use image::{GrayImage, Luma, RgbImage};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::geometry::{point_in_polygon, Point};
use crate::model::{ElementKind, Region};

pub const BRIGHTNESS_BINS: usize = 64;
pub const DEFAULT_LBP_NEIGHBORS: usize = 24;
pub const DEFAULT_LBP_RADIUS: f64 = 3.0;

/// Integer BT.601 luma, rounded half up.
pub fn luma([r, g, b]: [u8; 3]) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |x, y| Luma([luma(img.get_pixel(x, y).0)]))
}

/// Axis-aligned crop of a region with its membership mask. Pixels outside
/// the mask hold white.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobCrop {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub mask: Vec<bool>,
}

impl BlobCrop {
    pub fn from_gray(width: usize, height: usize, pixels: Vec<u8>) -> Self {
        let mask = vec![true; pixels.len()];
        Self {
            width,
            height,
            pixels,
            mask,
        }
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    fn at(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Crops `region` out of a grayscale image. With `mask` false the whole
/// bounding rectangle is kept as is.
pub fn crop_blob(gray: &GrayImage, region: &Region, mask: bool) -> Result<BlobCrop> {
    let (x0, y0, x1, y1) = region.bounds();
    let (w, h) = (gray.width() as f64, gray.height() as f64);
    if !(x0 < w && y0 < h && x1 > 0.0 && y1 > 0.0) {
        return Err(Error::data("region lies outside the image"));
    }
    let cx0 = x0.max(0.0).floor() as u32;
    let cy0 = y0.max(0.0).floor() as u32;
    let cx1 = (x1.min(w).ceil() as u32).max(cx0 + 1);
    let cy1 = (y1.min(h).ceil() as u32).max(cy0 + 1);
    let (cw, ch) = ((cx1 - cx0) as usize, (cy1 - cy0) as usize);
    let polygon = match region {
        Region::Polygon(_) if mask => Some(region.vertices()),
        _ => None,
    };
    let mut pixels = Vec::with_capacity(cw * ch);
    let mut membership = Vec::with_capacity(cw * ch);
    for y in cy0..cy1 {
        for x in cx0..cx1 {
            let inside = match &polygon {
                Some(p) => point_in_polygon(Point::new(x as f64 + 0.5, y as f64 + 0.5), p),
                None => true,
            };
            membership.push(inside);
            pixels.push(if inside { gray.get_pixel(x, y).0[0] } else { 255 });
        }
    }
    if !membership.iter().any(|m| *m) {
        return Err(Error::data("region covers no pixel centre"));
    }
    Ok(BlobCrop {
        width: cw,
        height: ch,
        pixels,
        mask: membership,
    })
}

/// Relative frequency of masked pixel values in 64 bins of width 4.
pub fn gray_histogram(crop: &BlobCrop) -> Vec<f64> {
    let mut counts = [0u64; BRIGHTNESS_BINS];
    for (v, m) in crop.pixels.iter().zip(&crop.mask) {
        if *m {
            counts[(*v >> 2) as usize] += 1;
        }
    }
    normalize(&counts)
}

fn normalize(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|c| *c as f64 / total as f64).collect()
}

/// Sampling offsets (dy, dx) around the circle, rounded to 5 decimals so
/// that axis-aligned points land exactly on pixels.
fn circle_offsets(neighbors: usize, radius: f64) -> Vec<(f64, f64)> {
    let round5 = |v: f64| (v * 1e5).round() / 1e5;
    (0..neighbors)
        .map(|p| {
            let t = std::f64::consts::TAU * p as f64 / neighbors as f64;
            (round5(-radius * t.sin()), round5(radius * t.cos()))
        })
        .collect()
}

fn bilinear(crop: &BlobCrop, y: f64, x: f64) -> f64 {
    let (fy, fx) = (y.floor(), x.floor());
    let (r0, c0) = (fy as usize, fx as usize);
    let r1 = (r0 + 1).min(crop.height - 1);
    let c1 = (c0 + 1).min(crop.width - 1);
    let (ty, tx) = (y - fy, x - fx);
    let lerp = |a: f64, b: f64, t: f64| a + t * (b - a);
    let top = lerp(crop.at(c0, r0) as f64, crop.at(c1, r0) as f64, tx);
    let bottom = lerp(crop.at(c0, r1) as f64, crop.at(c1, r1) as f64, tx);
    lerp(top, bottom, ty)
}

/// Bucket of a code under the rotation-invariant uniform mapping.
pub fn uniform_bucket(bits: &[bool]) -> usize {
    let p = bits.len();
    let transitions = (0..p).filter(|&i| bits[i] != bits[(i + 1) % p]).count();
    if transitions <= 2 {
        bits.iter().filter(|b| **b).count()
    } else {
        p + 1
    }
}

/// Rotation-invariant uniform LBP histogram with `neighbors + 2` bins over
/// masked pixels whose whole sampling circle lies inside the crop.
pub fn lbp_histogram(crop: &BlobCrop, neighbors: usize, radius: f64) -> Result<Vec<f64>> {
    if neighbors == 0 || !(radius > 0.0) {
        return Err(Error::usage("LBP needs at least one neighbour and a positive radius"));
    }
    let margin = radius.ceil() as usize;
    let min = 2 * margin + 1;
    if crop.width < min || crop.height < min {
        return Err(Error::data(format!(
            "crop {}x{} is smaller than the {min}x{min} LBP window",
            crop.width, crop.height
        )));
    }
    let offsets = circle_offsets(neighbors, radius);
    let mut counts = vec![0u64; neighbors + 2];
    let mut bits = vec![false; neighbors];
    for y in margin..crop.height - margin {
        for x in margin..crop.width - margin {
            if !crop.mask[y * crop.width + x] {
                continue;
            }
            let center = crop.at(x, y) as f64;
            for (bit, (dy, dx)) in bits.iter_mut().zip(&offsets) {
                *bit = bilinear(crop, y as f64 + dy, x as f64 + dx) >= center;
            }
            counts[uniform_bucket(&bits)] += 1;
        }
    }
    if counts.iter().all(|c| *c == 0) {
        return Err(Error::data("no masked pixel has a complete LBP neighbourhood"));
    }
    Ok(normalize(&counts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureVector {
    pub diagram_id: String,
    pub element_id: String,
    pub brightness: Vec<f64>,
    pub texture: Vec<f64>,
}

impl FeatureVector {
    pub fn combined(&self) -> Vec<f64> {
        let mut v = self.brightness.clone();
        v.extend_from_slice(&self.texture);
        v
    }

    pub fn dim(&self) -> usize {
        self.brightness.len() + self.texture.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureOptions {
    pub lbp_neighbors: usize,
    pub lbp_radius: f64,
    /// Restrict polygon crops to the region and fill the rest with white.
    pub mask: bool,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self {
            lbp_neighbors: DEFAULT_LBP_NEIGHBORS,
            lbp_radius: DEFAULT_LBP_RADIUS,
            mask: true,
        }
    }
}

pub fn blob_features(gray: &GrayImage, region: &Region, opts: &FeatureOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    let crop = crop_blob(gray, region, opts.mask)?;
    let texture = lbp_histogram(&crop, opts.lbp_neighbors, opts.lbp_radius)?;
    Ok((gray_histogram(&crop), texture))
}

/// A blob that produced no feature row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedBlob {
    pub diagram_id: String,
    pub element_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    /// Sorted by (diagram_id, element_id).
    pub rows: Vec<FeatureVector>,
    pub skipped: Vec<SkippedBlob>,
}

impl FeatureTable {
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(FeatureVector::combined).collect()
    }
}

pub fn extract_features(corpus: &Corpus, opts: &FeatureOptions) -> Result<FeatureTable> {
    if opts.lbp_neighbors == 0 || opts.lbp_neighbors > 64 || !(opts.lbp_radius > 0.0) {
        return Err(Error::usage(format!(
            "invalid LBP parameters: {} neighbours, radius {}",
            opts.lbp_neighbors, opts.lbp_radius
        )));
    }
    let per_diagram: Vec<Result<(Vec<FeatureVector>, Vec<SkippedBlob>)>> = corpus
        .diagrams
        .par_iter()
        .map(|d| {
            let mut rows = Vec::new();
            let mut skipped = Vec::new();
            let mut blobs: Vec<_> = d.elements_of(ElementKind::Blob).collect();
            if blobs.is_empty() {
                return Ok((rows, skipped));
            }
            blobs.sort_by(|a, b| a.id.cmp(&b.id));
            let skip_all = |reason: &str, skipped: &mut Vec<SkippedBlob>| {
                for b in &blobs {
                    skipped.push(SkippedBlob {
                        diagram_id: d.id.clone(),
                        element_id: b.id.clone(),
                        reason: reason.to_string(),
                    });
                }
            };
            let image = match corpus.load_image(&d.id) {
                Ok(Some(img)) => img,
                Ok(None) => {
                    skip_all("image missing", &mut skipped);
                    return Ok((rows, skipped));
                }
                Err(e) => {
                    skip_all(&e.to_string(), &mut skipped);
                    return Ok((rows, skipped));
                }
            };
            let gray = to_grayscale(&image);
            for b in &blobs {
                match blob_features(&gray, &b.region, opts) {
                    Ok((brightness, texture)) => rows.push(FeatureVector {
                        diagram_id: d.id.clone(),
                        element_id: b.id.clone(),
                        brightness,
                        texture,
                    }),
                    Err(Error::Usage(m)) => return Err(Error::Usage(m)),
                    Err(e) => skipped.push(SkippedBlob {
                        diagram_id: d.id.clone(),
                        element_id: b.id.clone(),
                        reason: e.to_string(),
                    }),
                }
            }
            Ok((rows, skipped))
        })
        .collect();
    let mut table = FeatureTable::default();
    for r in per_diagram {
        let (rows, skipped) = r?;
        table.rows.extend(rows);
        table.skipped.extend(skipped);
    }
    table
        .rows
        .sort_by(|a, b| (&a.diagram_id, &a.element_id).cmp(&(&b.diagram_id, &b.element_id)));
    for s in &table.skipped {
        log::warn!("blob {}/{} skipped: {}", s.diagram_id, s.element_id, s.reason);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Codes enumerated per pixel with an independently written sampler.
    fn oracle_lbp(px: &[Vec<f64>], p: usize, r: f64) -> Vec<f64> {
        let h = px.len();
        let w = px[0].len();
        let m = r.ceil() as usize;
        let mut counts = vec![0usize; p + 2];
        for y in m..h - m {
            for x in m..w - m {
                let c = px[y][x];
                let mut code: u64 = 0;
                for k in 0..p {
                    let ang = 2.0 * std::f64::consts::PI * k as f64 / p as f64;
                    let sy = y as f64 - ((r * ang.sin()) * 1e5).round() / 1e5;
                    let sx = x as f64 + ((r * ang.cos()) * 1e5).round() / 1e5;
                    let (iy, ix) = (sy.floor() as usize, sx.floor() as usize);
                    let (wy, wx) = (sy - iy as f64, sx - ix as f64);
                    let g = |yy: usize, xx: usize| px[yy.min(h - 1)][xx.min(w - 1)];
                    let v = g(iy, ix) * (1.0 - wy) * (1.0 - wx)
                        + g(iy, ix + 1) * (1.0 - wy) * wx
                        + g(iy + 1, ix) * wy * (1.0 - wx)
                        + g(iy + 1, ix + 1) * wy * wx;
                    if v >= c - 1e-9 {
                        code |= 1 << k;
                    }
                }
                let rotated = (code >> 1) | ((code & 1) << (p - 1));
                let u = (code ^ rotated).count_ones() as usize;
                let bucket = if u <= 2 { code.count_ones() as usize } else { p + 1 };
                counts[bucket] += 1;
            }
        }
        let total: usize = counts.iter().sum();
        counts.iter().map(|c| *c as f64 / total as f64).collect()
    }

    fn crop_from(rows: &[Vec<u8>]) -> BlobCrop {
        BlobCrop::from_gray(rows[0].len(), rows.len(), rows.concat())
    }

    #[test]
    fn luma_values() {
        assert_eq!(luma([255, 255, 255]), 255);
        assert_eq!(luma([0, 0, 0]), 0);
        assert_eq!(luma([255, 0, 0]), (0.299f64 * 255.0).round() as u8);
        assert_eq!(luma([255, 0, 0]), 76);
    }

    #[test]
    fn bbox_crop_is_exact() {
        let gray = GrayImage::from_pixel(40, 30, Luma([128]));
        let c = crop_blob(&gray, &Region::bbox(5.0, 6.0, 15.0, 26.0), true).unwrap();
        assert_eq!((c.width, c.height), (10, 20));
        assert_eq!(c.masked_count(), 200);
    }

    #[test]
    fn triangle_crop_whitens_corners() {
        let gray = GrayImage::from_pixel(20, 20, Luma([0]));
        let c = crop_blob(&gray, &Region::polygon([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]]), true).unwrap();
        assert_eq!(c.at(9, 9), 255);
        assert_eq!(c.at(0, 0), 0);
        let raw = crop_blob(&gray, &Region::polygon([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]]), false).unwrap();
        assert_eq!(raw.at(9, 9), 0);
    }

    #[test]
    fn outside_region_is_error() {
        let gray = GrayImage::from_pixel(10, 10, Luma([0]));
        assert!(crop_blob(&gray, &Region::bbox(20.0, 20.0, 30.0, 30.0), true).is_err());
    }

    #[test]
    fn mask_matches_supersampling() {
        let poly = [[3.2, 4.1], [40.7, 2.3], [55.0, 30.5], [31.4, 47.9], [20.0, 25.0], [5.5, 38.2], [1.0, 15.0]];
        let region = Region::polygon(poly);
        let verts = region.vertices();
        let gray = GrayImage::from_pixel(60, 60, Luma([0]));
        let c = crop_blob(&gray, &region, true).unwrap();
        let mut disagree = 0;
        for y in 0..c.height {
            for x in 0..c.width {
                let mut inside = 0;
                for sy in 0..10 {
                    for sx in 0..10 {
                        let p = Point::new(1.0 + x as f64 + (sx as f64 + 0.5) / 10.0, 2.0 + y as f64 + (sy as f64 + 0.5) / 10.0);
                        inside += point_in_polygon(p, &verts) as usize;
                    }
                }
                if (inside >= 50) != c.mask[y * c.width + x] {
                    disagree += 1;
                }
            }
        }
        assert!((disagree as f64) < 0.02 * (c.width * c.height) as f64, "{disagree}");
    }

    #[test]
    fn black_crop_fills_bin_zero() {
        let h = gray_histogram(&BlobCrop::from_gray(4, 4, vec![0; 16]));
        assert_eq!(h[0], 1.0);
        assert_eq!(h.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn bin_edges() {
        let h = gray_histogram(&BlobCrop::from_gray(2, 1, vec![3, 4]));
        assert_eq!((h[0], h[1]), (0.5, 0.5));
    }

    #[test]
    fn mixed_values_match_counting() {
        let px: Vec<u8> = (0..64).map(|i| ((i * 37 + 11) % 256) as u8).collect();
        let h = gray_histogram(&BlobCrop::from_gray(8, 8, px.clone()));
        for (k, v) in h.iter().enumerate() {
            let n = px.iter().filter(|p| (**p as usize) >= 4 * k && (**p as usize) <= 4 * k + 3).count();
            assert_eq!(*v, n as f64 / 64.0);
        }
    }

    #[test]
    fn constant_crop_is_all_ones() {
        let h = lbp_histogram(&BlobCrop::from_gray(12, 12, vec![90; 144]), 24, 3.0).unwrap();
        assert_eq!(h.len(), 26);
        assert_eq!(h[24], 1.0);
    }

    #[test]
    fn bright_center_is_all_zeros() {
        let mut px = vec![0u8; 81];
        px[4 * 9 + 4] = 255;
        let h = lbp_histogram(&BlobCrop::from_gray(9, 9, px), 24, 3.0).unwrap();
        // the centre contributes to popcount 0; the other interior pixels are darker or tied
        assert!(h[0] > 0.0);
    }

    #[test]
    fn small_crop_names_minimum() {
        let err = lbp_histogram(&BlobCrop::from_gray(5, 5, vec![0; 25]), 24, 3.0).unwrap_err();
        assert!(err.to_string().contains("7x7"));
    }

    #[test]
    fn random_crop_matches_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<u8>> = (0..16).map(|_| (0..16).map(|_| rng.random()).collect()).collect();
        let got = lbp_histogram(&crop_from(&rows), 24, 3.0).unwrap();
        let f: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| *v as f64).collect()).collect();
        let want = oracle_lbp(&f, 24, 3.0);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn rotation_by_quarter_turn() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let n = 24;
        let rows: Vec<Vec<u8>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(0..4) * 60).collect()).collect();
        let rotated: Vec<Vec<u8>> = (0..n).map(|y| (0..n).map(|x| rows[n - 1 - x][y]).collect()).collect();
        let a = lbp_histogram(&crop_from(&rows), 24, 3.0).unwrap();
        let b = lbp_histogram(&crop_from(&rotated), 24, 3.0).unwrap();
        let l1: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        assert!(l1 < 0.05, "{l1}");
    }

    proptest! {
        #[test]
        fn histograms_sum_to_one(px in prop::collection::vec(any::<u8>(), 100)) {
            let crop = BlobCrop::from_gray(10, 10, px);
            let g = gray_histogram(&crop);
            let t = lbp_histogram(&crop, 24, 3.0).unwrap();
            prop_assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn gray_histogram_ignores_order(mut px in prop::collection::vec(any::<u8>(), 1..200), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let n = px.len();
            let a = gray_histogram(&BlobCrop::from_gray(n, 1, px.clone()));
            px.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(a, gray_histogram(&BlobCrop::from_gray(n, 1, px)));
        }

        #[test]
        fn white_padding_outside_mask_is_ignored(px in prop::collection::vec(any::<u8>(), 64), pad in 1usize..6) {
            let crop = BlobCrop::from_gray(8, 8, px.clone());
            let w = 8 + 2 * pad;
            let mut padded = BlobCrop { width: w, height: w, pixels: vec![255; w * w], mask: vec![false; w * w] };
            for y in 0..8 {
                for x in 0..8 {
                    padded.pixels[(y + pad) * w + x + pad] = px[y * 8 + x];
                    padded.mask[(y + pad) * w + x + pad] = true;
                }
            }
            prop_assert_eq!(gray_histogram(&crop), gray_histogram(&padded));
        }

        #[test]
        fn translation_invariant(px in prop::collection::vec(any::<u8>(), 144), dx in 0usize..5, dy in 0usize..5) {
            let place = |ox: usize, oy: usize| {
                let w = 24;
                let mut c = BlobCrop { width: w, height: w, pixels: vec![255; w * w], mask: vec![false; w * w] };
                for y in 0..12 {
                    for x in 0..12 {
                        c.pixels[(y + oy) * w + x + ox] = px[y * 12 + x];
                        c.mask[(y + oy) * w + x + ox] = true;
                    }
                }
                c
            };
            let a = place(4, 4);
            let b = place(4 + dx, 4 + dy);
            prop_assert_eq!(gray_histogram(&a), gray_histogram(&b));
            prop_assert_eq!(lbp_histogram(&a, 24, 3.0).unwrap(), lbp_histogram(&b, 24, 3.0).unwrap());
        }
    }
}
