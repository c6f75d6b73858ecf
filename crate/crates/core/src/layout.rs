//! Element centroids in the unit layout square and their kernel density.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{polygon_centroid, vertex_mean, Point};
use crate::model::{CategorySchemes, Diagram, ElementKind, Region};

pub const DEFAULT_RESOLUTION: (usize, usize) = (128, 128);
pub const DEFAULT_MIN_POINTS: usize = 10;
pub const BANDWIDTH_FLOOR: f64 = 1e-3;

/// Element kinds as pooled for layout statistics: arrows count as lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutKind {
    Text,
    ArrowLine,
    Blob,
    Arrowhead,
}

impl LayoutKind {
    pub const DEFAULT: [LayoutKind; 3] = [LayoutKind::Text, LayoutKind::ArrowLine, LayoutKind::Blob];

    pub fn of(kind: ElementKind) -> Self {
        match kind {
            ElementKind::Text => LayoutKind::Text,
            ElementKind::Arrow => LayoutKind::ArrowLine,
            ElementKind::Blob => LayoutKind::Blob,
            ElementKind::Arrowhead => LayoutKind::Arrowhead,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayoutKind::Text => "text",
            LayoutKind::ArrowLine => "arrow-line",
            LayoutKind::Blob => "blob",
            LayoutKind::Arrowhead => "arrowhead",
        }
    }
}

impl std::str::FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(LayoutKind::Text),
            "arrow-line" | "arrow" | "line" => Ok(LayoutKind::ArrowLine),
            "blob" => Ok(LayoutKind::Blob),
            "arrowhead" => Ok(LayoutKind::Arrowhead),
            other => Err(Error::usage(format!("unknown element kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centroid {
    pub point: Point,
    /// The polygon had (near) zero area and the vertex mean was used.
    pub degenerate: bool,
}

/// Pixel centroid: box centre, or the area-weighted polygon centroid.
pub fn centroid(region: &Region) -> Centroid {
    match region {
        Region::BBox([x0, y0, x1, y1]) => Centroid {
            point: Point::new((x0 + x1) / 2.0, (y0 + y1) / 2.0),
            degenerate: false,
        },
        Region::Polygon(_) => {
            let verts = region.vertices();
            match polygon_centroid(&verts) {
                Some(point) => Centroid {
                    point,
                    degenerate: false,
                },
                None => Centroid {
                    point: vertex_mean(&verts),
                    degenerate: true,
                },
            }
        }
    }
}

/// Divides by the image size and clamps to the unit square. The flag is
/// set when clamping changed the point.
pub fn normalize(p: Point, width: f64, height: f64) -> (Point, bool) {
    let raw = Point::new(p.x / width, p.y / height);
    let clamped = Point::new(raw.x.clamp(0.0, 1.0), raw.y.clamp(0.0, 1.0));
    (clamped, clamped != raw)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentroidRecord {
    pub diagram_id: String,
    pub element_id: String,
    pub kind: ElementKind,
    pub x: f64,
    pub y: f64,
}

/// Normalized centroids of every element, with warnings for degenerate
/// polygons and clamped points.
pub fn diagram_centroids(d: &Diagram, include_arrowheads: bool) -> (Vec<CentroidRecord>, Vec<String>) {
    let (w, h) = (d.image_size.width as f64, d.image_size.height as f64);
    let mut out = Vec::with_capacity(d.elements.len());
    let mut warnings = Vec::new();
    if w <= 0.0 || h <= 0.0 {
        warnings.push(format!("{}: zero image size, centroids skipped", d.id));
        return (out, warnings);
    }
    for e in &d.elements {
        if e.kind == ElementKind::Arrowhead && !include_arrowheads {
            continue;
        }
        let c = centroid(&e.region);
        if c.degenerate {
            warnings.push(format!("{}/{}: degenerate polygon, using vertex mean", d.id, e.id));
        }
        let (p, clamped) = normalize(c.point, w, h);
        if clamped {
            warnings.push(format!(
                "{}/{}: centroid ({:.3}, {:.3}) outside the image, clamped",
                d.id, e.id, c.point.x, c.point.y
            ));
        }
        out.push(CentroidRecord {
            diagram_id: d.id.clone(),
            element_id: e.id.clone(),
            kind: e.kind,
            x: p.x,
            y: p.y,
        });
    }
    (out, warnings)
}

pub fn centroids(diagrams: &[Diagram], include_arrowheads: bool) -> Vec<CentroidRecord> {
    let mut out = Vec::new();
    for d in diagrams {
        let (records, warnings) = diagram_centroids(d, include_arrowheads);
        for w in warnings {
            log::warn!("{w}");
        }
        out.extend(records);
    }
    out
}

/// Density evaluated at the cell centres of a uniform grid over the unit
/// square. Row-major; row 0 is the top of the layout (y near 0).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub bandwidth: (f64, f64),
    pub n_points: usize,
}

impl DensityGrid {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        Point::new((ix as f64 + 0.5) / self.nx as f64, (iy as f64 + 0.5) / self.ny as f64)
    }

    /// Integral of the density over the unit square (midpoint rule).
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / (self.nx * self.ny) as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> Point {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if *v > best.1 { (i, *v) } else { best });
        self.cell_center(i % self.nx, i / self.nx)
    }

    /// Cells that beat all eight neighbours (ties go to the lower index),
    /// strongest first.
    pub fn local_maxima(&self) -> Vec<(Point, f64)> {
        let mut peaks = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let idx = iy * self.nx + ix;
                let v = self.values[idx];
                if v <= 0.0 {
                    continue;
                }
                let mut is_peak = true;
                'n: for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (x, y) = (ix as i64 + dx, iy as i64 + dy);
                        if x < 0 || y < 0 || x >= self.nx as i64 || y >= self.ny as i64 {
                            continue;
                        }
                        let j = y as usize * self.nx + x as usize;
                        let w = self.values[j];
                        if w > v || (w == v && j < idx) {
                            is_peak = false;
                            break 'n;
                        }
                    }
                }
                if is_peak {
                    peaks.push((self.cell_center(ix, iy), v));
                }
            }
        }
        peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
        peaks
    }
}

fn sample_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n < 2 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let ss: f64 = values.map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Scott's rule per axis, floored at [`BANDWIDTH_FLOOR`].
pub fn scott_bandwidth(points: &[Point]) -> (f64, f64) {
    let factor = (points.len() as f64).powf(-1.0 / 6.0);
    let hx = factor * sample_sd(points.iter().map(|p| p.x));
    let hy = factor * sample_sd(points.iter().map(|p| p.y));
    (hx.max(BANDWIDTH_FLOOR), hy.max(BANDWIDTH_FLOOR))
}

pub fn gaussian(u: f64, h: f64) -> f64 {
    (-0.5 * (u / h).powi(2)).exp() / (h * (2.0 * std::f64::consts::PI).sqrt())
}

/// Gaussian product-kernel density on an `nx`×`ny` grid.
pub fn kde2d(points: &[Point], resolution: (usize, usize), bandwidth: Option<(f64, f64)>) -> Result<DensityGrid> {
    if points.is_empty() {
        return Err(Error::usage("density estimate needs at least one point"));
    }
    let (nx, ny) = resolution;
    if nx == 0 || ny == 0 {
        return Err(Error::usage("density grid resolution must be positive"));
    }
    let (hx, hy) = match bandwidth {
        Some((hx, hy)) if hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite() => (hx, hy),
        Some((hx, hy)) => return Err(Error::usage(format!("invalid bandwidth {hx},{hy}"))),
        None => scott_bandwidth(points),
    };
    let n = points.len();
    // kx[i * n + p]: kernel weight of point p at column i
    let kx: Vec<f64> = (0..nx)
        .flat_map(|i| {
            let gx = (i as f64 + 0.5) / nx as f64;
            points.iter().map(move |p| gaussian(gx - p.x, hx))
        })
        .collect();
    let mut values = vec![0.0; nx * ny];
    values.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let gy = (j as f64 + 0.5) / ny as f64;
        let ky: Vec<f64> = points.iter().map(|p| gaussian(gy - p.y, hy)).collect();
        for (i, cell) in row.iter_mut().enumerate() {
            let col = &kx[i * n..(i + 1) * n];
            let mut sum = 0.0;
            for p in 0..n {
                sum += col[p] * ky[p];
            }
            *cell = sum / n as f64;
        }
    });
    Ok(DensityGrid {
        nx,
        ny,
        values,
        bandwidth: (hx, hy),
        n_points: n,
    })
}

/// One-dimensional Gaussian density of `values` evaluated at `at`. The
/// default bandwidth is Scott's rule, `n^(-1/5)·σ̂`, floored relative to
/// the data range.
pub fn kde1d(values: &[f64], at: &[f64], bandwidth: Option<f64>) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::usage("density estimate needs at least one value"));
    }
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(Error::usage(format!("invalid bandwidth {h}"))),
        None => {
            let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |r, v| (r.0.min(*v), r.1.max(*v)));
            let floor = BANDWIDTH_FLOOR * if hi > lo { hi - lo } else { 1.0 };
            ((values.len() as f64).powf(-0.2) * sample_sd(values.iter().copied())).max(floor)
        }
    };
    let n = values.len() as f64;
    Ok(at
        .iter()
        .map(|x| values.iter().map(|v| gaussian(x - v, h)).sum::<f64>() / n)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    Semantic,
    Structural,
}

impl std::str::FromStr for GroupBy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semantic" => Ok(GroupBy::Semantic),
            "structural" => Ok(GroupBy::Structural),
            other => Err(Error::usage(format!("unknown grouping `{other}` (semantic or structural)"))),
        }
    }
}

impl GroupBy {
    pub fn label<'a>(&self, d: &'a Diagram) -> Option<&'a str> {
        match self {
            GroupBy::Semantic => d.categories.semantic.as_deref(),
            GroupBy::Structural => d.categories.structural.as_deref(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LayoutOptions {
    pub group_by: GroupBy,
    pub kinds: BTreeSet<LayoutKind>,
    /// Restrict to these categories; `None` keeps every category present.
    pub categories: Option<Vec<String>>,
    pub resolution: (usize, usize),
    pub bandwidth: Option<(f64, f64)>,
    pub min_points: usize,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        Self {
            group_by: GroupBy::Semantic,
            kinds: LayoutKind::DEFAULT.into_iter().collect(),
            categories: None,
            resolution: DEFAULT_RESOLUTION,
            bandwidth: None,
            min_points: DEFAULT_MIN_POINTS,
        }
    }
}

/// A (category, kind) cell with too few centroids to estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparseCell {
    pub category: String,
    pub kind: LayoutKind,
    pub n_points: usize,
}

#[derive(Debug, Clone, Default)]
pub struct LayoutProfile {
    pub grids: BTreeMap<String, BTreeMap<LayoutKind, DensityGrid>>,
    pub sparse: Vec<SparseCell>,
}

pub fn layout_profile(
    diagrams: &[Diagram],
    schemes: &CategorySchemes,
    opts: &LayoutOptions,
) -> Result<LayoutProfile> {
    if let Some(wanted) = &opts.categories {
        for c in wanted {
            let known = match opts.group_by {
                GroupBy::Semantic => schemes.is_semantic(c),
                GroupBy::Structural => schemes.is_structural(c),
            };
            if !known {
                return Err(Error::usage(format!("unknown category `{c}`")));
            }
        }
    }
    let include_arrowheads = opts.kinds.contains(&LayoutKind::Arrowhead);
    let mut points: BTreeMap<(String, LayoutKind), Vec<Point>> = BTreeMap::new();
    if let Some(wanted) = &opts.categories {
        for c in wanted {
            for k in &opts.kinds {
                points.entry((c.clone(), *k)).or_default();
            }
        }
    }
    for d in diagrams {
        let Some(cat) = opts.group_by.label(d) else { continue };
        if opts.categories.as_ref().is_some_and(|w| !w.iter().any(|c| c == cat)) {
            continue;
        }
        // degenerate-region warnings are reported by `centroids`
        let (records, warnings) = diagram_centroids(d, include_arrowheads);
        for w in warnings {
            log::debug!("{w}");
        }
        for r in records {
            let kind = LayoutKind::of(r.kind);
            if opts.kinds.contains(&kind) {
                points
                    .entry((cat.to_string(), kind))
                    .or_default()
                    .push(Point::new(r.x, r.y));
            }
        }
    }

    let min_points = opts.min_points.max(1);
    let mut profile = LayoutProfile::default();
    let dense: Vec<_> = points
        .iter()
        .filter(|(_, pts)| pts.len() >= min_points)
        .collect();
    for ((category, kind), pts) in points.iter().filter(|(_, pts)| pts.len() < min_points) {
        profile.sparse.push(SparseCell {
            category: category.clone(),
            kind: *kind,
            n_points: pts.len(),
        });
    }
    let grids: Vec<Result<((String, LayoutKind), DensityGrid)>> = dense
        .par_iter()
        .map(|(key, pts)| Ok(((*key).clone(), kde2d(pts, opts.resolution, opts.bandwidth)?)))
        .collect();
    for g in grids {
        let ((category, kind), grid) = g?;
        profile.grids.entry(category).or_default().insert(kind, grid);
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct double loop over cells and points.
    fn naive_kde(points: &[Point], nx: usize, ny: usize, h: (f64, f64)) -> Vec<f64> {
        let mut out = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let (gx, gy) = ((i as f64 + 0.5) / nx as f64, (j as f64 + 0.5) / ny as f64);
                let mut s = 0.0;
                for p in points {
                    let kx = (-0.5 * ((gx - p.x) / h.0).powi(2)).exp() / (h.0 * (2.0 * std::f64::consts::PI).sqrt());
                    let ky = (-0.5 * ((gy - p.y) / h.1).powi(2)).exp() / (h.1 * (2.0 * std::f64::consts::PI).sqrt());
                    s += kx * ky;
                }
                out[j * nx + i] = s / points.len() as f64;
            }
        }
        out
    }

    #[test]
    fn bbox_centroid_is_center() {
        let c = centroid(&Region::bbox(0.0, 0.0, 10.0, 20.0));
        assert_eq!(c.point, Point::new(5.0, 10.0));
    }

    #[test]
    fn triangle_centroid() {
        let c = centroid(&Region::polygon([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]));
        assert!((c.point.x - 1.0).abs() < 1e-12 && (c.point.y - 1.0).abs() < 1e-12);
        assert!(!c.degenerate);
    }

    #[test]
    fn degenerate_polygon_falls_back() {
        let c = centroid(&Region::polygon([[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]]));
        assert!(c.degenerate);
        assert_eq!(c.point, Point::new(2.0, 0.0));
    }

    #[test]
    fn normalize_clamps() {
        assert_eq!(normalize(Point::new(5.0, 10.0), 10.0, 20.0), (Point::new(0.5, 0.5), false));
        assert_eq!(normalize(Point::new(0.0, 0.0), 10.0, 20.0), (Point::new(0.0, 0.0), false));
        assert_eq!(normalize(Point::new(12.0, 5.0), 10.0, 20.0), (Point::new(1.0, 0.25), true));
    }

    #[test]
    fn single_point_peaks_in_center() {
        let g = kde2d(&[Point::new(0.5, 0.5)], (64, 64), None).unwrap();
        let c = g.argmax();
        assert!((c.x - 0.5).abs() <= 1.0 / 64.0 && (c.y - 0.5).abs() <= 1.0 / 64.0);
        for j in 0..64 {
            for i in 0..64 {
                assert_eq!(g.get(i, j), g.get(63 - i, j));
            }
        }
    }

    #[test]
    fn two_points_symmetric() {
        let g = kde2d(&[Point::new(0.25, 0.5), Point::new(0.75, 0.5)], (64, 64), None).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..64 {
            for i in 0..64 {
                worst = worst.max((g.get(i, j) - g.get(63 - i, j)).abs());
            }
        }
        assert!(worst < 1e-12, "asymmetry {worst}");
    }

    #[test]
    fn matches_direct_sum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point> = (0..50).map(|_| Point::new(rng.random(), rng.random())).collect();
        let g = kde2d(&pts, (32, 32), None).unwrap();
        let oracle = naive_kde(&pts, 32, 32, g.bandwidth);
        for (a, b) in g.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn interior_mass_near_one_for_narrow_kernel() {
        let g = kde2d(&[Point::new(0.5, 0.5)], (128, 128), Some((0.02, 0.02))).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-6, "{}", g.mass());
    }

    #[test]
    fn kde1d_integrates_to_one() {
        let vals = [0.2, 0.4, 0.45, 0.7];
        let xs: Vec<f64> = (0..2001).map(|i| -2.0 + 5.0 * i as f64 / 2000.0).collect();
        let d = kde1d(&vals, &xs, None).unwrap();
        let mass: f64 = d.iter().sum::<f64>() * 5.0 / 2000.0;
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_points_rejected() {
        assert!(matches!(kde2d(&[], (8, 8), None), Err(Error::Usage(_))));
    }

    #[test]
    fn constant_axis_uses_floor() {
        let pts = [Point::new(0.2, 0.5), Point::new(0.8, 0.5)];
        let (_, hy) = scott_bandwidth(&pts);
        assert_eq!(hy, BANDWIDTH_FLOOR);
    }

    #[test]
    fn sparse_cells_reported() {
        let d = Diagram {
            id: "d".into(),
            image_path: None,
            image_size: [10, 10].into(),
            elements: vec![
                crate::model::DiagramElement::new("T0", ElementKind::Text, Region::bbox(0.0, 0.0, 1.0, 1.0)),
                crate::model::DiagramElement::new("T1", ElementKind::Text, Region::bbox(2.0, 2.0, 3.0, 3.0)),
                crate::model::DiagramElement::new("B0", ElementKind::Blob, Region::bbox(4.0, 4.0, 6.0, 6.0)),
            ],
            dpg: Default::default(),
            grouping: None,
            connectivity: None,
            rst: None,
            categories: crate::model::CategoryLabels::new("volcano", "cross-section"),
        };
        let p = layout_profile(&[d], &CategorySchemes::default(), &LayoutOptions::default()).unwrap();
        assert!(p.grids.is_empty());
        assert_eq!(p.sparse.len(), 2);
        assert_eq!(p.sparse.iter().map(|s| s.n_points).sum::<usize>(), 3);
    }

    #[test]
    fn unknown_category_is_usage_error() {
        let opts = LayoutOptions {
            categories: Some(vec!["not a category".into()]),
            ..LayoutOptions::default()
        };
        assert!(matches!(
            layout_profile(&[], &CategorySchemes::default(), &opts),
            Err(Error::Usage(_))
        ));
    }

    fn unit_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..25)
    }

    proptest! {
        #[test]
        fn permutation_invariant(pts in unit_points(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let a: Vec<Point> = pts.iter().map(|p| Point::from(*p)).collect();
            let mut b = a.clone();
            b.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let ga = kde2d(&a, (16, 16), None).unwrap();
            let gb = kde2d(&b, (16, 16), None).unwrap();
            for (x, y) in ga.values.iter().zip(&gb.values) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn doubling_points_keeps_grid(pts in unit_points(), hx in 0.02..0.3f64, hy in 0.02..0.3f64) {
            let a: Vec<Point> = pts.iter().map(|p| Point::from(*p)).collect();
            let b: Vec<Point> = a.iter().flat_map(|p| [*p, *p]).collect();
            let ga = kde2d(&a, (16, 16), Some((hx, hy))).unwrap();
            let gb = kde2d(&b, (16, 16), Some((hx, hy))).unwrap();
            for (x, y) in ga.values.iter().zip(&gb.values) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        // cell-centre evaluation integrates accurately once the kernel spans a cell
        #[test]
        fn mass_bounded(pts in unit_points(), hx in (1.0 / 64.0)..0.5f64, hy in (1.0 / 64.0)..0.5f64) {
            let a: Vec<Point> = pts.iter().map(|p| Point::from(*p)).collect();
            let g = kde2d(&a, (64, 64), Some((hx, hy))).unwrap();
            let m = g.mass();
            prop_assert!(m > 0.0 && m <= 1.0 + 1e-6, "mass {}", m);
            prop_assert!(g.values.iter().all(|v| *v >= 0.0));
        }

        #[test]
        fn convex_centroid_inside(r in 1.0..50.0f64, cx in 60.0..100.0f64, cy in 60.0..100.0f64, n in 3usize..12) {
            let verts: Vec<[f64; 2]> = (0..n)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / n as f64;
                    [cx + r * t.cos(), cy + r * t.sin()]
                })
                .collect();
            let region = Region::polygon(verts.clone());
            let c = centroid(&region);
            prop_assert!(crate::geometry::point_in_polygon(c.point, &region.vertices()));
        }
    }
}
