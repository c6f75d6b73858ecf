//! Pointy-top hexagonal binning of a 2D embedding with marginal histograms.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_GRIDSIZE: usize = 30;
pub const MARGINAL_BINS: usize = 20;

/// Hex grid anchored at the bounding box of the whole embedding so that
/// categories binned separately share cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexGrid {
    pub origin: [f64; 2],
    /// Circumradius of one hexagon.
    pub size: f64,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
}

fn range(points: &[[f64; 2]], axis: usize) -> [f64; 2] {
    points.iter().fold([f64::INFINITY, f64::NEG_INFINITY], |r, p| [r[0].min(p[axis]), r[1].max(p[axis])])
}

impl HexGrid {
    /// `gridsize` hexagons across the horizontal extent.
    pub fn fit(points: &[[f64; 2]], gridsize: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::usage("hexbin needs at least one point"));
        }
        if gridsize == 0 {
            return Err(Error::usage("hexbin gridsize must be positive"));
        }
        let (x_range, y_range) = (range(points, 0), range(points, 1));
        let span = if x_range[1] > x_range[0] { x_range[1] - x_range[0] } else { y_range[1] - y_range[0] };
        let size = if span > 0.0 { span / (gridsize as f64 * 3f64.sqrt()) } else { 1.0 };
        Ok(Self {
            origin: [x_range[0], y_range[0]],
            size,
            x_range,
            y_range,
        })
    }

    /// Axial coordinates `(q, r)` of the hexagon containing a point.
    pub fn cell(&self, p: [f64; 2]) -> (i64, i64) {
        let (x, y) = ((p[0] - self.origin[0]) / self.size, (p[1] - self.origin[1]) / self.size);
        let q = 3f64.sqrt() / 3.0 * x - y / 3.0;
        let r = 2.0 / 3.0 * y;
        cube_round(q, r)
    }

    pub fn center(&self, q: i64, r: i64) -> [f64; 2] {
        let (q, r) = (q as f64, r as f64);
        [
            self.origin[0] + self.size * 3f64.sqrt() * (q + r / 2.0),
            self.origin[1] + self.size * 1.5 * r,
        ]
    }

    pub fn corners(&self, q: i64, r: i64) -> [[f64; 2]; 6] {
        let c = self.center(q, r);
        std::array::from_fn(|i| {
            let t = std::f64::consts::PI / 180.0 * (60.0 * i as f64 - 30.0);
            [c[0] + self.size * t.cos(), c[1] + self.size * t.sin()]
        })
    }
}

fn cube_round(q: f64, r: f64) -> (i64, i64) {
    let s = -q - r;
    let (mut rq, mut rr, rs) = (q.round(), r.round(), s.round());
    let (dq, dr, ds) = ((rq - q).abs(), (rr - r).abs(), (rs - s).abs());
    if dq > dr && dq > ds {
        rq = -rr - rs;
    } else if dr > ds {
        rr = -rq - rs;
    }
    (rq as i64, rr as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Histogram {
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0; bins];
    for v in values {
        let idx = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Histogram { edges, counts }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HexSummary {
    pub grid: HexGrid,
    /// Axial cell → count, nonzero cells only.
    pub counts: BTreeMap<(i64, i64), usize>,
    pub marginal_x: Histogram,
    pub marginal_y: Histogram,
    pub n: usize,
}

impl HexSummary {
    /// Cell with the highest count; ties go to the smallest coordinates.
    pub fn argmax(&self) -> Option<(i64, i64)> {
        self.counts
            .iter()
            .fold(None, |best: Option<((i64, i64), usize)>, (k, c)| match best {
                Some((_, bc)) if bc >= *c => best,
                _ => Some((*k, *c)),
            })
            .map(|(k, _)| k)
    }
}

/// Bins the selected points on the grid of the whole embedding.
pub fn hexbin(points: &[[f64; 2]], selected: &[bool], gridsize: usize) -> Result<HexSummary> {
    let grid = HexGrid::fit(points, gridsize)?;
    let chosen: Vec<[f64; 2]> = points
        .iter()
        .zip(selected)
        .filter(|(_, s)| **s)
        .map(|(p, _)| *p)
        .collect();
    if chosen.is_empty() {
        return Err(Error::usage("hexbin filter selects no points"));
    }
    let mut counts = BTreeMap::new();
    for p in &chosen {
        *counts.entry(grid.cell(*p)).or_insert(0) += 1;
    }
    let xs: Vec<f64> = chosen.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = chosen.iter().map(|p| p[1]).collect();
    Ok(HexSummary {
        marginal_x: histogram(&xs, grid.x_range[0], grid.x_range[1], MARGINAL_BINS),
        marginal_y: histogram(&ys, grid.y_range[0], grid.y_range[1], MARGINAL_BINS),
        grid,
        counts,
        n: chosen.len(),
    })
}
