//! Fuzzy neighbourhood graph built from exact nearest neighbours.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::knn::Knn;

pub const SIGMA_RANGE: (f64, f64) = (1e-8, 1e8);
pub const SIGMA_TOLERANCE: f64 = 1e-5;
pub const SIGMA_MAX_ITER: usize = 64;

/// Symmetric weighted graph stored as a sorted list of undirected edges
/// `(i, j, w)` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl FuzzyGraph {
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.edges
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .map_or(0.0, |idx| self.edges[idx].2)
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(i, j, w) in &self.edges {
            d[i] += w;
            d[j] += w;
        }
        d
    }
}

pub fn membership(d: f64, rho: f64, sigma: f64) -> f64 {
    (-(d - rho).max(0.0) / sigma).exp()
}

/// Geometric bisection for the bandwidth whose memberships sum to `target`.
pub fn solve_sigma(distances: &[f64], rho: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = SIGMA_RANGE;
    let mut mid = (lo * hi).sqrt();
    for _ in 0..SIGMA_MAX_ITER {
        mid = (lo * hi).sqrt();
        let sum: f64 = distances.iter().map(|d| membership(*d, rho, mid)).sum();
        if (sum - target).abs() < SIGMA_TOLERANCE {
            break;
        }
        if sum > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    mid
}

pub fn fuzzy_graph(knn: &Knn) -> FuzzyGraph {
    let n = knn.len();
    let target = (knn.k() as f64).log2();
    let params: Vec<(f64, f64)> = knn
        .distances
        .par_iter()
        .map(|row| {
            let rho = row.first().copied().unwrap_or(0.0);
            (rho, solve_sigma(row, rho, target))
        })
        .collect();
    let mut directed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for i in 0..n {
        let (rho, sigma) = params[i];
        for (&j, &d) in knn.indices[i].iter().zip(&knn.distances[i]) {
            directed.insert((i, j), membership(d, rho, sigma));
        }
    }
    let mut edges = Vec::with_capacity(directed.len());
    for (&(i, j), &a) in &directed {
        if i < j {
            let b = directed.get(&(j, i)).copied().unwrap_or(0.0);
            // a + b - ab, arranged so that a = 1 stays exactly 1
            edges.push((i, j, a + b * (1.0 - a)));
        } else if !directed.contains_key(&(j, i)) {
            edges.push((j, i, a));
        }
    }
    edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    let (rho, sigma) = params.into_iter().unzip();
    FuzzyGraph { n, edges, rho, sigma }
}
