//! Exact nearest neighbours by brute force.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Knn {
    /// `indices[i]` lists the k nearest other points of `i`, closest first.
    pub indices: Vec<Vec<usize>>,
    pub distances: Vec<Vec<f64>>,
}

impl Knn {
    pub fn k(&self) -> usize {
        self.indices.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The `k` nearest neighbours of every row, excluding the row itself.
/// Equal distances are ordered by index.
pub fn knn(vectors: &[Vec<f64>], k: usize) -> Result<Knn> {
    let n = vectors.len();
    if k == 0 || k >= n {
        return Err(Error::usage(format!("k must be between 1 and {} for {n} points, got {k}", n.saturating_sub(1))));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::data("feature rows have differing lengths"));
    }
    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (euclidean(&vectors[i], &vectors[j]), j))
                .collect();
            let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            cand.select_nth_unstable_by(k - 1, order);
            cand.truncate(k);
            cand.sort_by(order);
            cand.into_iter().map(|(d, j)| (j, d)).unzip()
        })
        .collect();
    let (indices, distances) = rows.into_iter().unzip();
    Ok(Knn { indices, distances })
}
