//! Embedding quality measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of all other points ordered by distance, ties by index.
fn ranking(points: &[&[f64]], i: usize) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = (0..points.len())
        .filter(|&j| j != i)
        .map(|j| (dist2(points[i], points[j]), j))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order.into_iter().map(|(_, j)| j).collect()
}

/// Trustworthiness of a low-dimensional embedding at neighbourhood size `k`:
/// penalises embedded neighbours that are far apart in the input space.
pub fn trustworthiness(high: &[Vec<f64>], low: &[[f64; 2]], k: usize) -> f64 {
    let n = high.len();
    assert_eq!(n, low.len());
    assert!(k >= 1 && 2 * n > 3 * k + 1, "k too large for trustworthiness");
    let hi: Vec<&[f64]> = high.iter().map(Vec::as_slice).collect();
    let lo: Vec<&[f64]> = low.iter().map(|p| p.as_slice()).collect();
    let penalty: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rank = vec![0usize; n];
            for (r, j) in ranking(&hi, i).into_iter().enumerate() {
                rank[j] = r + 1;
            }
            ranking(&lo, i)
                .into_iter()
                .take(k)
                .map(|j| rank[j].saturating_sub(k) as f64)
                .sum::<f64>()
        })
        .sum();
    let (n, k) = (n as f64, k as f64);
    1.0 - 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0)) * penalty
}

/// Lloyd's k-means with k-means++ seeding; returns assignments of the run
/// with the lowest inertia out of `restarts`.
pub fn kmeans(points: &[[f64; 2]], k: usize, restarts: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: (f64, Vec<usize>) = (f64::INFINITY, vec![0; points.len()]);
    for _ in 0..restarts.max(1) {
        let mut centers = vec![points[rng.random_range(0..points.len())]];
        while centers.len() < k {
            let d: Vec<f64> = points
                .iter()
                .map(|p| centers.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min))
                .collect();
            let total: f64 = d.iter().sum();
            if total <= 0.0 {
                centers.push(points[rng.random_range(0..points.len())]);
                continue;
            }
            let mut t = rng.random::<f64>() * total;
            let mut pick = points.len() - 1;
            for (i, di) in d.iter().enumerate() {
                t -= di;
                if t <= 0.0 {
                    pick = i;
                    break;
                }
            }
            centers.push(points[pick]);
        }
        let mut assign = vec![0; points.len()];
        for _ in 0..300 {
            let mut changed = false;
            for (a, p) in assign.iter_mut().zip(points) {
                let c = (0..k)
                    .min_by(|&x, &y| dist2(p, &centers[x]).total_cmp(&dist2(p, &centers[y])))
                    .unwrap();
                if *a != c {
                    *a = c;
                    changed = true;
                }
            }
            for (c, center) in centers.iter_mut().enumerate() {
                let members: Vec<&[f64; 2]> = points.iter().zip(&assign).filter(|(_, a)| **a == c).map(|(p, _)| p).collect();
                if !members.is_empty() {
                    let m = members.len() as f64;
                    *center = [
                        members.iter().map(|p| p[0]).sum::<f64>() / m,
                        members.iter().map(|p| p[1]).sum::<f64>() / m,
                    ];
                }
            }
            if !changed {
                break;
            }
        }
        let inertia: f64 = points.iter().zip(&assign).map(|(p, a)| dist2(p, &centers[*a])).sum();
        if inertia < best.0 {
            best = (inertia, assign);
        }
    }
    best.1
}

/// Fraction of points whose k-means cluster's majority label matches their own.
pub fn kmeans_purity(points: &[[f64; 2]], labels: &[usize], k: usize, seed: u64) -> f64 {
    let assign = kmeans(points, k, 10, seed);
    let n_labels = labels.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0usize; n_labels]; k];
    for (a, l) in assign.iter().zip(labels) {
        table[*a][*l] += 1;
    }
    let hits: usize = table.iter().map(|row| row.iter().copied().max().unwrap_or(0)).sum();
    hits as f64 / points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_embedding_is_trustworthy() {
        let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![(i % 7) as f64, (i / 7) as f64 * 1.3]).collect();
        let low: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
        assert!((trustworthiness(&pts, &low, 5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_layout_is_untrustworthy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.random(), rng.random(), rng.random()]).collect();
        let low: Vec<[f64; 2]> = (0..200).map(|_| [rng.random(), rng.random()]).collect();
        assert!(trustworthiness(&pts, &low, 15) < 0.6);
    }

    #[test]
    fn separated_blobs_are_pure() {
        let pts: Vec<[f64; 2]> = (0..30).map(|i| [(i / 10) as f64 * 100.0 + (i % 10) as f64 * 0.1, 0.0]).collect();
        let labels: Vec<usize> = (0..30).map(|i| i / 10).collect();
        assert_eq!(kmeans_purity(&pts, &labels, 3, 0), 1.0);
    }
}
