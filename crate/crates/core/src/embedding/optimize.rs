//! Layout initialisation and stochastic gradient descent on the fuzzy graph.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fuzzy::FuzzyGraph;

const CLIP: f64 = 4.0;
const INIT_SCALE: f64 = 10.0;
const POWER_MAX_ITER: usize = 1000;
const POWER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdParams {
    pub a: f64,
    pub b: f64,
    pub n_epochs: usize,
    pub negative_sample_rate: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub parallel: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Spectral,
    Random,
}

fn components(g: &FuzzyGraph) -> usize {
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(g.n);
    for &(i, j, _) in &g.edges {
        uf.union(i, j);
    }
    let mut roots: Vec<usize> = (0..g.n).map(|i| uf.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
    }
}

/// Second and third eigenvectors of the normalized adjacency, found by
/// power iteration on `(I + D^-1/2 W D^-1/2) / 2` with deflation. `None`
/// when the graph is disconnected or has isolated vertices.
pub fn spectral_init(g: &FuzzyGraph, rng: &mut ChaCha8Rng) -> Option<Vec<[f64; 2]>> {
    let n = g.n;
    if n < 4 || components(g) != 1 {
        return None;
    }
    let deg = g.degrees();
    if deg.iter().any(|d| *d <= 0.0) {
        return None;
    }
    let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
        for &(i, j, w) in &g.edges {
            let s = 0.5 * w * inv_sqrt[i] * inv_sqrt[j];
            out[i] += s * v[j];
            out[j] += s * v[i];
        }
        out
    };
    let mut top: Vec<f64> = deg.iter().map(|d| d.sqrt()).collect();
    normalize(&mut top);
    let mut basis = vec![top];
    for _ in 0..2 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut v, &basis);
        normalize(&mut v);
        for _ in 0..POWER_MAX_ITER {
            let mut next = apply(&v);
            orthogonalize(&mut next, &basis);
            if normalize(&mut next) == 0.0 {
                return None;
            }
            let delta: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            if delta < POWER_TOL {
                break;
            }
        }
        basis.push(v);
    }
    let coords: Vec<[f64; 2]> = (0..n).map(|i| [basis[1][i], basis[2][i]]).collect();
    Some(rescale(coords))
}

/// Per-axis affine map onto `[0, 10]`.
fn rescale(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    for axis in 0..2 {
        let lo = pts.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        for p in &mut pts {
            p[axis] = if span > 0.0 { INIT_SCALE * (p[axis] - lo) / span } else { 0.0 };
        }
    }
    pts
}

pub fn random_init(n: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)])
        .collect()
}

/// Directed edge list with sampling schedule, both directions of every
/// undirected edge, weights below `max / n_epochs` dropped.
struct Schedule {
    head: Vec<usize>,
    tail: Vec<usize>,
    epochs_per_sample: Vec<f64>,
}

fn schedule(g: &FuzzyGraph, n_epochs: usize) -> Schedule {
    let max_w = g.edges.iter().map(|e| e.2).fold(0.0, f64::max);
    let floor = max_w / n_epochs.max(1) as f64;
    let mut directed: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * g.edges.len());
    for &(i, j, w) in &g.edges {
        if w >= floor && w > 0.0 {
            directed.push((i, j, w));
            directed.push((j, i, w));
        }
    }
    directed.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    Schedule {
        head: directed.iter().map(|e| e.0).collect(),
        tail: directed.iter().map(|e| e.1).collect(),
        epochs_per_sample: directed.iter().map(|e| max_w / e.2).collect(),
    }
}

fn clip(v: f64) -> f64 {
    v.clamp(-CLIP, CLIP)
}

fn attract_coeff(d2: f64, a: f64, b: f64) -> f64 {
    if d2 > 0.0 {
        -2.0 * a * b * d2.powf(b - 1.0) / (a * d2.powf(b) + 1.0)
    } else {
        0.0
    }
}

fn repel_coeff(d2: f64, a: f64, b: f64) -> f64 {
    if d2 > 0.0 {
        2.0 * b / ((0.001 + d2) * (a * d2.powf(b) + 1.0))
    } else {
        0.0
    }
}

/// Runs the SGD epochs in place. The sequential path draws every random
/// number from one stream in a fixed edge order.
pub fn optimize(emb: &mut [[f64; 2]], g: &FuzzyGraph, p: &SgdParams) {
    let s = schedule(g, p.n_epochs);
    if s.head.is_empty() || emb.len() < 2 {
        return;
    }
    if p.parallel {
        return optimize_parallel(emb, &s, p);
    }
    let n = emb.len();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x5eed_5eed);
    let neg_rate = p.negative_sample_rate.max(1) as f64;
    let mut next_sample = s.epochs_per_sample.clone();
    let per_negative: Vec<f64> = s.epochs_per_sample.iter().map(|e| e / neg_rate).collect();
    let mut next_negative = per_negative.clone();
    for epoch in 0..p.n_epochs {
        let e = epoch as f64;
        let alpha = p.learning_rate * (1.0 - e / p.n_epochs as f64);
        for i in 0..s.head.len() {
            if next_sample[i] > e {
                continue;
            }
            let (j, k) = (s.head[i], s.tail[i]);
            let (cur, oth) = (emb[j], emb[k]);
            let d2 = (cur[0] - oth[0]).powi(2) + (cur[1] - oth[1]).powi(2);
            let coeff = attract_coeff(d2, p.a, p.b);
            for dim in 0..2 {
                let grad = clip(coeff * (cur[dim] - oth[dim]));
                emb[j][dim] += grad * alpha;
                emb[k][dim] -= grad * alpha;
            }
            next_sample[i] += s.epochs_per_sample[i];

            let n_neg = ((e - next_negative[i]) / per_negative[i]).floor().max(0.0) as usize;
            for _ in 0..n_neg {
                let k = rng.random_range(0..n);
                if k == j {
                    continue;
                }
                let (cur, oth) = (emb[j], emb[k]);
                let d2 = (cur[0] - oth[0]).powi(2) + (cur[1] - oth[1]).powi(2);
                let coeff = repel_coeff(d2, p.a, p.b);
                for dim in 0..2 {
                    let grad = if coeff > 0.0 { clip(coeff * (cur[dim] - oth[dim])) } else { CLIP };
                    emb[j][dim] += grad * alpha;
                }
            }
            next_negative[i] += n_neg as f64 * per_negative[i];
        }
    }
}

/// Lock-free variant: edges are split across threads that update shared
/// coordinates without synchronisation, so results depend on scheduling.
fn optimize_parallel(emb: &mut [[f64; 2]], s: &Schedule, p: &SgdParams) {
    let n = emb.len();
    let shared: Vec<[AtomicU64; 2]> = emb
        .iter()
        .map(|q| [AtomicU64::new(q[0].to_bits()), AtomicU64::new(q[1].to_bits())])
        .collect();
    let load = |i: usize| -> [f64; 2] {
        [
            f64::from_bits(shared[i][0].load(Ordering::Relaxed)),
            f64::from_bits(shared[i][1].load(Ordering::Relaxed)),
        ]
    };
    let add = |i: usize, dim: usize, delta: f64| {
        let cell = &shared[i][dim];
        let v = f64::from_bits(cell.load(Ordering::Relaxed)) + delta;
        cell.store(v.to_bits(), Ordering::Relaxed);
    };
    let neg_rate = p.negative_sample_rate.max(1) as f64;
    let chunk = s.head.len().div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
    let starts: Vec<usize> = (0..s.head.len()).step_by(chunk).collect();
    let mut state: Vec<(Vec<f64>, Vec<f64>, ChaCha8Rng)> = starts
        .iter()
        .enumerate()
        .map(|(c, &lo)| {
            let hi = (lo + chunk).min(s.head.len());
            let eps = s.epochs_per_sample[lo..hi].to_vec();
            let neg: Vec<f64> = eps.iter().map(|e| e / neg_rate).collect();
            (eps, neg, ChaCha8Rng::seed_from_u64(p.seed ^ (c as u64 + 1)))
        })
        .collect();
    for epoch in 0..p.n_epochs {
        let e = epoch as f64;
        let alpha = p.learning_rate * (1.0 - e / p.n_epochs as f64);
        state.par_iter_mut().zip(&starts).for_each(|((next_sample, next_negative, rng), &lo)| {
            for (off, (ns, nn)) in next_sample.iter_mut().zip(next_negative.iter_mut()).enumerate() {
                let i = lo + off;
                if *ns > e {
                    continue;
                }
                let (j, k) = (s.head[i], s.tail[i]);
                let (cur, oth) = (load(j), load(k));
                let d2 = (cur[0] - oth[0]).powi(2) + (cur[1] - oth[1]).powi(2);
                let coeff = attract_coeff(d2, p.a, p.b);
                for dim in 0..2 {
                    let grad = clip(coeff * (cur[dim] - oth[dim]));
                    add(j, dim, grad * alpha);
                    add(k, dim, -grad * alpha);
                }
                *ns += s.epochs_per_sample[i];
                let per_neg = s.epochs_per_sample[i] / neg_rate;
                let n_neg = ((e - *nn) / per_neg).floor().max(0.0) as usize;
                for _ in 0..n_neg {
                    let k = rng.random_range(0..n);
                    if k == j {
                        continue;
                    }
                    let (cur, oth) = (load(j), load(k));
                    let d2 = (cur[0] - oth[0]).powi(2) + (cur[1] - oth[1]).powi(2);
                    let coeff = repel_coeff(d2, p.a, p.b);
                    for dim in 0..2 {
                        let grad = if coeff > 0.0 { clip(coeff * (cur[dim] - oth[dim])) } else { CLIP };
                        add(j, dim, grad * alpha);
                    }
                }
                *nn += n_neg as f64 * per_neg;
            }
        });
    }
    for (q, cell) in emb.iter_mut().zip(&shared) {
        *q = [
            f64::from_bits(cell[0].load(Ordering::Relaxed)),
            f64::from_bits(cell[1].load(Ordering::Relaxed)),
        ];
    }
}
