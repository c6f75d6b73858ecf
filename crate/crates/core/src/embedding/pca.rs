//! Two-component principal component scores.

const MAX_ITER: usize = 10_000;
const TOL: f64 = 1e-9;

/// Leading eigenvectors of a symmetric matrix by power iteration with
/// deflation, each paired with its eigenvalue.
pub fn top_eigen(cov: &[Vec<f64>], count: usize) -> Vec<(f64, Vec<f64>)> {
    let d = cov.len();
    let mut m: Vec<Vec<f64>> = cov.to_vec();
    let mut out = Vec::with_capacity(count);
    for c in 0..count {
        // deterministic start that is unlikely to be orthogonal to the target
        let mut v: Vec<f64> = (0..d).map(|i| 1.0 + ((i + c) % 7) as f64 * 0.1).collect();
        let mut lambda = 0.0;
        for _ in 0..MAX_ITER {
            let mut next: Vec<f64> = m.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
            for (_, u) in &out {
                let dot: f64 = next.iter().zip(u).map(|(a, b)| a * b).sum();
                next.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                lambda = 0.0;
                break;
            }
            next.iter_mut().for_each(|x| *x /= norm);
            let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            lambda = norm;
            if delta < TOL {
                break;
            }
        }
        let idx = (0..d).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
        if v[idx] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for i in 0..d {
            for j in 0..d {
                m[i][j] -= lambda * v[i] * v[j];
            }
        }
        out.push((lambda, v));
    }
    // eigenvalues at rounding level of the leading one are zero
    let scale = out.first().map_or(0.0, |e| e.0.abs());
    for e in &mut out {
        if e.0 <= scale * 1e-12 {
            e.0 = 0.0;
        }
    }
    out
}

/// Mean-centred projection onto the two leading principal axes. Axes are
/// signed so that their largest-magnitude loading is positive.
pub fn pca2(vectors: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let n = vectors.len();
    if n == 0 {
        return Vec::new();
    }
    let d = vectors[0].len();
    let mut mean = vec![0.0; d];
    for v in vectors {
        mean.iter_mut().zip(v).for_each(|(m, x)| *m += x);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centred: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let mut cov = vec![vec![0.0; d]; d];
    for v in &centred {
        for i in 0..d {
            if v[i] == 0.0 {
                continue;
            }
            for j in i..d {
                cov[i][j] += v[i] * v[j];
            }
        }
    }
    let denom = (n.max(2) - 1) as f64;
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }
    let axes = top_eigen(&cov, 2.min(d));
    let mut scores: Vec<[f64; 2]> = centred
        .iter()
        .map(|v| {
            let mut s = [0.0; 2];
            for (c, (lambda, axis)) in axes.iter().enumerate() {
                if *lambda > 0.0 {
                    s[c] = v.iter().zip(axis).map(|(a, b)| a * b).sum();
                }
            }
            s
        })
        .collect();
    // remove rounding drift so each column has zero mean
    for c in 0..2 {
        let m = scores.iter().map(|s| s[c]).sum::<f64>() / n as f64;
        scores.iter_mut().for_each(|s| s[c] -= m);
    }
    scores
}
