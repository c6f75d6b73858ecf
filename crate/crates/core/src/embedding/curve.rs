//! Low-dimensional similarity curve `1 / (1 + a·d^(2b))`.

use crate::error::{Error, Result};

pub const FIT_SAMPLES: usize = 300;
/// Largest accepted residual RMS. The least-squares optimum itself sits
/// near 0.03 for `min_dist` close to `spread`.
pub const FIT_RMS_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveFit {
    pub a: f64,
    pub b: f64,
    pub rms: f64,
}

pub fn curve(d: f64, a: f64, b: f64) -> f64 {
    1.0 / (1.0 + a * d.powf(2.0 * b))
}

/// Target membership: flat up to `min_dist`, then exponential decay.
pub fn target(d: f64, min_dist: f64, spread: f64) -> f64 {
    if d <= min_dist {
        1.0
    } else {
        (-(d - min_dist) / spread).exp()
    }
}

pub fn samples(spread: f64) -> Vec<f64> {
    let top = 3.0 * spread;
    (0..FIT_SAMPLES).map(|i| top * i as f64 / (FIT_SAMPLES - 1) as f64).collect()
}

pub fn rms(a: f64, b: f64, min_dist: f64, spread: f64) -> f64 {
    let xs = samples(spread);
    let ss: f64 = xs
        .iter()
        .map(|&x| (curve(x, a, b) - target(x, min_dist, spread)).powi(2))
        .sum();
    (ss / xs.len() as f64).sqrt()
}

/// Levenberg–Marquardt least squares for `(a, b)`.
pub fn fit_ab(min_dist: f64, spread: f64) -> Result<CurveFit> {
    if !(spread > 0.0 && min_dist > 0.0 && min_dist < spread) {
        return Err(Error::usage(format!(
            "min_dist must lie in (0, spread={spread}), got {min_dist}"
        )));
    }
    let xs = samples(spread);
    let ys: Vec<f64> = xs.iter().map(|&x| target(x, min_dist, spread)).collect();
    let cost = |a: f64, b: f64| -> f64 {
        xs.iter().zip(&ys).map(|(&x, &y)| (curve(x, a, b) - y).powi(2)).sum()
    };

    let (mut a, mut b) = (1.0, 1.0);
    let mut current = cost(a, b);
    let mut lambda = 1e-3;
    for _ in 0..1000 {
        // normal equations J^T J and J^T r
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&ys) {
            if x <= 0.0 {
                continue;
            }
            let p = x.powf(2.0 * b);
            let f = 1.0 / (1.0 + a * p);
            let r = f - y;
            let da = -p * f * f;
            let db = -a * p * 2.0 * x.ln() * f * f;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let mut improved = false;
        while lambda < 1e12 {
            let (m11, m22) = (jaa * (1.0 + lambda), jbb * (1.0 + lambda));
            let det = m11 * m22 - jab * jab;
            if det.abs() < 1e-300 {
                lambda *= 10.0;
                continue;
            }
            let step_a = -(m22 * ga - jab * gb) / det;
            let step_b = -(m11 * gb - jab * ga) / det;
            let (na, nb) = (a + step_a, b + step_b);
            if na > 0.0 && nb > 0.0 {
                let c = cost(na, nb);
                if c < current {
                    let gain = current - c;
                    a = na;
                    b = nb;
                    current = c;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = gain > 1e-15 * current.max(1e-300);
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let rms = (current / xs.len() as f64).sqrt();
    if !(rms.is_finite() && rms < FIT_RMS_TOLERANCE) {
        return Err(Error::FitNotConverged { a, b, rms });
    }
    Ok(CurveFit { a, b, rms })
}
