//! Two-dimensional projection of feature vectors.

pub mod curve;
pub mod fuzzy;
pub mod hexbin;
pub mod knn;
pub mod optimize;
pub mod pca;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
pub use curve::{fit_ab, CurveFit};
pub use fuzzy::{fuzzy_graph, FuzzyGraph};
pub use hexbin::{hexbin, HexGrid, HexSummary};
pub use knn::{knn, Knn};
pub use optimize::Init;
pub use pca::pca2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Umap,
    Pca,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "umap" => Ok(Method::Umap),
            "pca" => Ok(Method::Pca),
            other => Err(Error::usage(format!("unknown embedding method `{other}` (umap or pca)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub method: Method,
    pub n_neighbors: usize,
    pub min_dist: f64,
    pub spread: f64,
    pub n_epochs: usize,
    pub negative_sample_rate: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub metric: String,
    /// Lock-free SGD across threads; output then depends on scheduling.
    pub parallel_sgd: bool,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            method: Method::Umap,
            n_neighbors: 200,
            min_dist: 0.99,
            spread: 1.0,
            n_epochs: 500,
            negative_sample_rate: 5,
            learning_rate: 1.0,
            seed: 42,
            metric: "euclidean".into(),
            parallel_sgd: false,
        }
    }
}

impl EmbeddingConfig {
    pub fn check(&self, n_points: usize) -> Result<()> {
        if self.metric != "euclidean" {
            return Err(Error::usage(format!("unsupported metric `{}`", self.metric)));
        }
        if self.method == Method::Pca {
            return if n_points >= 2 {
                Ok(())
            } else {
                Err(Error::usage("PCA needs at least two points"))
            };
        }
        if self.n_neighbors < 2 || self.n_neighbors >= n_points {
            return Err(Error::usage(format!(
                "n_neighbors must be in [2, {}) for {n_points} points, got {}",
                n_points, self.n_neighbors
            )));
        }
        if !(self.min_dist > 0.0 && self.min_dist < self.spread) {
            return Err(Error::usage(format!(
                "min_dist must be in (0, {}), got {}",
                self.spread, self.min_dist
            )));
        }
        if self.n_epochs == 0 {
            return Err(Error::usage("n_epochs must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub points: Vec<[f64; 2]>,
    pub config: EmbeddingConfig,
    /// SHA-256 of the input matrix.
    pub provenance: String,
    pub init: Option<String>,
    pub curve: Option<(f64, f64)>,
}

/// Hash of row count, dimensions and the little-endian bits of every value.
pub fn matrix_hash(vectors: &[Vec<f64>]) -> String {
    let mut h = Sha256::new();
    h.update((vectors.len() as u64).to_le_bytes());
    for v in vectors {
        h.update((v.len() as u64).to_le_bytes());
        for x in v {
            h.update(x.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

pub fn embed(vectors: &[Vec<f64>], config: &EmbeddingConfig) -> Result<Embedding> {
    config.check(vectors.len())?;
    let provenance = matrix_hash(vectors);
    if config.method == Method::Pca {
        return Ok(Embedding {
            points: pca2(vectors),
            config: config.clone(),
            provenance,
            init: None,
            curve: None,
        });
    }
    let CurveFit { a, b, rms } = fit_ab(config.min_dist, config.spread)?;
    log::info!("curve fit a={a:.6} b={b:.6} rms={rms:.5}");
    let neighbours = knn(vectors, config.n_neighbors)?;
    let graph = fuzzy_graph(&neighbours);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut points, init) = match optimize::spectral_init(&graph, &mut rng) {
        Some(p) => (p, Init::Spectral),
        None => {
            log::info!("graph is disconnected; using random initialisation");
            (optimize::random_init(vectors.len(), &mut rng), Init::Random)
        }
    };
    optimize::optimize(
        &mut points,
        &graph,
        &optimize::SgdParams {
            a,
            b,
            n_epochs: config.n_epochs,
            negative_sample_rate: config.negative_sample_rate,
            learning_rate: config.learning_rate,
            seed: config.seed,
            parallel: config.parallel_sgd,
        },
    );
    if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::data("embedding diverged to non-finite coordinates"));
    }
    Ok(Embedding {
        points,
        config: config.clone(),
        provenance,
        init: Some(format!("{init:?}").to_lowercase()),
        curve: Some((a, b)),
    })
}
