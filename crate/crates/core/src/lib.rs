//! Distant viewing for diagram corpora: annotation model, graph queries,
//! layout density, blob texture features, 2D embeddings and rendering.

pub mod corpus;
pub mod embedding;
pub mod error;
pub mod export;
pub mod features;
pub mod geometry;
pub mod graph;
pub mod layout;
pub mod metrics;
pub mod model;
pub mod render;

pub use error::{Error, ErrorKind, Result};
