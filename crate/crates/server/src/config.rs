use std::net::SocketAddr;
use std::path::PathBuf;

use atlas_core::association::DEFAULT_MAX_NEIGHBORS;
use atlas_core::layout::DEFAULT_DISTORTION;
use atlas_core::similarity::{DEFAULT_K, DEFAULT_THRESHOLD};
use atlas_core::Settings;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("similarity threshold {0} must lie in [0, 1]")]
    Threshold(f64),
    #[error("distortion {0} must be a finite value >= 0")]
    Distortion(f64),
    #[error("k must be at least 1")]
    K,
    #[error("max-neighbors must be at least 1")]
    MaxNeighbors,
    #[error("missing required setting `{0}`")]
    Missing(&'static str),
}

/// Everything the `index` and `serve` commands need.
#[derive(Debug, Clone, PartialEq)]
pub struct ServerConfig {
    pub corpus_dir: Option<PathBuf>,
    pub ontology_path: Option<PathBuf>,
    pub snapshot_path: PathBuf,
    pub listen: SocketAddr,
    pub tau: f64,
    pub k: usize,
    pub max_neighbors: usize,
    pub distortion: f64,
    pub stopwords_path: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            corpus_dir: None,
            ontology_path: None,
            snapshot_path: PathBuf::from("atlas.snapshot.json"),
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            tau: DEFAULT_THRESHOLD,
            k: DEFAULT_K,
            max_neighbors: DEFAULT_MAX_NEIGHBORS,
            distortion: DEFAULT_DISTORTION,
            stopwords_path: None,
        }
    }
}

impl ServerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(ConfigError::Threshold(self.tau));
        }
        if !(self.distortion.is_finite() && self.distortion >= 0.0) {
            return Err(ConfigError::Distortion(self.distortion));
        }
        if self.k == 0 {
            return Err(ConfigError::K);
        }
        if self.max_neighbors == 0 {
            return Err(ConfigError::MaxNeighbors);
        }
        Ok(())
    }

    pub fn settings(&self) -> Settings {
        Settings {
            similarity_threshold: self.tau,
            similar_k: self.k,
            max_neighbors: self.max_neighbors,
            ..Settings::default()
        }
    }
}
