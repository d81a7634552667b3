//! Indexing and serving commands for the atlas navigation engine.

pub mod api;
pub mod config;

use std::future::Future;
use std::sync::Arc;

use anyhow::{Context, Result};
use atlas_core::pipeline::{index_to_snapshot, IndexReport};
use atlas_core::Snapshot;

pub use config::{ConfigError, ServerConfig};

/// Builds the snapshot for `config.corpus_dir` and writes it to
/// `config.snapshot_path`.
pub fn index_command(config: &ServerConfig) -> Result<IndexReport> {
    let corpus = config.corpus_dir.as_deref().ok_or(ConfigError::Missing("corpus"))?;
    let ontology = config
        .ontology_path
        .as_deref()
        .ok_or(ConfigError::Missing("ontology"))?;
    let (snapshot, report) = index_to_snapshot::<f64>(corpus, ontology, config.stopwords_path.as_deref())
        .with_context(|| format!("indexing {}", corpus.display()))?;
    if report.documents == 0 {
        tracing::warn!("corpus {} contains no *.txt documents", corpus.display());
    }
    snapshot
        .save(&config.snapshot_path)
        .with_context(|| format!("writing snapshot {}", config.snapshot_path.display()))?;
    Ok(report)
}

/// Loads the snapshot and wraps it in shared API state.
pub fn load_state(config: &ServerConfig) -> Result<Arc<api::AppState>> {
    config.validate()?;
    let snapshot = Snapshot::load(&config.snapshot_path)
        .with_context(|| format!("loading snapshot {}", config.snapshot_path.display()))?;
    let atlas = snapshot.into_atlas()?.with_settings(config.settings())?;
    Ok(Arc::new(api::AppState::new(atlas, config.distortion)))
}

pub async fn serve_command(config: &ServerConfig) -> Result<()> {
    let state = load_state(config)?;
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .with_context(|| format!("binding {}", config.listen))?;
    serve(listener, state, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}

/// Serves the API on an already bound listener until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<api::AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<()> {
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, api::router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}
