#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use atlas_core::corpus::load_corpus;
use atlas_core::{parse_ontology, Atlas, Stopwords};
use atlas_server::api::{router, AppState};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use jsonschema::Validator;
use serde_json::Value;
use tower::ServiceExt;

pub fn repo_root() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

pub fn seed_dir() -> PathBuf {
    repo_root().join("fixtures/seed")
}

pub fn seed_atlas() -> Atlas {
    let text = std::fs::read_to_string(seed_dir().join("ontology.json")).unwrap();
    let ont = parse_ontology(&text).unwrap();
    let records = load_corpus(&seed_dir().join("corpus")).unwrap();
    Atlas::build(ont, records, Stopwords::english()).unwrap()
}

pub fn seed_state() -> Arc<AppState> {
    Arc::new(AppState::new(seed_atlas(), 3.0))
}

pub fn schema(name: &str) -> Validator {
    let path = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/schema")).join(format!("{name}.schema.json"));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&value).unwrap()
}

/// Schema errors joined into one string, empty when valid.
pub fn schema_errors(validator: &Validator, value: &Value) -> String {
    validator
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect::<Vec<_>>()
        .join("; ")
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub bytes: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes).unwrap()
    }
}

pub async fn call(state: &Arc<AppState>, request: Request<Body>) -> Reply {
    let response = router(state.clone()).oneshot(request).await.unwrap();
    let status = response.status();
    let content_type = response
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply {
        status,
        content_type,
        bytes,
    }
}

pub async fn get(state: &Arc<AppState>, uri: &str) -> Reply {
    call(state, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub async fn post_json(state: &Arc<AppState>, uri: &str, body: &str) -> Reply {
    let request = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    call(state, request).await
}
