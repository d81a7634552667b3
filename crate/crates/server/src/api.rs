//! HTTP API over a loaded atlas. Every body is canonical JSON.

use std::collections::HashMap;
use std::sync::Arc;

use atlas_core::layout::{fisheye_distort, radial_layout};
use atlas_core::navigation::{DocumentHit, ViewKind};
use atlas_core::navigation::{DEGREE_DECIMALS, RELEVANCE_DECIMALS};
use atlas_core::scalar::format_fixed;
use atlas_core::snapshot::to_canonical_json;
use atlas_core::{Atlas, Error as CoreError, GraphView, LaidOutView, NavigationTrail, NodeKind, TrailStore};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

pub struct AppState {
    pub atlas: Atlas,
    pub trails: TrailStore,
    pub distortion: f64,
}

impl AppState {
    pub fn new(atlas: Atlas, distortion: f64) -> Self {
        AppState {
            atlas,
            trails: TrailStore::new(),
            distortion,
        }
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/themes", get(root_themes))
        .route("/api/themes/{id}", get(theme))
        .route("/api/concepts/{id}", get(concept))
        .route("/api/concepts/{id}/documents", get(concept_documents))
        .route("/api/concepts/{id}/associations", get(concept_associations))
        .route("/api/associations/{a}/{b}/documents", get(pair_documents))
        .route("/api/documents/{id}", get(document))
        .route("/api/documents/{id}/similar", get(similar))
        .route("/api/search", get(search))
        .route("/api/trail/{session}", get(trail_read).post(trail_append))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") })
        .with_state(state)
}

/// Serializes with sorted keys and no insignificant whitespace.
pub struct Canonical<T>(pub T);

impl<T: Serialize> IntoResponse for Canonical<T> {
    fn into_response(self) -> Response {
        match to_canonical_json(&self.0) {
            Ok(bytes) => ([(header::CONTENT_TYPE, "application/json")], bytes).into_response(),
            Err(e) => ApiError::from(e).into_response(),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match &e {
            CoreError::NotFound { .. } => StatusCode::NOT_FOUND,
            CoreError::InvalidArgument(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    status: u16,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(status = %self.status, "{}", self.message);
        }
        let body = ErrorBody {
            error: &self.message,
            status: self.status.as_u16(),
        };
        let bytes = to_canonical_json(&body).unwrap_or_else(|_| b"{\"error\":\"internal\"}".to_vec());
        (self.status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
    }
}

type ApiResult<T> = Result<Canonical<T>, ApiError>;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct NodePayload {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub level: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EdgePayload {
    pub from: String,
    pub to: String,
    pub label: Option<String>,
}

/// Wire form of a laid-out graph view.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ViewPayload {
    pub nodes: Vec<NodePayload>,
    pub edges: Vec<EdgePayload>,
    pub focus: String,
    pub distortion: f64,
}

impl From<LaidOutView> for ViewPayload {
    fn from(lay: LaidOutView) -> Self {
        let nodes = lay
            .view
            .nodes
            .into_iter()
            .zip(lay.points)
            .map(|(n, p)| NodePayload {
                id: n.id,
                kind: n.kind,
                label: n.label,
                level: n.level,
                x: p.x,
                y: p.y,
            })
            .collect();
        let edges = lay
            .view
            .edges
            .into_iter()
            .map(|e| EdgePayload {
                from: e.from,
                to: e.to,
                label: e.label,
            })
            .collect();
        ViewPayload {
            nodes,
            edges,
            focus: lay.view.focus,
            distortion: lay.distortion,
        }
    }
}

fn laid_out(state: &AppState, view: GraphView) -> ApiResult<ViewPayload> {
    view.validate()?;
    let lay = radial_layout::<f64>(&view)?;
    let lay = fisheye_distort(&lay, state.distortion)?;
    Ok(Canonical(lay.into()))
}

async fn root_themes(State(state): State<Shared>) -> ApiResult<ViewPayload> {
    let view = state.atlas.root_view()?;
    laid_out(&state, view)
}

async fn theme(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<ViewPayload> {
    state.atlas.ontology().require_theme(&id)?;
    let view = state.atlas.thematic_view(&id)?;
    laid_out(&state, view)
}

async fn concept(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<ViewPayload> {
    state.atlas.ontology().require_concept(&id)?;
    let view = state.atlas.thematic_view(&id)?;
    laid_out(&state, view)
}

async fn concept_associations(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<ViewPayload> {
    let view = state.atlas.connotative_view(&id)?;
    laid_out(&state, view)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ScoredDocument {
    pub doc_id: String,
    pub title: String,
    pub score: f64,
    pub label: String,
}

fn scored(hits: Vec<DocumentHit<f64>>, decimals: usize) -> Vec<ScoredDocument> {
    hits.into_iter()
        .map(|h| ScoredDocument {
            label: format_fixed(h.score, decimals),
            doc_id: h.doc_id,
            title: h.title,
            score: h.score,
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ConceptDocuments {
    pub concept: String,
    pub documents: Vec<ScoredDocument>,
}

async fn concept_documents(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<ConceptDocuments> {
    let hits = state.atlas.concept_documents(&id)?;
    Ok(Canonical(ConceptDocuments {
        concept: id,
        documents: scored(hits, RELEVANCE_DECIMALS),
    }))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PairDocumentsPayload {
    pub concept_a: String,
    pub concept_b: String,
    pub degree: Option<f64>,
    pub degree_label: Option<String>,
    pub documents: Vec<ScoredDocument>,
}

async fn pair_documents(
    State(state): State<Shared>,
    Path((a, b)): Path<(String, String)>,
) -> ApiResult<PairDocumentsPayload> {
    let pair = state.atlas.pair_documents(&a, &b)?;
    Ok(Canonical(PairDocumentsPayload {
        degree_label: pair.degree.map(|d| format_fixed(d, DEGREE_DECIMALS)),
        concept_a: pair.concept_a,
        concept_b: pair.concept_b,
        degree: pair.degree,
        documents: scored(pair.documents, RELEVANCE_DECIMALS),
    }))
}

async fn document(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<atlas_core::DocumentDetail> {
    Ok(Canonical(state.atlas.document_detail(&id)?))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SimilarPayload {
    pub doc_id: String,
    pub similar: Vec<ScoredDocument>,
}

async fn similar(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<SimilarPayload> {
    let k = state.atlas.settings().similar_k;
    let hits = state.atlas.similar_documents(&id, k)?;
    Ok(Canonical(SimilarPayload {
        doc_id: id,
        similar: scored(hits, RELEVANCE_DECIMALS),
    }))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SearchPayload {
    pub query: String,
    pub results: Vec<ScoredDocument>,
}

async fn search(
    State(state): State<Shared>,
    query: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<SearchPayload> {
    let Query(params) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let q = params
        .get("q")
        .ok_or_else(|| ApiError::bad_request("missing query parameter `q`"))?;
    let hits = state.atlas.precise_search(q)?;
    Ok(Canonical(SearchPayload {
        query: q.clone(),
        results: scored(hits, RELEVANCE_DECIMALS),
    }))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TrailStepRequest {
    pub view: ViewKind,
    pub focus: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TrailPayload {
    pub session: String,
    #[serde(flatten)]
    pub trail: NavigationTrail,
}

async fn trail_append(
    State(state): State<Shared>,
    Path(session): Path<String>,
    body: Result<Json<TrailStepRequest>, JsonRejection>,
) -> ApiResult<TrailPayload> {
    let Json(step) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    if step.focus.trim().is_empty() {
        return Err(ApiError::bad_request("empty focus"));
    }
    let trail = state.trails.append(&session, step.view, &step.focus)?;
    Ok(Canonical(TrailPayload { session, trail }))
}

async fn trail_read(State(state): State<Shared>, Path(session): Path<String>) -> ApiResult<TrailPayload> {
    let trail = state.trails.read(&session)?;
    Ok(Canonical(TrailPayload { session, trail }))
}
