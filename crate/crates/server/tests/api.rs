mod support;

use std::collections::BTreeSet;

use atlas_server::api::ViewPayload;
use axum::http::StatusCode;
use serde_json::{json, Value};
use support::*;

fn assert_view(reply: &Reply) -> ViewPayload {
    assert_eq!(
        reply.status,
        StatusCode::OK,
        "{}",
        String::from_utf8_lossy(&reply.bytes)
    );
    let value = reply.json();
    let errors = schema_errors(&schema("graph_view"), &value);
    assert!(errors.is_empty(), "{errors}");
    let view: ViewPayload = serde_json::from_value(value).unwrap();
    let ids: BTreeSet<&str> = view.nodes.iter().map(|n| n.id.as_str()).collect();
    assert_eq!(ids.len(), view.nodes.len());
    assert!(ids.contains(view.focus.as_str()));
    for e in &view.edges {
        assert!(ids.contains(e.from.as_str()) && ids.contains(e.to.as_str()));
    }
    view
}

fn assert_error(reply: &Reply, status: StatusCode) {
    assert_eq!(reply.status, status);
    let errors = schema_errors(&schema("error"), &reply.json());
    assert!(errors.is_empty(), "{errors}");
    assert_eq!(reply.json()["status"], status.as_u16());
}

#[tokio::test]
async fn root_view_lists_root_themes() {
    let state = seed_state();
    let reply = get(&state, "/api/themes").await;
    assert_eq!(reply.content_type, "application/json");
    let view = assert_view(&reply);
    let roots: Vec<&str> = view
        .nodes
        .iter()
        .filter(|n| n.level == 0)
        .map(|n| n.id.as_str())
        .collect();
    assert_eq!(
        roots,
        [
            "theme:security",
            "theme:artificial-intelligence",
            "theme:information-system"
        ]
    );
    assert_eq!(view.focus, "theme:security");
    assert_eq!(view.distortion, 3.0);
}

#[tokio::test]
async fn every_theme_and_concept_view_is_schema_valid() {
    let state = seed_state();
    let ont = state.atlas.ontology();
    for t in ont.themes() {
        assert_view(&get(&state, &format!("/api/themes/{}", t.id)).await);
    }
    for c in ont.concepts() {
        assert_view(&get(&state, &format!("/api/concepts/{}", c.id)).await);
        let view = assert_view(&get(&state, &format!("/api/concepts/{}/associations", c.id)).await);
        for e in view.edges.iter().filter(|e| e.from == view.focus) {
            let label = e.label.as_deref().unwrap();
            assert_eq!(label.split('.').nth(1).unwrap().len(), 2, "{label}");
        }
    }
}

#[tokio::test]
async fn responses_are_canonical_json() {
    let state = seed_state();
    for uri in [
        "/api/themes",
        "/api/documents/securing-mobile-agents.txt",
        "/api/search?q=mobile%20agents",
    ] {
        let reply = get(&state, uri).await;
        let canonical = atlas_core::snapshot::to_canonical_json(&reply.json()).unwrap();
        assert_eq!(reply.bytes, canonical, "{uri}");
    }
}

#[tokio::test]
async fn ranked_lists_are_schema_valid() {
    let state = seed_state();
    let validator = schema("scored_documents");
    let uris = [
        "/api/concepts/multi-agent-system/documents",
        "/api/associations/multi-agent-system/authentication/documents",
        "/api/associations/firewall/semantic-network/documents",
        "/api/documents/securing-mobile-agents.txt/similar",
        "/api/search?q=mobile+agents",
    ];
    for uri in uris {
        let reply = get(&state, uri).await;
        assert_eq!(reply.status, StatusCode::OK, "{uri}");
        let errors = schema_errors(&validator, &reply.json());
        assert!(errors.is_empty(), "{uri}: {errors}");
    }
}

#[tokio::test]
async fn pair_documents_carry_degree_and_relevance() {
    let state = seed_state();
    let body = get(&state, "/api/associations/authentication/multi-agent-system/documents")
        .await
        .json();
    let edge = state
        .atlas
        .associations()
        .edge("authentication", "multi-agent-system")
        .unwrap();
    assert_eq!(body["degree"], json!(edge.degree));
    assert_eq!(body["degree_label"], json!(format!("{:.2}", edge.degree)));
    let docs = body["documents"].as_array().unwrap();
    assert_eq!(docs.len(), 3);
    for d in docs {
        let score = d["score"].as_f64().unwrap();
        assert_eq!(d["label"], json!(format!("{score:.3}")));
    }

    let unrelated = get(&state, "/api/associations/firewall/semantic-network/documents")
        .await
        .json();
    assert_eq!(unrelated["degree"], Value::Null);
    assert_eq!(unrelated["documents"], json!([]));
}

#[tokio::test]
async fn document_detail_is_schema_valid() {
    let state = seed_state();
    let validator = schema("document_detail");
    let ids: Vec<String> = state.atlas.records().map(|r| r.doc_id.clone()).collect();
    for id in ids {
        let reply = get(&state, &format!("/api/documents/{}", id.replace('/', "%2F"))).await;
        assert_eq!(reply.status, StatusCode::OK, "{id}");
        let errors = schema_errors(&validator, &reply.json());
        assert!(errors.is_empty(), "{id}: {errors}");
    }
}

#[tokio::test]
async fn nested_document_ids_are_addressable() {
    let state = seed_state();
    let reply = get(&state, "/api/documents/archive%2Fexpert-agents.txt").await;
    assert_eq!(reply.status, StatusCode::OK);
    assert_eq!(
        reply.json()["summary"]["descriptive"]["doc_id"],
        "archive/expert-agents.txt"
    );
}

#[tokio::test]
async fn similar_respects_threshold_and_k() {
    let state = seed_state();
    let body = get(&state, "/api/documents/securing-mobile-agents.txt/similar")
        .await
        .json();
    let list = body["similar"].as_array().unwrap();
    assert!(!list.is_empty());
    assert!(list.len() <= state.atlas.settings().similar_k);
    let scores: Vec<f64> = list.iter().map(|d| d["score"].as_f64().unwrap()).collect();
    assert!(scores.iter().all(|s| *s >= state.atlas.settings().similarity_threshold));
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
}

#[tokio::test]
async fn missing_things_are_404() {
    let state = seed_state();
    for uri in [
        "/api/themes/nope",
        "/api/themes/multi-agent-system",
        "/api/concepts/security",
        "/api/concepts/nope/documents",
        "/api/concepts/nope/associations",
        "/api/associations/nope/firewall/documents",
        "/api/documents/nope.txt",
        "/api/documents/nope.txt/similar",
        "/api/trail/never-seen",
        "/api/unknown",
    ] {
        assert_error(&get(&state, uri).await, StatusCode::NOT_FOUND);
    }
}

#[tokio::test]
async fn bad_queries_are_400() {
    let state = seed_state();
    for uri in [
        "/api/search",
        "/api/search?q=",
        "/api/search?q=%20%20",
        "/api/associations/firewall/firewall/documents",
    ] {
        assert_error(&get(&state, uri).await, StatusCode::BAD_REQUEST);
    }
}

#[tokio::test]
async fn trail_records_steps_in_order() {
    let state = seed_state();
    let validator = schema("trail");
    let steps = [
        ("thematic", "theme:security"),
        ("connotative", "concept:firewall"),
        ("document", "document:gardening.txt"),
    ];
    for (i, (view, focus)) in steps.iter().enumerate() {
        let reply = post_json(
            &state,
            "/api/trail/s1",
            &json!({"view": view, "focus": focus}).to_string(),
        )
        .await;
        assert_eq!(reply.status, StatusCode::OK);
        let body = reply.json();
        assert!(schema_errors(&validator, &body).is_empty());
        assert_eq!(body["steps"].as_array().unwrap().len(), i + 1);
    }
    let body = get(&state, "/api/trail/s1").await.json();
    let got: Vec<(&str, &str)> = body["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["view"].as_str().unwrap(), s["focus"].as_str().unwrap()))
        .collect();
    assert_eq!(got, steps);
    assert_error(&get(&state, "/api/trail/s2").await, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn malformed_trail_posts_are_400() {
    let state = seed_state();
    for body in [
        "not json",
        r#"{"view":"sideways","focus":"x"}"#,
        r#"{"view":"thematic","focus":"  "}"#,
        r#"{"view":"thematic"}"#,
    ] {
        assert_error(&post_json(&state, "/api/trail/s", body).await, StatusCode::BAD_REQUEST);
    }
}
