//! Versioned snapshot of a built atlas, stored as canonical JSON: object keys
//! sorted at every depth, no insignificant whitespace.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::annotator::{AnnotationSet, Annotator};
use crate::association::{AssociationIndex, InvertedIndex};
use crate::corpus::{DocumentRecord, Stopwords};
use crate::error::{Error, Result};
use crate::navigation::Atlas;
use crate::ontology::Ontology;
use crate::scalar::Scalar;
use crate::similarity::SimilarityGraph;

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Snapshot<S: Scalar> {
    pub version: u32,
    pub ontology: Ontology,
    pub stopwords: Stopwords,
    pub documents: Vec<DocumentRecord>,
    pub annotations: Vec<AnnotationSet<S>>,
    pub inverted_index: InvertedIndex<S>,
    pub association_index: AssociationIndex<S>,
    pub similarity_graph: SimilarityGraph<S>,
}

impl<S: Scalar> Snapshot<S> {
    pub fn from_atlas(atlas: &Atlas<S>) -> Self {
        Snapshot {
            version: SNAPSHOT_VERSION,
            ontology: atlas.ontology().clone(),
            stopwords: atlas.stopwords().clone(),
            documents: atlas.records().cloned().collect(),
            annotations: atlas.annotations().cloned().collect(),
            inverted_index: atlas.inverted().clone(),
            association_index: atlas.associations().clone(),
            similarity_graph: atlas.similarity().clone(),
        }
    }

    pub fn into_atlas(self) -> Result<Atlas<S>> {
        let annotator = Annotator::new(&self.ontology, self.stopwords)?;
        Atlas::from_indexes(
            self.ontology,
            annotator,
            self.documents,
            self.annotations,
            self.inverted_index,
            self.association_index,
            self.similarity_graph,
        )
    }

    pub fn to_canonical_json(&self) -> Result<Vec<u8>> {
        to_canonical_json(self)
    }

    /// Checks the version before decoding the rest.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let value: Value = serde_json::from_slice(bytes)?;
        let found = value
            .get("version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Contract("snapshot has no integer `version`".into()))?;
        if found != u64::from(SNAPSHOT_VERSION) {
            return Err(Error::VersionMismatch {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                expected: SNAPSHOT_VERSION,
            });
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_canonical_json()?;
        fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
    }
}

/// Minified JSON with object keys sorted at every depth.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let canon = canonicalize(serde_json::to_value(value)?);
    Ok(serde_json::to_vec(&canon)?)
}

fn canonicalize(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::with_capacity(entries.len());
            for (k, v) in entries {
                out.insert(k, canonicalize(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_sorts_nested_keys() {
        let v = serde_json::json!({"b": 1, "a": {"z": [ {"y": 1, "x": 2} ], "c": null}});
        let s = String::from_utf8(to_canonical_json(&v).unwrap()).unwrap();
        assert_eq!(s, r#"{"a":{"c":null,"z":[{"x":2,"y":1}]},"b":1}"#);
    }

    #[test]
    fn version_mismatch_refused() {
        let err = Snapshot::<f64>::from_json(br#"{"version": 2}"#).unwrap_err();
        assert!(matches!(err, Error::VersionMismatch { found: 2, expected: 1 }));
        assert!(Snapshot::<f64>::from_json(br#"{"nope": 1}"#).is_err());
    }
}
