//! End-to-end indexing: parse, tokenize, annotate, associate, compare.

use std::fs;
use std::path::Path;

use crate::corpus::{load_corpus, Stopwords};
use crate::error::{Error, Result};
use crate::navigation::Atlas;
use crate::ontology::parse_ontology;
use crate::scalar::Scalar;
use crate::snapshot::Snapshot;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexReport {
    pub documents: usize,
    pub annotated_documents: usize,
    pub concepts_matched: usize,
    pub association_edges: usize,
    pub similarity_edges: usize,
}

impl<S: Scalar> From<&Atlas<S>> for IndexReport {
    fn from(atlas: &Atlas<S>) -> Self {
        IndexReport {
            documents: atlas.records().count(),
            annotated_documents: atlas.annotations().filter(|a| a.is_annotated()).count(),
            concepts_matched: atlas.inverted().postings.values().filter(|p| !p.is_empty()).count(),
            association_edges: atlas.associations().len(),
            similarity_edges: atlas.similarity().edges().len(),
        }
    }
}

/// Reads the ontology file and the corpus directory and builds the atlas.
/// `stopwords` defaults to the bundled English list.
pub fn index_corpus<S: Scalar>(
    corpus_dir: &Path,
    ontology_path: &Path,
    stopwords_path: Option<&Path>,
) -> Result<Atlas<S>> {
    let source = fs::read_to_string(ontology_path).map_err(|e| Error::io(ontology_path, e))?;
    let ontology = parse_ontology(&source).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Format {
            path: ontology_path.into(),
            line,
            message,
        },
        other => other,
    })?;
    let stopwords = match stopwords_path {
        Some(p) => Stopwords::load(p)?,
        None => Stopwords::english(),
    };
    let records = load_corpus(corpus_dir)?;
    Atlas::build(ontology, records, stopwords)
}

pub fn index_to_snapshot<S: Scalar>(
    corpus_dir: &Path,
    ontology_path: &Path,
    stopwords_path: Option<&Path>,
) -> Result<(Snapshot<S>, IndexReport)> {
    let atlas = index_corpus::<S>(corpus_dir, ontology_path, stopwords_path)?;
    let report = IndexReport::from(&atlas);
    Ok((Snapshot::from_atlas(&atlas), report))
}
