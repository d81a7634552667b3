//! Document similarity graph over concept-pertinence vectors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::annotator::AnnotationSet;
use crate::error::{Error, Result};
use crate::scalar::{cmp_desc, Scalar};

pub const DEFAULT_THRESHOLD: f64 = 0.25;
pub const DEFAULT_K: usize = 10;

/// Cosine similarity of the sparse concept -> pertinence vectors. Products
/// are accumulated in concept id order so the result is exactly symmetric.
pub fn doc_similarity<S: Scalar>(a: &AnnotationSet<S>, b: &AnnotationSet<S>) -> S {
    let va = sorted_vector(a);
    let vb = sorted_vector(b);
    cosine_sorted(&va, &vb)
}

fn sorted_vector<S: Scalar>(ann: &AnnotationSet<S>) -> Vec<(&str, S)> {
    let mut v: Vec<(&str, S)> = ann
        .concepts
        .iter()
        .map(|c| (c.concept_id.as_str(), c.pertinence))
        .collect();
    v.sort_by(|x, y| x.0.cmp(y.0));
    v
}

fn cosine_sorted<S: Scalar>(a: &[(&str, S)], b: &[(&str, S)]) -> S {
    if a.is_empty() || b.is_empty() {
        return S::zero();
    }
    let norm = |v: &[(&str, S)]| v.iter().fold(S::zero(), |acc, &(_, p)| acc + p * p);
    let (mut i, mut j) = (0, 0);
    let mut dot = S::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot = dot + a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let denom = (norm(a) * norm(b)).sqrt();
    if denom <= S::zero() {
        return S::zero();
    }
    (dot / denom).max(S::zero()).min(S::one())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityEdge<S> {
    pub doc_a: String,
    pub doc_b: String,
    pub score: S,
}

/// Thresholded similarity graph. Edges with score 0 are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph<S> {
    threshold: S,
    documents: BTreeSet<String>,
    edges: Vec<SimilarityEdge<S>>,
    adjacency: BTreeMap<String, Vec<(String, S)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename = "SimilarityGraph")]
struct SimilarityGraphWire<S> {
    threshold: S,
    documents: Vec<String>,
    edges: Vec<SimilarityEdge<S>>,
}

impl<S: Scalar> Serialize for SimilarityGraph<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        SimilarityGraphWire {
            threshold: self.threshold,
            documents: self.documents.iter().cloned().collect(),
            edges: self.edges.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for SimilarityGraph<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = SimilarityGraphWire::<S>::deserialize(deserializer)?;
        Ok(SimilarityGraph::from_parts(
            w.threshold,
            w.documents.into_iter().collect(),
            w.edges,
        ))
    }
}

impl<S: Scalar> SimilarityGraph<S> {
    /// All-pairs cosine; keeps pairs with `score >= threshold` and `score > 0`.
    pub fn build(annotations: &[AnnotationSet<S>], threshold: S) -> Result<Self> {
        check_threshold(threshold)?;
        let mut docs: Vec<(&str, Vec<(&str, S)>)> = annotations
            .iter()
            .map(|a| (a.doc_id.as_str(), sorted_vector(a)))
            .collect();
        docs.sort_by(|x, y| x.0.cmp(y.0));
        let mut documents = BTreeSet::new();
        for (id, _) in &docs {
            if !documents.insert(id.to_string()) {
                return Err(Error::Contract(format!("duplicate doc_id `{id}`")));
            }
        }
        let mut edges = Vec::new();
        for (i, (da, va)) in docs.iter().enumerate() {
            for (db, vb) in &docs[i + 1..] {
                let score = cosine_sorted(va, vb);
                if score > S::zero() && score >= threshold {
                    edges.push(SimilarityEdge {
                        doc_a: da.to_string(),
                        doc_b: db.to_string(),
                        score,
                    });
                }
            }
        }
        Ok(Self::from_parts(threshold, documents, edges))
    }

    fn from_parts(threshold: S, documents: BTreeSet<String>, mut edges: Vec<SimilarityEdge<S>>) -> Self {
        edges.sort_by(|x, y| (&x.doc_a, &x.doc_b).cmp(&(&y.doc_a, &y.doc_b)));
        let mut adjacency: BTreeMap<String, Vec<(String, S)>> = BTreeMap::new();
        for e in &edges {
            adjacency
                .entry(e.doc_a.clone())
                .or_default()
                .push((e.doc_b.clone(), e.score));
            adjacency
                .entry(e.doc_b.clone())
                .or_default()
                .push((e.doc_a.clone(), e.score));
        }
        for list in adjacency.values_mut() {
            list.sort_by(|x, y| cmp_desc(x.1, y.1).then_with(|| x.0.cmp(&y.0)));
        }
        SimilarityGraph {
            threshold,
            documents,
            edges,
            adjacency,
        }
    }

    /// Same graph restricted to scores `>= threshold`. Raising the threshold
    /// is exact; lowering it below the build threshold cannot recover edges.
    pub fn with_threshold(&self, threshold: S) -> Result<Self> {
        check_threshold(threshold)?;
        let edges = self.edges.iter().filter(|e| e.score >= threshold).cloned().collect();
        Ok(Self::from_parts(
            threshold.max(self.threshold),
            self.documents.clone(),
            edges,
        ))
    }

    pub fn threshold(&self) -> S {
        self.threshold
    }

    pub fn edges(&self) -> &[SimilarityEdge<S>] {
        &self.edges
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.documents.contains(doc_id)
    }

    /// Top `k` neighbors, score desc then doc id asc.
    pub fn similar_documents(&self, doc_id: &str, k: usize) -> Result<Vec<(String, S)>> {
        if !self.contains(doc_id) {
            return Err(Error::not_found("document", doc_id));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        Ok(self
            .adjacency
            .get(doc_id)
            .map(|l| l.iter().take(k).cloned().collect())
            .unwrap_or_default())
    }
}

fn check_threshold<S: Scalar>(t: S) -> Result<()> {
    if !(t >= S::zero() && t <= S::one()) {
        return Err(Error::InvalidArgument(format!(
            "similarity threshold {t} outside [0, 1]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::ConceptAnnotation;

    fn ann(doc: &str, concepts: &[(&str, f64)]) -> AnnotationSet<f64> {
        AnnotationSet {
            doc_id: doc.into(),
            concepts: concepts
                .iter()
                .map(|(c, p)| ConceptAnnotation {
                    concept_id: c.to_string(),
                    frequency: 1,
                    pertinence: *p,
                })
                .collect(),
            major_theme: None,
            minor_themes: vec![],
            theme_weights: vec![],
        }
    }

    #[test]
    fn self_similarity_is_one() {
        let a = ann("a", &[("c1", 1.0), ("c2", 0.3), ("c3", 0.7)]);
        assert_eq!(doc_similarity(&a, &a), 1.0);
    }

    #[test]
    fn disjoint_is_zero() {
        let a = ann("a", &[("c1", 1.0)]);
        let b = ann("b", &[("c2", 1.0)]);
        assert_eq!(doc_similarity(&a, &b), 0.0);
        assert_eq!(doc_similarity(&a, &ann("e", &[])), 0.0);
    }

    #[test]
    fn hand_cosine() {
        let a = ann("a", &[("c1", 1.0), ("c2", 0.5)]);
        let b = ann("b", &[("c1", 0.5), ("c2", 1.0)]);
        assert!((doc_similarity(&a, &b) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn single_document_has_no_neighbors() {
        let g = SimilarityGraph::build(&[ann("a", &[("c1", 1.0)])], 0.25).unwrap();
        assert!(g.similar_documents("a", 10).unwrap().is_empty());
        assert!(matches!(g.similar_documents("zz", 10), Err(Error::NotFound { .. })));
    }

    #[test]
    fn clones_list_each_other() {
        let g = SimilarityGraph::build(
            &[
                ann("d1", &[("c1", 1.0), ("c2", 0.5)]),
                ann("d2", &[("c2", 0.5), ("c1", 1.0)]),
            ],
            0.25,
        )
        .unwrap();
        assert_eq!(g.similar_documents("d1", 5).unwrap(), [("d2".to_string(), 1.0)]);
        assert_eq!(g.similar_documents("d2", 5).unwrap(), [("d1".to_string(), 1.0)]);
    }

    #[test]
    fn threshold_filters_and_rejects_out_of_range() {
        let anns = [
            ann("a", &[("x", 1.0)]),
            ann("b", &[("x", 1.0), ("y", 1.0), ("z", 1.0), ("w", 1.0)]),
        ];
        // cosine = 1 / 2
        let g = SimilarityGraph::build(&anns, 0.0).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.with_threshold(0.6).unwrap().edges().len(), 0);
        assert_eq!(g.with_threshold(0.5).unwrap().edges().len(), 1);
        assert!(SimilarityGraph::build(&anns, 1.5).is_err());
        assert!(g.with_threshold(-0.1).is_err());
    }
}
