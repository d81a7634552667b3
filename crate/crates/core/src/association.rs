//! Inverted index and concept cooccurrence network.
//!
//! Two concepts are associated when at least one document carries both. The
//! association degree is the Jaccard index of their document sets, and each
//! association indexes the documents in the intersection with a pair
//! relevance equal to the mean of the two pertinences.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::annotator::AnnotationSet;
use crate::error::{Error, Result};
use crate::ontology::Ontology;
use crate::scalar::{cmp_desc, Scalar};

pub const DEFAULT_MAX_NEIGHBORS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posting<S> {
    pub doc_id: String,
    pub pertinence: S,
}

/// concept id -> postings, pertinence desc then doc id asc.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InvertedIndex<S> {
    pub postings: BTreeMap<String, Vec<Posting<S>>>,
}

impl<S: Scalar> InvertedIndex<S> {
    pub fn postings(&self, concept_id: &str) -> &[Posting<S>] {
        self.postings.get(concept_id).map_or(&[], Vec::as_slice)
    }

    pub fn pertinence(&self, concept_id: &str, doc_id: &str) -> Option<S> {
        self.postings(concept_id)
            .iter()
            .find(|p| p.doc_id == doc_id)
            .map(|p| p.pertinence)
    }

    pub fn doc_set(&self, concept_id: &str) -> BTreeSet<&str> {
        self.postings(concept_id).iter().map(|p| p.doc_id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDoc<S> {
    pub doc_id: String,
    pub pair_relevance: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationEdge<S> {
    pub concept_a: String,
    pub concept_b: String,
    pub degree: S,
    pub pair_docs: Vec<PairDoc<S>>,
}

impl<S> AssociationEdge<S> {
    /// The endpoint that is not `concept`.
    pub fn other(&self, concept: &str) -> &str {
        if self.concept_a == concept {
            &self.concept_b
        } else {
            &self.concept_a
        }
    }
}

type EdgeKey = (String, String);

fn edge_key(a: &str, b: &str) -> EdgeKey {
    if a < b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Sparse association network; only pairs with a shared document are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationIndex<S> {
    edges: BTreeMap<EdgeKey, AssociationEdge<S>>,
    by_concept: BTreeMap<String, Vec<EdgeKey>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename = "AssociationIndex")]
struct AssociationIndexWire<S> {
    edges: Vec<AssociationEdge<S>>,
}

impl<S: Scalar> Serialize for AssociationIndex<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        AssociationIndexWire {
            edges: self.edges.values().cloned().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for AssociationIndex<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = AssociationIndexWire::<S>::deserialize(deserializer)?;
        let mut edges = BTreeMap::new();
        for e in wire.edges {
            if e.concept_a >= e.concept_b {
                return Err(serde::de::Error::custom(format!(
                    "edge endpoints out of order: {} / {}",
                    e.concept_a, e.concept_b
                )));
            }
            edges.insert((e.concept_a.clone(), e.concept_b.clone()), e);
        }
        Ok(AssociationIndex::from_edges(edges))
    }
}

impl<S: Scalar> AssociationIndex<S> {
    fn from_edges(edges: BTreeMap<EdgeKey, AssociationEdge<S>>) -> Self {
        let mut by_concept: BTreeMap<String, Vec<EdgeKey>> = BTreeMap::new();
        for key in edges.keys() {
            by_concept.entry(key.0.clone()).or_default().push(key.clone());
            by_concept.entry(key.1.clone()).or_default().push(key.clone());
        }
        for (concept, keys) in by_concept.iter_mut() {
            keys.sort_by(|x, y| {
                let (ex, ey) = (&edges[x], &edges[y]);
                cmp_desc(ex.degree, ey.degree).then_with(|| ex.other(concept).cmp(ey.other(concept)))
            });
        }
        AssociationIndex { edges, by_concept }
    }

    pub fn edges(&self) -> impl Iterator<Item = &AssociationEdge<S>> {
        self.edges.values()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Order of the endpoints does not matter.
    pub fn edge(&self, a: &str, b: &str) -> Option<&AssociationEdge<S>> {
        self.edges.get(&edge_key(a, b))
    }

    /// Edges touching `concept`, degree desc then neighbor id asc.
    pub fn neighbors<'a>(&'a self, concept: &str) -> impl Iterator<Item = &'a AssociationEdge<S>> + 'a {
        self.by_concept
            .get(concept)
            .into_iter()
            .flatten()
            .map(|k| &self.edges[k])
    }

    pub fn association_degree(&self, a: &str, b: &str) -> Result<Option<S>> {
        if a == b {
            return Err(Error::InvalidArgument(format!(
                "self-association of `{a}` is undefined"
            )));
        }
        Ok(self.edge(a, b).map(|e| e.degree))
    }
}

pub fn build_association_index<S: Scalar>(
    annotations: &[AnnotationSet<S>],
) -> Result<(InvertedIndex<S>, AssociationIndex<S>)> {
    let mut seen = BTreeSet::new();
    for ann in annotations {
        if !seen.insert(ann.doc_id.as_str()) {
            return Err(Error::Contract(format!("duplicate doc_id `{}`", ann.doc_id)));
        }
    }

    let mut postings: BTreeMap<String, Vec<Posting<S>>> = BTreeMap::new();
    // pair -> documents carrying both, with the pertinences in (a, b) order
    let mut shared: BTreeMap<EdgeKey, Vec<(String, S, S)>> = BTreeMap::new();
    for ann in annotations {
        for c in &ann.concepts {
            postings.entry(c.concept_id.clone()).or_default().push(Posting {
                doc_id: ann.doc_id.clone(),
                pertinence: c.pertinence,
            });
        }
        let mut sorted: Vec<(&str, S)> = ann
            .concepts
            .iter()
            .map(|c| (c.concept_id.as_str(), c.pertinence))
            .collect();
        sorted.sort_by(|x, y| x.0.cmp(y.0));
        for (i, &(a, pa)) in sorted.iter().enumerate() {
            for &(b, pb) in &sorted[i + 1..] {
                shared
                    .entry((a.to_string(), b.to_string()))
                    .or_default()
                    .push((ann.doc_id.clone(), pa, pb));
            }
        }
    }
    for list in postings.values_mut() {
        list.sort_by(|x, y| cmp_desc(x.pertinence, y.pertinence).then_with(|| x.doc_id.cmp(&y.doc_id)));
    }

    let two = S::one() + S::one();
    let mut edges = BTreeMap::new();
    for ((a, b), docs) in shared {
        let inter = docs.len();
        let union = postings[&a].len() + postings[&b].len() - inter;
        let mut pair_docs: Vec<PairDoc<S>> = docs
            .into_iter()
            .map(|(doc_id, pa, pb)| PairDoc {
                doc_id,
                pair_relevance: (pa + pb) / two,
            })
            .collect();
        pair_docs.sort_by(|x, y| cmp_desc(x.pair_relevance, y.pair_relevance).then_with(|| x.doc_id.cmp(&y.doc_id)));
        let edge = AssociationEdge {
            concept_a: a.clone(),
            concept_b: b.clone(),
            degree: S::from_count(inter) / S::from_count(union),
            pair_docs,
        };
        edges.insert((a, b), edge);
    }

    Ok((InvertedIndex { postings }, AssociationIndex::from_edges(edges)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperNeighbor<S> {
    pub concept_id: String,
    pub degree: S,
    pub documents: Vec<PairDoc<S>>,
}

/// Two-level view around a concept: its strongest associations, and under
/// each one the documents indexed by that pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergraphView<S> {
    pub center: String,
    pub neighbors: Vec<HyperNeighbor<S>>,
}

pub fn concept_hypergraph<S: Scalar>(
    idx: &AssociationIndex<S>,
    ont: &Ontology,
    center: &str,
    max_neighbors: usize,
) -> Result<HypergraphView<S>> {
    ont.require_concept(center)?;
    if max_neighbors == 0 {
        return Err(Error::InvalidArgument("max_neighbors must be positive".into()));
    }
    let neighbors = idx
        .neighbors(center)
        .take(max_neighbors)
        .map(|e| HyperNeighbor {
            concept_id: e.other(center).to_string(),
            degree: e.degree,
            documents: e.pair_docs.clone(),
        })
        .collect();
    Ok(HypergraphView {
        center: center.to_string(),
        neighbors,
    })
}
