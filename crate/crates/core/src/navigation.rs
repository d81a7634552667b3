//! Thematic, connotative and precise search over the frozen indexes, plus
//! per-session navigation trails.
//!
//! Node ids in a [`GraphView`] are prefixed with their kind (`theme:`,
//! `concept:`, `document:`). A document reached through an association in a
//! connotative view may appear under several neighbors, so those occurrences
//! get the id `concept:<neighbor>/document:<doc>`; [`parse_node_id`] recovers
//! the kind and key of either form.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::annotator::{build_summary, AnnotationSet, Annotator, DocumentSummary, DEFAULT_SUMMARY_CONCEPTS};
use crate::association::{
    build_association_index, concept_hypergraph, AssociationIndex, InvertedIndex, DEFAULT_MAX_NEIGHBORS,
};
use crate::corpus::{DocumentRecord, Stopwords};
use crate::error::{Error, Result};
use crate::ontology::Ontology;
use crate::scalar::{cmp_desc, format_fixed, Scalar};
use crate::similarity::{SimilarityGraph, DEFAULT_K, DEFAULT_THRESHOLD};

/// Decimals shown on association degree edges.
pub const DEGREE_DECIMALS: usize = 2;
/// Decimals shown on pertinence and pair relevance edges.
pub const RELEVANCE_DECIMALS: usize = 3;
pub const DEFAULT_TITLE_BONUS: f64 = 0.5;
pub const TRAIL_CAPACITY: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Theme,
    Concept,
    Document,
}

impl NodeKind {
    pub fn prefix(self) -> &'static str {
        match self {
            NodeKind::Theme => "theme:",
            NodeKind::Concept => "concept:",
            NodeKind::Document => "document:",
        }
    }

    pub fn node_id(self, key: &str) -> String {
        format!("{}{key}", self.prefix())
    }
}

/// Kind and ontology/corpus key of a view node id.
pub fn parse_node_id(id: &str) -> Option<(NodeKind, &str)> {
    if let Some(rest) = id.strip_prefix(NodeKind::Concept.prefix()) {
        if let Some((_, doc)) = rest.split_once("/document:") {
            return Some((NodeKind::Document, doc));
        }
        return Some((NodeKind::Concept, rest));
    }
    [NodeKind::Theme, NodeKind::Document]
        .into_iter()
        .find_map(|k| id.strip_prefix(k.prefix()).map(|key| (k, key)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewEdge {
    pub from: String,
    pub to: String,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphView {
    pub nodes: Vec<ViewNode>,
    pub edges: Vec<ViewEdge>,
    pub focus: String,
}

impl GraphView {
    /// Unique node ids, focus present, edge endpoints present, levels
    /// contiguous from 0.
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(Error::Contract(format!("view node `{}` appears twice", n.id)));
            }
        }
        if !ids.contains(self.focus.as_str()) {
            return Err(Error::Contract(format!("focus `{}` is not a view node", self.focus)));
        }
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !ids.contains(end.as_str()) {
                    return Err(Error::Contract(format!("edge endpoint `{end}` is not a view node")));
                }
            }
        }
        let levels: BTreeSet<u32> = self.nodes.iter().map(|n| n.level).collect();
        if levels.iter().copied().ne(0..levels.len() as u32) {
            return Err(Error::Contract(format!(
                "view levels {levels:?} are not contiguous from 0"
            )));
        }
        Ok(())
    }

    pub fn node(&self, id: &str) -> Option<&ViewNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Nodes one edge away from the focus: the places a user can go next.
    pub fn next_hops(&self) -> Vec<&ViewNode> {
        let targets: BTreeSet<&str> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.from == self.focus {
                    Some(e.to.as_str())
                } else if e.to == self.focus {
                    Some(e.from.as_str())
                } else {
                    None
                }
            })
            .collect();
        self.nodes.iter().filter(|n| targets.contains(n.id.as_str())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentHit<S> {
    pub doc_id: String,
    pub title: String,
    pub score: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDocuments<S> {
    pub concept_a: String,
    pub concept_b: String,
    pub degree: Option<S>,
    pub documents: Vec<DocumentHit<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentDetail<S> {
    pub summary: DocumentSummary<S>,
    pub similar: Vec<DocumentHit<S>>,
}

/// Query-time parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings<S> {
    pub similarity_threshold: S,
    pub similar_k: usize,
    pub max_neighbors: usize,
    pub summary_concepts: usize,
    pub title_bonus: S,
}

impl<S: Scalar> Default for Settings<S> {
    fn default() -> Self {
        Settings {
            similarity_threshold: S::from_f64_lossy(DEFAULT_THRESHOLD),
            similar_k: DEFAULT_K,
            max_neighbors: DEFAULT_MAX_NEIGHBORS,
            summary_concepts: DEFAULT_SUMMARY_CONCEPTS,
            title_bonus: S::from_f64_lossy(DEFAULT_TITLE_BONUS),
        }
    }
}

impl<S: Scalar> Settings<S> {
    pub fn validate(&self) -> Result<()> {
        let t = self.similarity_threshold;
        if !(t >= S::zero() && t <= S::one()) {
            return Err(Error::InvalidArgument(format!(
                "similarity threshold {t} outside [0, 1]"
            )));
        }
        if self.similar_k == 0 || self.max_neighbors == 0 || self.summary_concepts == 0 {
            return Err(Error::InvalidArgument(
                "k, max_neighbors and summary size must be >= 1".into(),
            ));
        }
        if self.title_bonus.is_nan() || self.title_bonus < S::zero() {
            return Err(Error::InvalidArgument("title bonus must be >= 0".into()));
        }
        Ok(())
    }
}

/// Frozen ontology, corpus, annotations and indexes, plus query settings.
#[derive(Debug, Clone)]
pub struct Atlas<S> {
    ontology: Ontology,
    annotator: Annotator,
    records: BTreeMap<String, DocumentRecord>,
    annotations: BTreeMap<String, AnnotationSet<S>>,
    inverted: InvertedIndex<S>,
    associations: AssociationIndex<S>,
    similarity: SimilarityGraph<S>,
    settings: Settings<S>,
}

impl<S: Scalar> Atlas<S> {
    /// Annotates every record and builds all indexes.
    pub fn build(ontology: Ontology, records: Vec<DocumentRecord>, stopwords: Stopwords) -> Result<Self> {
        let annotator = Annotator::new(&ontology, stopwords)?;
        let annotations = records.iter().map(|r| annotator.annotate(r, &ontology)).collect();
        Self::assemble(ontology, annotator, records, annotations)
    }

    /// Builds the indexes from externally produced annotations.
    pub fn from_annotations(
        ontology: Ontology,
        stopwords: Stopwords,
        records: Vec<DocumentRecord>,
        annotations: Vec<AnnotationSet<S>>,
    ) -> Result<Self> {
        let annotator = Annotator::new(&ontology, stopwords)?;
        Self::assemble(ontology, annotator, records, annotations)
    }

    fn assemble(
        ontology: Ontology,
        annotator: Annotator,
        records: Vec<DocumentRecord>,
        annotations: Vec<AnnotationSet<S>>,
    ) -> Result<Self> {
        let (inverted, associations) = build_association_index(&annotations)?;
        let similarity = SimilarityGraph::build(&annotations, S::zero())?;
        Self::from_indexes(
            ontology,
            annotator,
            records,
            annotations,
            inverted,
            associations,
            similarity,
        )
    }

    pub(crate) fn from_indexes(
        ontology: Ontology,
        annotator: Annotator,
        records: Vec<DocumentRecord>,
        annotations: Vec<AnnotationSet<S>>,
        inverted: InvertedIndex<S>,
        associations: AssociationIndex<S>,
        similarity: SimilarityGraph<S>,
    ) -> Result<Self> {
        let mut rec_map = BTreeMap::new();
        for r in records {
            if let Some(dup) = rec_map.insert(r.doc_id.clone(), r) {
                return Err(Error::Contract(format!("duplicate doc_id `{}`", dup.doc_id)));
            }
        }
        let mut ann_map = BTreeMap::new();
        for a in annotations {
            if !rec_map.contains_key(&a.doc_id) {
                return Err(Error::Contract(format!(
                    "annotations for unknown document `{}`",
                    a.doc_id
                )));
            }
            if ann_map.insert(a.doc_id.clone(), a).is_some() {
                return Err(Error::Contract("duplicate annotation set".into()));
            }
        }
        if ann_map.len() != rec_map.len() {
            return Err(Error::Contract(
                "every document needs exactly one annotation set".into(),
            ));
        }
        Ok(Atlas {
            ontology,
            annotator,
            records: rec_map,
            annotations: ann_map,
            inverted,
            associations,
            similarity,
            settings: Settings::default(),
        })
    }

    pub fn with_settings(mut self, settings: Settings<S>) -> Result<Self> {
        settings.validate()?;
        self.settings = settings;
        Ok(self)
    }

    pub fn settings(&self) -> &Settings<S> {
        &self.settings
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn annotator(&self) -> &Annotator {
        &self.annotator
    }

    pub fn stopwords(&self) -> &Stopwords {
        self.annotator.stopwords()
    }

    pub fn records(&self) -> impl Iterator<Item = &DocumentRecord> {
        self.records.values()
    }

    pub fn record(&self, doc_id: &str) -> Result<&DocumentRecord> {
        self.records
            .get(doc_id)
            .ok_or_else(|| Error::not_found("document", doc_id))
    }

    pub fn annotations(&self) -> impl Iterator<Item = &AnnotationSet<S>> {
        self.annotations.values()
    }

    pub fn annotation(&self, doc_id: &str) -> Result<&AnnotationSet<S>> {
        self.annotations
            .get(doc_id)
            .ok_or_else(|| Error::not_found("document", doc_id))
    }

    pub fn inverted(&self) -> &InvertedIndex<S> {
        &self.inverted
    }

    pub fn associations(&self) -> &AssociationIndex<S> {
        &self.associations
    }

    pub fn similarity(&self) -> &SimilarityGraph<S> {
        &self.similarity
    }

    fn title(&self, doc_id: &str) -> String {
        self.records
            .get(doc_id)
            .map(|r| r.title.clone())
            .unwrap_or_else(|| doc_id.to_string())
    }

    fn theme_node(&self, id: &str, level: u32) -> ViewNode {
        let label = self
            .ontology
            .theme(id)
            .map_or_else(|| id.to_string(), |t| t.label.clone());
        ViewNode {
            id: NodeKind::Theme.node_id(id),
            kind: NodeKind::Theme,
            label,
            level,
        }
    }

    fn concept_node(&self, id: &str, level: u32) -> ViewNode {
        let label = self
            .ontology
            .concept(id)
            .map_or_else(|| id.to_string(), |c| c.preferred_label.clone());
        ViewNode {
            id: NodeKind::Concept.node_id(id),
            kind: NodeKind::Concept,
            label,
            level,
        }
    }

    /// Overview: every root theme at level 0, their subthemes and concepts at
    /// level 1. The focus is the first root theme.
    pub fn root_view(&self) -> Result<GraphView> {
        let first = self
            .ontology
            .root_ids()
            .first()
            .ok_or_else(|| Error::not_found("theme", "<root>"))?;
        let mut nodes: Vec<ViewNode> = self.ontology.roots().map(|t| self.theme_node(&t.id, 0)).collect();
        let mut edges = Vec::new();
        for root in self.ontology.roots() {
            let from = NodeKind::Theme.node_id(&root.id);
            for child in &root.child_theme_ids {
                nodes.push(self.theme_node(child, 1));
                edges.push(edge(&from, NodeKind::Theme.node_id(child), None));
            }
            for c in &root.concept_ids {
                nodes.push(self.concept_node(c, 1));
                edges.push(edge(&from, NodeKind::Concept.node_id(c), None));
            }
        }
        Ok(GraphView {
            nodes,
            edges,
            focus: NodeKind::Theme.node_id(first),
        })
    }

    /// Theme focus: parent, subthemes and owned concepts around the theme.
    /// Concept focus: the concept and its documents by pertinence.
    pub fn thematic_view(&self, focus: &str) -> Result<GraphView> {
        if let Some(theme) = self.ontology.theme(focus) {
            let me = NodeKind::Theme.node_id(&theme.id);
            let mut nodes = vec![self.theme_node(&theme.id, 0)];
            let mut edges = Vec::new();
            if let Some(parent) = &theme.parent_id {
                nodes.push(self.theme_node(parent, 1));
                edges.push(edge(&NodeKind::Theme.node_id(parent), me.clone(), None));
            }
            for child in &theme.child_theme_ids {
                nodes.push(self.theme_node(child, 1));
                edges.push(edge(&me, NodeKind::Theme.node_id(child), None));
            }
            for c in &theme.concept_ids {
                nodes.push(self.concept_node(c, 1));
                edges.push(edge(&me, NodeKind::Concept.node_id(c), None));
            }
            return Ok(GraphView {
                nodes,
                edges,
                focus: me,
            });
        }
        if self.ontology.concept(focus).is_some() {
            let me = NodeKind::Concept.node_id(focus);
            let mut nodes = vec![self.concept_node(focus, 0)];
            let mut edges = Vec::new();
            for p in self.inverted.postings(focus) {
                let id = NodeKind::Document.node_id(&p.doc_id);
                nodes.push(ViewNode {
                    id: id.clone(),
                    kind: NodeKind::Document,
                    label: self.title(&p.doc_id),
                    level: 1,
                });
                edges.push(edge(&me, id, Some(format_fixed(p.pertinence, RELEVANCE_DECIMALS))));
            }
            return Ok(GraphView {
                nodes,
                edges,
                focus: me,
            });
        }
        Err(Error::not_found("theme or concept", focus))
    }

    /// Association hypergraph of a concept: neighbors on the first ring,
    /// documents indexed by each pair on the second.
    pub fn connotative_view(&self, concept: &str) -> Result<GraphView> {
        let hg = concept_hypergraph(&self.associations, &self.ontology, concept, self.settings.max_neighbors)?;
        let me = NodeKind::Concept.node_id(concept);
        let mut nodes = vec![self.concept_node(concept, 0)];
        let mut edges = Vec::new();
        for n in &hg.neighbors {
            let nid = NodeKind::Concept.node_id(&n.concept_id);
            nodes.push(self.concept_node(&n.concept_id, 1));
            edges.push(edge(&me, nid.clone(), Some(format_fixed(n.degree, DEGREE_DECIMALS))));
            for d in &n.documents {
                let did = format!("{nid}/{}", NodeKind::Document.node_id(&d.doc_id));
                nodes.push(ViewNode {
                    id: did.clone(),
                    kind: NodeKind::Document,
                    label: self.title(&d.doc_id),
                    level: 2,
                });
                edges.push(edge(
                    &nid,
                    did,
                    Some(format_fixed(d.pair_relevance, RELEVANCE_DECIMALS)),
                ));
            }
        }
        Ok(GraphView {
            nodes,
            edges,
            focus: me,
        })
    }

    /// Documents indexed by a concept, pertinence desc.
    pub fn concept_documents(&self, concept: &str) -> Result<Vec<DocumentHit<S>>> {
        self.ontology.require_concept(concept)?;
        Ok(self
            .inverted
            .postings(concept)
            .iter()
            .map(|p| DocumentHit {
                doc_id: p.doc_id.clone(),
                title: self.title(&p.doc_id),
                score: p.pertinence,
            })
            .collect())
    }

    /// Documents indexed by a concept pair, pair relevance desc.
    pub fn pair_documents(&self, a: &str, b: &str) -> Result<PairDocuments<S>> {
        self.ontology.require_concept(a)?;
        self.ontology.require_concept(b)?;
        let degree = self.associations.association_degree(a, b)?;
        let documents = self
            .associations
            .edge(a, b)
            .map(|e| {
                e.pair_docs
                    .iter()
                    .map(|d| DocumentHit {
                        doc_id: d.doc_id.clone(),
                        title: self.title(&d.doc_id),
                        score: d.pair_relevance,
                    })
                    .collect()
            })
            .unwrap_or_default();
        Ok(PairDocuments {
            concept_a: a.to_string(),
            concept_b: b.to_string(),
            degree,
            documents,
        })
    }

    /// Sum of pertinences of every concept named in the query, plus the title
    /// bonus when all query tokens appear in the title. The bonus only applies
    /// to queries with at least one token outside every concept occurrence, so
    /// a query made of concept names ranks exactly like the postings.
    pub fn precise_search(&self, query: &str) -> Result<Vec<DocumentHit<S>>> {
        if query.trim().is_empty() {
            return Err(Error::InvalidArgument("empty query".into()));
        }
        let tokens = self.annotator.tokens_of(query);
        let occurrences = self.annotator.matcher().occurrences(&tokens);
        let mut covered = vec![false; tokens.len()];
        for &(_, start, len) in &occurrences {
            covered[start..start + len].iter_mut().for_each(|c| *c = true);
        }
        let concepts: BTreeSet<&str> = occurrences.iter().map(|&(id, _, _)| id).collect();
        let mut scores: BTreeMap<&str, S> = BTreeMap::new();
        for c in &concepts {
            for p in self.inverted.postings(c) {
                let slot = scores.entry(p.doc_id.as_str()).or_insert_with(S::zero);
                *slot = *slot + p.pertinence;
            }
        }
        if covered.contains(&false) {
            for r in self.records.values() {
                let title: BTreeSet<String> = self.annotator.tokens_of(&r.title).into_iter().collect();
                if tokens.iter().all(|t| title.contains(t)) {
                    let slot = scores.entry(r.doc_id.as_str()).or_insert_with(S::zero);
                    *slot = *slot + self.settings.title_bonus;
                }
            }
        }
        let mut hits: Vec<DocumentHit<S>> = scores
            .into_iter()
            .filter(|(_, s)| *s > S::zero())
            .map(|(d, score)| DocumentHit {
                doc_id: d.to_string(),
                title: self.title(d),
                score,
            })
            .collect();
        hits.sort_by(|x, y| cmp_desc(x.score, y.score).then_with(|| x.doc_id.cmp(&y.doc_id)));
        Ok(hits)
    }

    /// Top `k` similar documents scoring at least the configured threshold.
    pub fn similar_documents(&self, doc_id: &str, k: usize) -> Result<Vec<DocumentHit<S>>> {
        let tau = self.settings.similarity_threshold;
        let all = self.similarity.similar_documents(doc_id, usize::MAX)?;
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        Ok(all
            .into_iter()
            .filter(|(_, s)| *s >= tau)
            .take(k)
            .map(|(d, score)| DocumentHit {
                title: self.title(&d),
                doc_id: d,
                score,
            })
            .collect())
    }

    pub fn document_detail(&self, doc_id: &str) -> Result<DocumentDetail<S>> {
        let record = self.record(doc_id)?;
        let ann = self.annotation(doc_id)?;
        let summary = build_summary(
            record,
            ann,
            &self.associations,
            &self.ontology,
            self.settings.summary_concepts,
        )?;
        let similar = self.similar_documents(doc_id, self.settings.similar_k)?;
        Ok(DocumentDetail { summary, similar })
    }
}

fn edge(from: &str, to: String, label: Option<String>) -> ViewEdge {
    ViewEdge {
        from: from.to_string(),
        to,
        label,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewKind {
    Thematic,
    Connotative,
    Similarity,
    Search,
    Document,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrailStep {
    pub view: ViewKind,
    pub focus: String,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NavigationTrail {
    pub steps: Vec<TrailStep>,
}

impl NavigationTrail {
    /// Appends, dropping the oldest steps beyond [`TRAIL_CAPACITY`].
    pub fn push(&mut self, step: TrailStep) {
        self.steps.push(step);
        if self.steps.len() > TRAIL_CAPACITY {
            let excess = self.steps.len() - TRAIL_CAPACITY;
            self.steps.drain(..excess);
        }
    }

    /// Where the user is now.
    pub fn current(&self) -> Option<&TrailStep> {
        self.steps.last()
    }
}

/// In-memory trails keyed by client-minted session strings.
#[derive(Debug, Default)]
pub struct TrailStore {
    sessions: Mutex<HashMap<String, NavigationTrail>>,
}

impl TrailStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a step stamped with the current time. An unseen session starts
    /// a new trail.
    pub fn append(&self, session: &str, view: ViewKind, focus: &str) -> Result<NavigationTrail> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        self.append_at(session, view, focus, now)
    }

    pub fn append_at(&self, session: &str, view: ViewKind, focus: &str, timestamp_ms: u64) -> Result<NavigationTrail> {
        if session.is_empty() {
            return Err(Error::InvalidArgument("empty session id".into()));
        }
        let mut sessions = self.sessions.lock().unwrap_or_else(|p| p.into_inner());
        let trail = sessions.entry(session.to_string()).or_default();
        trail.push(TrailStep {
            view,
            focus: focus.to_string(),
            timestamp_ms,
        });
        Ok(trail.clone())
    }

    pub fn read(&self, session: &str) -> Result<NavigationTrail> {
        let sessions = self.sessions.lock().unwrap_or_else(|p| p.into_inner());
        sessions
            .get(session)
            .cloned()
            .ok_or_else(|| Error::not_found("session", session))
    }
}
