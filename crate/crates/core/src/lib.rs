//! Ontology-guided navigation over an annotated text corpus.
//!
//! Documents are annotated against a domain ontology (descriptive,
//! conceptual and thematic annotations). From those annotations the crate
//! builds an inverted index, a concept cooccurrence network with
//! pair-indexed documents, and a document similarity graph. [`Atlas`] answers
//! three kinds of search over them: precise (ranked keyword search), thematic
//! (drill-down through the theme hierarchy) and connotative (association
//! hypergraphs and similar documents). Every graph answer is a
//! [`navigation::GraphView`] that [`layout`] can place radially and distort
//! with a fisheye lens around its focus.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod annotator;
pub mod association;
pub mod corpus;
pub mod error;
pub mod layout;
pub mod navigation;
pub mod ontology;
pub mod pipeline;
pub mod scalar;
pub mod similarity;
pub mod snapshot;
pub mod text;

pub use corpus::{DocumentRecord, Stopwords, TokenStream};
pub use error::{Error, Result};
pub use navigation::{GraphView, NavigationTrail, NodeKind, TrailStore, ViewKind};
pub use ontology::{parse_ontology, Concept, Ontology, Theme};
pub use scalar::Scalar;

pub type Atlas = navigation::Atlas<f64>;
pub type Settings = navigation::Settings<f64>;
pub type AnnotationSet = annotator::AnnotationSet<f64>;
pub type ConceptAnnotation = annotator::ConceptAnnotation<f64>;
pub type ThemeWeight = annotator::ThemeWeight<f64>;
pub type DocumentSummary = annotator::DocumentSummary<f64>;
pub type DocumentDetail = navigation::DocumentDetail<f64>;
pub type DocumentHit = navigation::DocumentHit<f64>;
pub type InvertedIndex = association::InvertedIndex<f64>;
pub type AssociationEdge = association::AssociationEdge<f64>;
pub type AssociationIndex = association::AssociationIndex<f64>;
pub type HypergraphView = association::HypergraphView<f64>;
pub type SimilarityGraph = similarity::SimilarityGraph<f64>;
pub type LayoutPoint = layout::LayoutPoint<f64>;
pub type LaidOutView = layout::LaidOutView<f64>;
pub type Snapshot = snapshot::Snapshot<f64>;
