//! Conceptual and thematic annotation of documents.
//!
//! Concepts are detected by greedy longest match of their label and synonym
//! token sequences. A concept's pertinence in a document is its frequency
//! divided by the highest concept frequency in that document. Theme weights
//! roll concept pertinences up to root themes and normalize to one.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::association::AssociationIndex;
use crate::corpus::{tokenize, tokenize_text, DocumentRecord, Stopwords, TokenStream};
use crate::error::{Error, Result};
use crate::ontology::Ontology;
use crate::scalar::{cmp_desc, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptAnnotation<S> {
    pub concept_id: String,
    pub frequency: u32,
    pub pertinence: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThemeWeight<S> {
    pub theme_id: String,
    pub weight: S,
}

/// Major theme, ordered minor themes and the full weight table of a document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThematicComposition<S> {
    pub major_theme: Option<String>,
    pub minor_themes: Vec<String>,
    pub theme_weights: Vec<ThemeWeight<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet<S> {
    pub doc_id: String,
    pub concepts: Vec<ConceptAnnotation<S>>,
    pub major_theme: Option<String>,
    pub minor_themes: Vec<String>,
    pub theme_weights: Vec<ThemeWeight<S>>,
}

impl<S: Scalar> AnnotationSet<S> {
    pub fn pertinence_of(&self, concept_id: &str) -> Option<S> {
        self.concepts
            .iter()
            .find(|c| c.concept_id == concept_id)
            .map(|c| c.pertinence)
    }

    pub fn is_annotated(&self) -> bool {
        !self.concepts.is_empty()
    }
}

/// Label/synonym token sequences indexed by their first token.
#[derive(Debug, Clone)]
pub struct ConceptMatcher {
    // first token -> (sequence, concept id), longest sequences first
    by_first: HashMap<String, Vec<(Vec<String>, String)>>,
}

impl ConceptMatcher {
    /// Tokenizes every surface with the same stopword list used for documents.
    /// Two concepts producing the same token sequence is an ambiguity error.
    pub fn new(ontology: &Ontology, stopwords: &Stopwords) -> Result<Self> {
        let mut owner: HashMap<Vec<String>, (String, String)> = HashMap::new();
        for concept in ontology.concepts() {
            for surface in concept.surfaces() {
                let seq: Vec<String> = tokenize_text(surface, stopwords)
                    .into_iter()
                    .map(|t| t.surface)
                    .collect();
                if seq.is_empty() {
                    continue;
                }
                match owner.get(&seq) {
                    Some((other, first_surface)) if *other != concept.id => {
                        return Err(Error::AmbiguousSurface {
                            surface: format!("{first_surface} / {surface}"),
                            first: other.clone(),
                            second: concept.id.clone(),
                        });
                    }
                    Some(_) => {}
                    None => {
                        owner.insert(seq, (concept.id.clone(), surface.to_string()));
                    }
                }
            }
        }
        let mut by_first: HashMap<String, Vec<(Vec<String>, String)>> = HashMap::new();
        for (seq, (id, _)) in owner {
            by_first.entry(seq[0].clone()).or_default().push((seq, id));
        }
        for entries in by_first.values_mut() {
            entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        }
        Ok(ConceptMatcher { by_first })
    }

    /// Longest sequence starting at `tokens[0]`: `(concept id, length)`.
    pub fn longest_match<'a, T: AsRef<str>>(&'a self, tokens: &[T]) -> Option<(&'a str, usize)> {
        let first = tokens.first()?.as_ref();
        self.by_first.get(first)?.iter().find_map(|(seq, id)| {
            let fits = seq.len() <= tokens.len() && seq.iter().zip(tokens).all(|(a, b)| a == b.as_ref());
            fits.then_some((id.as_str(), seq.len()))
        })
    }

    /// Greedy, non-overlapping scan counting concept occurrences.
    pub fn count<T: AsRef<str>>(&self, tokens: &[T]) -> BTreeMap<String, u32> {
        let mut freqs = BTreeMap::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_match(&tokens[i..]) {
                Some((id, len)) => {
                    *freqs.entry(id.to_string()).or_insert(0) += 1;
                    i += len;
                }
                None => i += 1,
            }
        }
        freqs
    }

    /// Every `(concept id, start, length)` occurrence in `tokens`, overlaps
    /// included, ordered by start.
    pub fn occurrences<T: AsRef<str>>(&self, tokens: &[T]) -> Vec<(&str, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..tokens.len() {
            let Some(entries) = self.by_first.get(tokens[i].as_ref()) else {
                continue;
            };
            for (seq, id) in entries {
                if seq.len() <= tokens.len() - i && seq.iter().zip(&tokens[i..]).all(|(a, b)| a == b.as_ref()) {
                    out.push((id.as_str(), i, seq.len()));
                }
            }
        }
        out
    }

    /// Distinct concepts whose sequence occurs anywhere in `tokens`.
    pub fn occurring<T: AsRef<str>>(&self, tokens: &[T]) -> BTreeSet<String> {
        self.occurrences(tokens)
            .into_iter()
            .map(|(id, _, _)| id.to_string())
            .collect()
    }
}

/// Pertinence = frequency / max frequency, sorted by pertinence desc then id.
pub fn pertinences_from_frequencies<S: Scalar>(
    freqs: impl IntoIterator<Item = (String, u32)>,
) -> Vec<ConceptAnnotation<S>> {
    let freqs: Vec<(String, u32)> = freqs.into_iter().filter(|(_, f)| *f > 0).collect();
    let Some(max) = freqs.iter().map(|(_, f)| *f).max() else {
        return Vec::new();
    };
    let max = S::from_count(max as usize);
    let mut out: Vec<ConceptAnnotation<S>> = freqs
        .into_iter()
        .map(|(concept_id, frequency)| ConceptAnnotation {
            pertinence: S::from_count(frequency as usize) / max,
            concept_id,
            frequency,
        })
        .collect();
    out.sort_by(|a, b| cmp_desc(a.pertinence, b.pertinence).then_with(|| a.concept_id.cmp(&b.concept_id)));
    out
}

pub fn annotate_concepts<S: Scalar>(stream: &TokenStream, matcher: &ConceptMatcher) -> Vec<ConceptAnnotation<S>> {
    let tokens: Vec<&str> = stream.surfaces().collect();
    pertinences_from_frequencies(matcher.count(&tokens))
}

/// Rolls pertinences up to root themes. Concepts unknown to the ontology are
/// ignored.
pub fn annotate_themes<S: Scalar>(concepts: &[ConceptAnnotation<S>], ont: &Ontology) -> ThematicComposition<S> {
    let mut totals: BTreeMap<&str, S> = BTreeMap::new();
    for c in concepts {
        let Some(concept) = ont.concept(&c.concept_id) else {
            continue;
        };
        let root = ont.root_of(&concept.theme_id).expect("validated ontology");
        let slot = totals.entry(root.id.as_str()).or_insert_with(S::zero);
        *slot = *slot + c.pertinence;
    }
    let total = totals.values().fold(S::zero(), |acc, &w| acc + w);
    if totals.is_empty() || total <= S::zero() {
        return ThematicComposition {
            major_theme: None,
            minor_themes: Vec::new(),
            theme_weights: Vec::new(),
        };
    }
    let mut weights: Vec<ThemeWeight<S>> = totals
        .into_iter()
        .map(|(id, w)| ThemeWeight {
            theme_id: id.to_string(),
            weight: w / total,
        })
        .collect();
    weights.sort_by(|a, b| cmp_desc(a.weight, b.weight).then_with(|| a.theme_id.cmp(&b.theme_id)));
    let major_theme = weights.first().map(|w| w.theme_id.clone());
    let minor_themes = weights
        .iter()
        .skip(1)
        .filter(|w| w.weight > S::zero())
        .map(|w| w.theme_id.clone())
        .collect();
    ThematicComposition {
        major_theme,
        minor_themes,
        theme_weights: weights,
    }
}

/// Bundles concept annotations with their thematic composition.
pub fn annotation_set<S: Scalar>(
    doc_id: impl Into<String>,
    concepts: Vec<ConceptAnnotation<S>>,
    ont: &Ontology,
) -> AnnotationSet<S> {
    let themes = annotate_themes(&concepts, ont);
    AnnotationSet {
        doc_id: doc_id.into(),
        concepts,
        major_theme: themes.major_theme,
        minor_themes: themes.minor_themes,
        theme_weights: themes.theme_weights,
    }
}

/// Tokenizer configuration plus compiled matcher.
#[derive(Debug, Clone)]
pub struct Annotator {
    stopwords: Stopwords,
    matcher: ConceptMatcher,
}

impl Annotator {
    pub fn new(ontology: &Ontology, stopwords: Stopwords) -> Result<Self> {
        let matcher = ConceptMatcher::new(ontology, &stopwords)?;
        Ok(Annotator { stopwords, matcher })
    }

    pub fn stopwords(&self) -> &Stopwords {
        &self.stopwords
    }

    pub fn matcher(&self) -> &ConceptMatcher {
        &self.matcher
    }

    pub fn tokenize(&self, record: &DocumentRecord) -> TokenStream {
        tokenize(record, &self.stopwords)
    }

    /// Case-folded, stopword-free tokens of free text (queries, titles).
    pub fn tokens_of(&self, text: &str) -> Vec<String> {
        tokenize_text(text, &self.stopwords)
            .into_iter()
            .map(|t| t.surface)
            .collect()
    }

    pub fn annotate<S: Scalar>(&self, record: &DocumentRecord, ont: &Ontology) -> AnnotationSet<S> {
        let stream = self.tokenize(record);
        annotation_set(record.doc_id.clone(), annotate_concepts(&stream, &self.matcher), ont)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveAnnotations {
    pub doc_id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub date: Option<NaiveDate>,
    pub format: String,
    pub size_bytes: u64,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub keywords: Vec<String>,
}

impl From<&DocumentRecord> for DescriptiveAnnotations {
    fn from(r: &DocumentRecord) -> Self {
        DescriptiveAnnotations {
            doc_id: r.doc_id.clone(),
            title: r.title.clone(),
            authors: r.authors.clone(),
            date: r.pub_date,
            format: r.format.clone(),
            size_bytes: r.size_bytes,
            abstract_text: r.abstract_text.clone(),
            keywords: r.keywords.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyConcept<S> {
    pub concept_id: String,
    pub label: String,
    pub frequency: u32,
    pub pertinence: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThemeRole {
    Major,
    Minor,
}

/// One row of the thematic block. `display_label` is "Root: Subtheme" when one
/// subtheme dominates the document's concepts under that root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThemeShare<S> {
    pub role: ThemeRole,
    pub theme_id: String,
    pub label: String,
    pub display_label: String,
    pub weight: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooccurrenceEdge<S> {
    pub concept_a: String,
    pub concept_b: String,
    pub degree: S,
}

/// Semantic summary of a document: descriptive block, key concepts, the
/// cooccurrence sub-hypergraph over its concepts and its thematic composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentSummary<S> {
    pub descriptive: DescriptiveAnnotations,
    pub key_concepts: Vec<KeyConcept<S>>,
    pub cooccurrence: Vec<CooccurrenceEdge<S>>,
    pub thematic: Vec<ThemeShare<S>>,
}

pub const DEFAULT_SUMMARY_CONCEPTS: usize = 10;

pub fn build_summary<S: Scalar>(
    record: &DocumentRecord,
    ann: &AnnotationSet<S>,
    assoc: &AssociationIndex<S>,
    ont: &Ontology,
    top_k: usize,
) -> Result<DocumentSummary<S>> {
    if record.doc_id != ann.doc_id {
        return Err(Error::Contract(format!(
            "annotations for `{}` passed with record `{}`",
            ann.doc_id, record.doc_id
        )));
    }
    let key_concepts = ann
        .concepts
        .iter()
        .take(top_k)
        .map(|c| KeyConcept {
            concept_id: c.concept_id.clone(),
            label: ont
                .concept(&c.concept_id)
                .map(|k| k.preferred_label.clone())
                .unwrap_or_else(|| c.concept_id.clone()),
            frequency: c.frequency,
            pertinence: c.pertinence,
        })
        .collect();

    let own: BTreeSet<&str> = ann.concepts.iter().map(|c| c.concept_id.as_str()).collect();
    let mut cooccurrence = Vec::new();
    for (i, a) in own.iter().enumerate() {
        for b in own.iter().skip(i + 1) {
            if let Some(edge) = assoc.edge(a, b) {
                cooccurrence.push(CooccurrenceEdge {
                    concept_a: edge.concept_a.clone(),
                    concept_b: edge.concept_b.clone(),
                    degree: edge.degree,
                });
            }
        }
    }

    let mut thematic = Vec::new();
    let roles = ann
        .major_theme
        .iter()
        .map(|t| (t, ThemeRole::Major))
        .chain(ann.minor_themes.iter().map(|t| (t, ThemeRole::Minor)));
    for (theme_id, role) in roles {
        let Some(theme) = ont.theme(theme_id) else {
            continue;
        };
        let weight = ann
            .theme_weights
            .iter()
            .find(|w| &w.theme_id == theme_id)
            .map_or(S::zero(), |w| w.weight);
        let display_label = match dominant_subtheme(ann, ont, theme_id) {
            Some(sub) => format!("{}: {}", theme.label, sub),
            None => theme.label.clone(),
        };
        thematic.push(ThemeShare {
            role,
            theme_id: theme_id.clone(),
            label: theme.label.clone(),
            display_label,
            weight,
        });
    }

    Ok(DocumentSummary {
        descriptive: record.into(),
        key_concepts,
        cooccurrence,
        thematic,
    })
}

/// Label of the direct child of `root_id` carrying the most pertinence among
/// the document's concepts. Ties go to the smaller theme id.
fn dominant_subtheme<S: Scalar>(ann: &AnnotationSet<S>, ont: &Ontology, root_id: &str) -> Option<String> {
    let mut acc: BTreeMap<&str, S> = BTreeMap::new();
    for c in &ann.concepts {
        let Some(concept) = ont.concept(&c.concept_id) else {
            continue;
        };
        let Ok(path) = ont.path_to_root(&concept.theme_id) else {
            continue;
        };
        if path.len() < 2 || path[path.len() - 1].id != root_id {
            continue;
        }
        let sub = path[path.len() - 2];
        let slot = acc.entry(sub.id.as_str()).or_insert_with(S::zero);
        *slot = *slot + c.pertinence;
    }
    let (best, _) = acc
        .into_iter()
        .fold(None, |best: Option<(&str, S)>, (id, w)| match best {
            Some((_, bw)) if bw >= w => best,
            _ => Some((id, w)),
        })?;
    ont.theme(best).map(|t| t.label.clone())
}
