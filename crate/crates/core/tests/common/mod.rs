//! Seed fixture loading and brute-force reference implementations.
//!
//! The reference code works from plain data (token lists, concept labels,
//! annotation sets) and never calls the matcher, indexes or scorers it is
//! compared against.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use atlas_core::corpus::load_corpus;
use atlas_core::{AnnotationSet, Atlas, DocumentRecord, Ontology, Stopwords};

pub fn seed_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/seed"))
}

pub fn seed_ontology() -> Ontology {
    let text = std::fs::read_to_string(seed_dir().join("ontology.json")).unwrap();
    atlas_core::parse_ontology(&text).unwrap()
}

pub fn seed_records() -> Vec<DocumentRecord> {
    load_corpus(&seed_dir().join("corpus")).unwrap()
}

pub fn seed_atlas() -> Atlas {
    Atlas::build(seed_ontology(), seed_records(), Stopwords::english()).unwrap()
}

/// Lowercased alphanumeric runs with stopwords dropped.
pub fn tokens(text: &str, stopwords: &Stopwords) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() {
            cur.push(c.to_lowercase().next().unwrap());
        } else if !cur.is_empty() {
            let word = std::mem::take(&mut cur);
            if !stopwords.contains(&word) {
                out.push(word);
            }
        }
    }
    out
}

pub fn document_tokens(record: &DocumentRecord, stopwords: &Stopwords) -> Vec<String> {
    let mut out = tokens(&record.body, stopwords);
    out.extend(tokens(&record.title, stopwords));
    if let Some(a) = &record.abstract_text {
        out.extend(tokens(a, stopwords));
    }
    for k in &record.keywords {
        out.extend(tokens(k, stopwords));
    }
    out
}

/// Every (token sequence, concept id) pair from labels and synonyms.
pub fn surface_sequences(ont: &Ontology, stopwords: &Stopwords) -> Vec<(Vec<String>, String)> {
    let mut out = Vec::new();
    for c in ont.concepts() {
        for s in std::iter::once(&c.preferred_label).chain(&c.synonyms) {
            let seq = tokens(s, stopwords);
            if !seq.is_empty() {
                out.push((seq, c.id.clone()));
            }
        }
    }
    out
}

/// Left to right, take the longest surface starting here, skip past it.
pub fn greedy_counts(toks: &[String], seqs: &[(Vec<String>, String)]) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    let mut i = 0;
    while i < toks.len() {
        let best = seqs
            .iter()
            .filter(|(seq, _)| toks[i..].starts_with(seq))
            .max_by_key(|(seq, _)| seq.len());
        match best {
            Some((seq, id)) => {
                *counts.entry(id.clone()).or_insert(0) += 1;
                i += seq.len();
            }
            None => i += 1,
        }
    }
    counts
}

pub fn pertinences(counts: &BTreeMap<String, u32>) -> BTreeMap<String, f64> {
    let max = counts.values().copied().max().unwrap_or(0);
    counts
        .iter()
        .map(|(c, &f)| (c.clone(), f as f64 / max as f64))
        .collect()
}

fn root_theme(ont: &Ontology, concept: &str) -> String {
    let mut theme = ont.concept(concept).unwrap().theme_id.clone();
    while let Some(parent) = ont.theme(&theme).unwrap().parent_id.clone() {
        theme = parent;
    }
    theme
}

pub fn root_weights(ont: &Ontology, pert: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    for (c, p) in pert {
        *sums.entry(root_theme(ont, c)).or_default() += p;
    }
    let total: f64 = sums.values().sum();
    sums.into_iter().map(|(t, w)| (t, w / total)).collect()
}

pub fn posting_sets(anns: &[&AnnotationSet]) -> BTreeMap<String, BTreeSet<String>> {
    let mut sets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for a in anns {
        for c in &a.concepts {
            sets.entry(c.concept_id.clone()).or_default().insert(a.doc_id.clone());
        }
    }
    sets
}

/// (a, b) with a < b -> (intersection / union, intersection) for every pair
/// sharing at least one document.
pub fn jaccard_pairs(anns: &[&AnnotationSet]) -> BTreeMap<(String, String), (f64, BTreeSet<String>)> {
    let sets = posting_sets(anns);
    let ids: Vec<&String> = sets.keys().collect();
    let mut out = BTreeMap::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let inter: BTreeSet<String> = sets[*a].intersection(&sets[*b]).cloned().collect();
            if inter.is_empty() {
                continue;
            }
            let union = sets[*a].union(&sets[*b]).count();
            out.insert(((*a).clone(), (*b).clone()), (inter.len() as f64 / union as f64, inter));
        }
    }
    out
}

/// Dense cosine over the union of concept ids.
pub fn cosine(a: &AnnotationSet, b: &AnnotationSet) -> f64 {
    let va: BTreeMap<&str, f64> = a
        .concepts
        .iter()
        .map(|c| (c.concept_id.as_str(), c.pertinence))
        .collect();
    let vb: BTreeMap<&str, f64> = b
        .concepts
        .iter()
        .map(|c| (c.concept_id.as_str(), c.pertinence))
        .collect();
    let keys: BTreeSet<&str> = va.keys().chain(vb.keys()).copied().collect();
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for k in keys {
        let x = va.get(k).copied().unwrap_or(0.0);
        let y = vb.get(k).copied().unwrap_or(0.0);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Top `k` neighbors of `doc` with cosine >= tau and > 0.
pub fn similar(anns: &[&AnnotationSet], doc: &str, tau: f64, k: usize) -> Vec<(String, f64)> {
    let me = anns.iter().find(|a| a.doc_id == doc).unwrap();
    let mut out: Vec<(String, f64)> = anns
        .iter()
        .filter(|a| a.doc_id != doc)
        .map(|a| (a.doc_id.clone(), cosine(me, a)))
        .filter(|(_, s)| *s > 0.0 && *s >= tau)
        .collect();
    out.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    out.truncate(k);
    out
}

/// Scores every document against the query by scanning all label and
/// synonym windows.
pub fn search(atlas: &Atlas, query: &str, bonus: f64) -> Vec<(String, f64)> {
    let stop = atlas.stopwords();
    let q = tokens(query, stop);
    let mut named = BTreeSet::new();
    let mut covered = vec![false; q.len()];
    for (seq, id) in surface_sequences(atlas.ontology(), stop) {
        for start in 0..q.len() {
            if q[start..].starts_with(&seq) {
                named.insert(id.clone());
                covered[start..start + seq.len()].fill(true);
            }
        }
    }
    // The title bonus needs a query word that names no concept.
    let title_words = covered.iter().any(|c| !c);
    let mut out = Vec::new();
    for r in atlas.records() {
        let ann = atlas.annotation(&r.doc_id).unwrap();
        let mut score = 0.0;
        for c in &named {
            if let Some(p) = ann.concepts.iter().find(|x| &x.concept_id == c) {
                score += p.pertinence;
            }
        }
        let title = tokens(&r.title, stop);
        if title_words && q.iter().all(|t| title.contains(t)) {
            score += bonus;
        }
        if score > 0.0 {
            out.push((r.doc_id.clone(), score));
        }
    }
    out.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    out
}

pub const SCRIPTED_QUERIES: [&str; 20] = [
    "mobile agents",
    "Multi-Agent System",
    "MAS",
    "security for mobile agents",
    "encryption",
    "cipher and digital signatures",
    "firewall intrusion detection",
    "intrusion detection systems",
    "authentication of mobile agents",
    "expert systems",
    "semantic networks and ontologies",
    "ontology driven information retrieval",
    "search engine",
    "databases",
    "encrypting databases",
    "securing mobile agents",
    "agents",
    "gardening tomatoes",
    "the of and",
    "MULTI-AGENT SYSTEMS authenticate",
];
