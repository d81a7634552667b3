//! Domain ontology: a forest of themes owning subthemes and concepts.
//!
//! The on-disk form is a JSON document:
//!
//! ```json
//! {"themes":  [{"id": "ai", "label": "Artificial Intelligence", "children": [], "concepts": ["mas"]}],
//!  "concepts": [{"id": "mas", "label": "Multi-Agent System", "synonyms": ["MAS"]}]}
//! ```
//!
//! A concept's owning theme is the theme listing it under `concepts`. A
//! subtheme carries `parent_id` and is listed in its parent's `children`; both
//! sides must agree.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::normalize_surface;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub id: String,
    pub preferred_label: String,
    pub synonyms: Vec<String>,
    pub theme_id: String,
}

impl Concept {
    /// Preferred label followed by synonyms.
    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.preferred_label.as_str()).chain(self.synonyms.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theme {
    pub id: String,
    pub label: String,
    pub parent_id: Option<String>,
    pub child_theme_ids: Vec<String>,
    pub concept_ids: Vec<String>,
}

impl Theme {
    pub fn is_root(&self) -> bool {
        self.parent_id.is_none()
    }
}

/// Validated, immutable ontology.
#[derive(Debug, Clone)]
pub struct Ontology {
    themes: Vec<Theme>,
    concepts: Vec<Concept>,
    root_ids: Vec<String>,
    theme_pos: HashMap<String, usize>,
    concept_pos: HashMap<String, usize>,
    surfaces: HashMap<String, usize>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.themes == other.themes && self.concepts == other.concepts && self.root_ids == other.root_ids
    }
}

impl Eq for Ontology {}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThemeEntry {
    id: String,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent_id: Option<String>,
    #[serde(default)]
    children: Vec<String>,
    #[serde(default)]
    concepts: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConceptEntry {
    id: String,
    label: String,
    #[serde(default)]
    synonyms: Vec<String>,
}

/// Wire form of the ontology file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyFile {
    themes: Vec<ThemeEntry>,
    concepts: Vec<ConceptEntry>,
}

/// Parses and validates an ontology document.
pub fn parse_ontology(source: &str) -> Result<Ontology> {
    let file: OntologyFile = serde_json::from_str(source).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ontology::try_from(file)
}

impl TryFrom<OntologyFile> for Ontology {
    type Error = Error;

    fn try_from(file: OntologyFile) -> Result<Self> {
        let mut theme_pos = HashMap::new();
        for (i, t) in file.themes.iter().enumerate() {
            if theme_pos.insert(t.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(t.id.clone()));
            }
            if t.label.trim().is_empty() {
                return Err(Error::Validation(format!("theme `{}` has an empty label", t.id)));
            }
        }
        let mut concept_pos = HashMap::new();
        for (i, c) in file.concepts.iter().enumerate() {
            if theme_pos.contains_key(&c.id) || concept_pos.insert(c.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(c.id.clone()));
            }
            if c.label.trim().is_empty() {
                return Err(Error::Validation(format!("concept `{}` has an empty label", c.id)));
            }
        }

        // Parent/child agreement.
        let mut listed_parent: HashMap<&str, &str> = HashMap::new();
        for t in &file.themes {
            for child in &t.children {
                let Some(&ci) = theme_pos.get(child) else {
                    return Err(Error::DanglingReference {
                        from: t.id.clone(),
                        to: child.clone(),
                    });
                };
                if let Some(prev) = listed_parent.insert(child, &t.id) {
                    return Err(Error::Validation(format!(
                        "theme `{child}` is listed as a child of both `{prev}` and `{}`",
                        t.id
                    )));
                }
                if file.themes[ci].parent_id.as_deref() != Some(t.id.as_str()) {
                    return Err(Error::Validation(format!(
                        "theme `{child}` is listed under `{}` but its parent_id does not name it",
                        t.id
                    )));
                }
            }
        }
        for t in &file.themes {
            if let Some(parent) = &t.parent_id {
                if !theme_pos.contains_key(parent) {
                    return Err(Error::DanglingReference {
                        from: t.id.clone(),
                        to: parent.clone(),
                    });
                }
                if listed_parent.get(t.id.as_str()) != Some(&parent.as_str()) {
                    return Err(Error::Validation(format!(
                        "theme `{}` names parent `{parent}` but is missing from its children",
                        t.id
                    )));
                }
            }
        }
        if let Some(cycle) = find_cycle(&file.themes, &theme_pos) {
            return Err(Error::ThemeCycle(cycle));
        }

        // Concept ownership.
        let mut owner: Vec<Option<String>> = vec![None; file.concepts.len()];
        for t in &file.themes {
            for cid in &t.concepts {
                let Some(&ci) = concept_pos.get(cid) else {
                    return Err(Error::DanglingReference {
                        from: t.id.clone(),
                        to: cid.clone(),
                    });
                };
                if owner[ci].is_some() {
                    return Err(Error::DuplicateId(cid.clone()));
                }
                owner[ci] = Some(t.id.clone());
            }
        }

        let mut concepts = Vec::with_capacity(file.concepts.len());
        let mut surfaces: HashMap<String, usize> = HashMap::new();
        for (i, (c, theme_id)) in file.concepts.into_iter().zip(owner).enumerate() {
            let Some(theme_id) = theme_id else {
                return Err(Error::Validation(format!(
                    "concept `{}` is not owned by any theme",
                    c.id
                )));
            };
            let mut seen = HashSet::new();
            for syn in &c.synonyms {
                let norm = normalize_surface(syn);
                if norm.is_empty() {
                    return Err(Error::Validation(format!("concept `{}` has an empty synonym", c.id)));
                }
                if !seen.insert(norm) {
                    return Err(Error::Validation(format!(
                        "concept `{}` has duplicate synonym `{syn}`",
                        c.id
                    )));
                }
            }
            let concept = Concept {
                id: c.id,
                preferred_label: c.label,
                synonyms: c.synonyms,
                theme_id,
            };
            for surface in concept.surfaces() {
                let norm = normalize_surface(surface);
                match surfaces.get(&norm) {
                    Some(&j) if j != i => {
                        return Err(Error::AmbiguousSurface {
                            surface: norm,
                            first: concepts_id(&concepts, j),
                            second: concept.id.clone(),
                        })
                    }
                    _ => {
                        surfaces.insert(norm, i);
                    }
                }
            }
            concepts.push(concept);
        }

        let themes: Vec<Theme> = file
            .themes
            .into_iter()
            .map(|t| Theme {
                id: t.id,
                label: t.label,
                parent_id: t.parent_id,
                child_theme_ids: t.children,
                concept_ids: t.concepts,
            })
            .collect();
        let root_ids = themes.iter().filter(|t| t.is_root()).map(|t| t.id.clone()).collect();

        Ok(Ontology {
            themes,
            concepts,
            root_ids,
            theme_pos,
            concept_pos,
            surfaces,
        })
    }
}

fn concepts_id(concepts: &[Concept], i: usize) -> String {
    concepts[i].id.clone()
}

/// Walks parent links from every theme; returns the first cycle found.
fn find_cycle(themes: &[ThemeEntry], pos: &HashMap<String, usize>) -> Option<Vec<String>> {
    // 0 = unvisited, 1 = on current walk, 2 = known acyclic
    let mut state = vec![0u8; themes.len()];
    for start in 0..themes.len() {
        let mut walk: Vec<usize> = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            match state[i] {
                2 => break,
                1 => {
                    let at = walk.iter().position(|&w| w == i).unwrap_or(0);
                    let mut cycle: Vec<String> = walk[at..].iter().map(|&w| themes[w].id.clone()).collect();
                    cycle.push(themes[i].id.clone());
                    return Some(cycle);
                }
                _ => {
                    state[i] = 1;
                    walk.push(i);
                    cur = themes[i].parent_id.as_ref().and_then(|p| pos.get(p).copied());
                }
            }
        }
        for w in walk {
            state[w] = 2;
        }
    }
    None
}

impl From<&Ontology> for OntologyFile {
    fn from(o: &Ontology) -> Self {
        OntologyFile {
            themes: o
                .themes
                .iter()
                .map(|t| ThemeEntry {
                    id: t.id.clone(),
                    label: t.label.clone(),
                    parent_id: t.parent_id.clone(),
                    children: t.child_theme_ids.clone(),
                    concepts: t.concept_ids.clone(),
                })
                .collect(),
            concepts: o
                .concepts
                .iter()
                .map(|c| ConceptEntry {
                    id: c.id.clone(),
                    label: c.preferred_label.clone(),
                    synonyms: c.synonyms.clone(),
                })
                .collect(),
        }
    }
}

impl Serialize for Ontology {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OntologyFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Ontology {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = OntologyFile::deserialize(deserializer)?;
        Ontology::try_from(file).map_err(serde::de::Error::custom)
    }
}

impl Ontology {
    /// Writes the ontology back into its file form.
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&OntologyFile::from(self)).expect("ontology serializes")
    }

    pub fn themes(&self) -> &[Theme] {
        &self.themes
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn root_ids(&self) -> &[String] {
        &self.root_ids
    }

    pub fn roots(&self) -> impl Iterator<Item = &Theme> {
        self.root_ids.iter().map(|id| &self.themes[self.theme_pos[id]])
    }

    pub fn theme(&self, id: &str) -> Option<&Theme> {
        self.theme_pos.get(id).map(|&i| &self.themes[i])
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concept_pos.get(id).map(|&i| &self.concepts[i])
    }

    pub fn require_theme(&self, id: &str) -> Result<&Theme> {
        self.theme(id).ok_or_else(|| Error::not_found("theme", id))
    }

    pub fn require_concept(&self, id: &str) -> Result<&Concept> {
        self.concept(id).ok_or_else(|| Error::not_found("concept", id))
    }

    /// Concepts owned by a theme; with `recursive`, a depth-first walk over
    /// the whole subtree (own concepts before those of subthemes).
    pub fn concepts_of_theme(&self, theme_id: &str, recursive: bool) -> Result<Vec<&Concept>> {
        let theme = self.require_theme(theme_id)?;
        let mut out = Vec::new();
        self.collect_concepts(theme, recursive, &mut out);
        Ok(out)
    }

    fn collect_concepts<'a>(&'a self, theme: &'a Theme, recursive: bool, out: &mut Vec<&'a Concept>) {
        out.extend(theme.concept_ids.iter().map(|c| &self.concepts[self.concept_pos[c]]));
        if recursive {
            for child in &theme.child_theme_ids {
                self.collect_concepts(&self.themes[self.theme_pos[child]], true, out);
            }
        }
    }

    /// Exact match on the preferred label or a synonym after case folding and
    /// whitespace normalization.
    pub fn lookup_concept(&self, surface: &str) -> Option<&Concept> {
        self.surfaces
            .get(&normalize_surface(surface))
            .map(|&i| &self.concepts[i])
    }

    /// Theme chain from `theme_id` up to its root, inclusive on both ends.
    pub fn path_to_root(&self, theme_id: &str) -> Result<Vec<&Theme>> {
        let mut out = vec![self.require_theme(theme_id)?];
        while let Some(parent) = out.last().and_then(|t| t.parent_id.as_deref()) {
            out.push(&self.themes[self.theme_pos[parent]]);
        }
        Ok(out)
    }

    pub fn root_of(&self, theme_id: &str) -> Result<&Theme> {
        Ok(self.path_to_root(theme_id)?.pop().expect("path is non-empty"))
    }
}
