//! Document loading, descriptive annotations and tokenization.
//!
//! A document is a UTF-8 text file with an optional header block:
//!
//! ```text
//! title: Securing Mobile Agents
//! authors: A. Author; B. Author
//! date: 2009-04-01
//! abstract: One paragraph.
//! keywords: agents, security
//!
//! Body text starts after the first blank line.
//! ```
//!
//! The header is recognized only when the very first line starts with one of
//! the known keys.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::text::{fold, split_tokens};

const HEADER_KEYS: [&str; 5] = ["title", "authors", "date", "abstract", "keywords"];

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords-en.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub pub_date: Option<NaiveDate>,
    pub format: String,
    pub size_bytes: u64,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub keywords: Vec<String>,
    pub body: String,
}

impl DocumentRecord {
    /// Body, title, abstract and keywords joined by newlines; the text that
    /// token offsets point into.
    pub fn indexed_text(&self) -> String {
        let mut s = String::with_capacity(self.body.len() + self.title.len() + 64);
        s.push_str(&self.body);
        s.push('\n');
        s.push_str(&self.title);
        s.push('\n');
        if let Some(a) = &self.abstract_text {
            s.push_str(a);
        }
        s.push('\n');
        s.push_str(&self.keywords.join(", "));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub char_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub doc_id: String,
    pub tokens: Vec<Token>,
}

impl TokenStream {
    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Case-folded stopword list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One word per line; blank lines and `#` comments ignored.
    pub fn parse(source: &str) -> Self {
        Stopwords(
            source
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(fold)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let source = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&source))
    }

    /// English list shipped with the crate.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn contains(&self, folded: &str) -> bool {
        self.0.contains(folded)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sorted(&self) -> Vec<String> {
        self.0.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }
}

impl FromIterator<String> for Stopwords {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|w| fold(&w)).collect())
    }
}

impl Serialize for Stopwords {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.sorted().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Stopwords {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Vec::<String>::deserialize(deserializer)?.into_iter().collect())
    }
}

/// Splits arbitrary text the same way documents are tokenized.
pub fn tokenize_text(text: &str, stopwords: &Stopwords) -> Vec<Token> {
    split_tokens(text)
        .into_iter()
        .filter(|(s, _)| !stopwords.contains(s))
        .map(|(surface, char_offset)| Token { surface, char_offset })
        .collect()
}

pub fn tokenize(record: &DocumentRecord, stopwords: &Stopwords) -> TokenStream {
    TokenStream {
        doc_id: record.doc_id.clone(),
        tokens: tokenize_text(&record.indexed_text(), stopwords),
    }
}

/// Reads a single document; its id is the file name.
pub fn parse_document(path: &Path) -> Result<DocumentRecord> {
    let doc_id = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_document(path, doc_id)
}

fn read_document(path: &Path, doc_id: String) -> Result<DocumentRecord> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let size_bytes = bytes.len() as u64;
    let text = String::from_utf8(bytes).map_err(|_| Error::Encoding { path: path.into() })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let format = path
        .extension()
        .map(|s| s.to_string_lossy().to_lowercase())
        .unwrap_or_else(|| "txt".to_string());
    parse_document_text(&text, doc_id, &stem, format, size_bytes).map_err(|(line, message)| Error::Format {
        path: path.into(),
        line,
        message,
    })
}

/// Header/body split. Errors carry the 1-based header line.
fn parse_document_text(
    text: &str,
    doc_id: String,
    stem: &str,
    format: String,
    size_bytes: u64,
) -> std::result::Result<DocumentRecord, (usize, String)> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut record = DocumentRecord {
        doc_id,
        title: stem.to_string(),
        authors: Vec::new(),
        pub_date: None,
        format,
        size_bytes,
        abstract_text: None,
        keywords: Vec::new(),
        body: String::new(),
    };

    let first_key = text.lines().next().and_then(|l| header_key(l));
    if first_key.is_none() {
        record.body = text.to_string();
        return Ok(record);
    }

    let mut seen: HashSet<&str> = HashSet::new();
    let mut offset = 0;
    let mut line_no = 0;
    for raw in text.split_inclusive('\n') {
        offset += raw.len();
        line_no += 1;
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            break;
        }
        let Some(key) = header_key(line) else {
            return Err((line_no, format!("malformed header line `{line}`")));
        };
        if !seen.insert(key) {
            return Err((line_no, format!("duplicate header key `{key}`")));
        }
        let value = line[key.len() + 1..].trim();
        match key {
            "title" => {
                if value.is_empty() {
                    return Err((line_no, "empty title".into()));
                }
                record.title = value.to_string();
            }
            "authors" => record.authors = split_list(value, ';'),
            "date" => {
                let date = NaiveDate::parse_from_str(value, "%Y-%m-%d")
                    .map_err(|e| (line_no, format!("invalid date `{value}`: {e}")))?;
                record.pub_date = Some(date);
            }
            "abstract" => record.abstract_text = Some(value.to_string()),
            "keywords" => record.keywords = split_list(value, ','),
            _ => unreachable!("header_key only yields known keys"),
        }
    }
    record.body = text[offset.min(text.len())..].to_string();
    Ok(record)
}

fn header_key(line: &str) -> Option<&'static str> {
    let (key, _) = line.split_once(':')?;
    HEADER_KEYS.iter().copied().find(|k| *k == key)
}

fn split_list(value: &str, sep: char) -> Vec<String> {
    value
        .split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Loads every `*.txt` file under `root`, recursively. Document ids are
/// `/`-separated paths relative to `root`; records come back sorted by id.
pub fn load_corpus(root: &Path) -> Result<Vec<DocumentRecord>> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "corpus directory not found"),
        ));
    }
    let mut records = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "txt") {
            continue;
        }
        let rel = path.strip_prefix(root).expect("walkdir yields children of root");
        let doc_id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        records.push(read_document(path, doc_id)?);
    }
    records.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).unwrap();
        }
        fs::write(&p, content).unwrap();
        p
    }

    fn record_with_body(body: &str) -> DocumentRecord {
        parse_document_text(body, "d".into(), "d", "txt".into(), body.len() as u64).unwrap()
    }

    fn surfaces(ts: &TokenStream) -> Vec<&str> {
        ts.surfaces().collect()
    }

    #[test]
    fn header_title_is_used() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.txt", "title: Securing Mobile Agents\n\nBody here.\n");
        let r = parse_document(&p).unwrap();
        assert_eq!(r.title, "Securing Mobile Agents");
        assert_eq!(r.body, "Body here.\n");
        assert_eq!(r.size_bytes, fs::metadata(&p).unwrap().len());
    }

    #[test]
    fn headerless_file_defaults_title_to_stem() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "notes.txt", "hello");
        let r = parse_document(&p).unwrap();
        assert_eq!(r.title, "notes");
        assert_eq!(r.body, "hello");
        assert!(r.authors.is_empty());
        assert_eq!(r.format, "txt");
    }

    #[test]
    fn duplicate_header_key_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.txt", "title: One\ntitle: Two\n\nbody");
        match parse_document(&p).unwrap_err() {
            Error::Format { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn full_header_fields() {
        let r = record_with_body(
            "title: T\nauthors: A. One; B. Two\ndate: 2010-05-01\nabstract: Short.\nkeywords: x, y ,z\n\nbody",
        );
        assert_eq!(r.authors, ["A. One", "B. Two"]);
        assert_eq!(r.pub_date, NaiveDate::from_ymd_opt(2010, 5, 1));
        assert_eq!(r.abstract_text.as_deref(), Some("Short."));
        assert_eq!(r.keywords, ["x", "y", "z"]);
        assert_eq!(r.body, "body");
    }

    #[test]
    fn bad_date_and_unknown_key_rejected() {
        let err = parse_document_text("title: T\ndate: yesterday\n\n", "d".into(), "d", "txt".into(), 0);
        assert_eq!(err.unwrap_err().0, 2);
        let err = parse_document_text("title: T\nvenue: X\n\n", "d".into(), "d", "txt".into(), 0);
        assert_eq!(err.unwrap_err().0, 2);
    }

    #[test]
    fn invalid_utf8_is_encoding_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.txt");
        fs::write(&p, [0x66, 0xff, 0xfe]).unwrap();
        assert!(matches!(parse_document(&p), Err(Error::Encoding { .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            parse_document(Path::new("/definitely/not/here.txt")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn tokenize_splits_and_folds() {
        let ts = tokenize(&record_with_body("Multi-Agent System."), &Stopwords::none());
        // body tokens, then the defaulted title "d"
        assert_eq!(surfaces(&ts), ["multi", "agent", "system", "d"]);
    }

    #[test]
    fn tokenize_drops_stopwords() {
        let stop: Stopwords = ["the".to_string(), "d".to_string()].into_iter().collect();
        let ts = tokenize(&record_with_body("the the the"), &stop);
        assert!(ts.is_empty());
    }

    #[test]
    fn tokenize_title_string() {
        let stop: Stopwords = ["a", "for", "d"].into_iter().map(String::from).collect();
        let ts = tokenize(&record_with_body("A security solution for mobile agents"), &stop);
        assert_eq!(surfaces(&ts), ["security", "solution", "mobile", "agents"]);
    }

    #[test]
    fn token_offsets_point_into_indexed_text() {
        let r = record_with_body("title: Ünïcode Title\nkeywords: k1, k2\n\nSome Body; with PUNCTUATION!");
        let text: Vec<char> = r.indexed_text().chars().collect();
        let ts = tokenize(&r, &Stopwords::english());
        let mut last = None;
        for t in &ts.tokens {
            assert!(last.is_none_or(|l| l < t.char_offset));
            last = Some(t.char_offset);
            let n = t.surface.chars().count();
            let slice: String = text[t.char_offset..t.char_offset + n].iter().collect();
            assert_eq!(fold(&slice), t.surface);
        }
    }

    #[test]
    fn english_stopwords_load() {
        let s = Stopwords::english();
        assert!(s.len() >= 100);
        assert!(s.contains("the") && s.contains("for") && s.contains("a"));
        assert!(!s.contains("agent"));
    }

    #[test]
    fn corpus_ids_are_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "b.txt", "two");
        write(dir.path(), "sub/a.txt", "one");
        write(dir.path(), "skip.md", "not a document");
        let recs = load_corpus(dir.path()).unwrap();
        let ids: Vec<_> = recs.iter().map(|r| r.doc_id.as_str()).collect();
        assert_eq!(ids, ["b.txt", "sub/a.txt"]);
    }

    #[test]
    fn missing_corpus_dir_is_io_error() {
        assert!(matches!(load_corpus(Path::new("/no/such/dir")), Err(Error::Io { .. })));
    }
}
