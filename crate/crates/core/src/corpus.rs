//! Corpus ingestion: newline-delimited JSON documents that seed generation.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// One context document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub title: Option<String>,
    pub body: String,
}

#[derive(Debug, Deserialize)]
struct RawDocument {
    id: String,
    #[serde(default)]
    title: Option<String>,
    body: String,
}

/// Counters accumulated while loading a corpus file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Documents that passed validation.
    pub valid: usize,
    /// Lines whose `body` was empty after trimming.
    pub empty_body: usize,
    /// Lines whose `id` repeated an earlier document.
    pub duplicate_id: usize,
}

impl LoadStats {
    /// Total record lines consumed (valid or skipped).
    pub fn lines_consumed(&self) -> usize {
        self.valid + self.empty_body + self.duplicate_id
    }
}

/// An ordered, id-unique collection of documents.
#[derive(Debug, Clone)]
pub struct Corpus {
    documents: Vec<Document>,
    by_id: HashMap<String, usize>,
    stats: LoadStats,
}

impl Corpus {
    /// Build a corpus from documents already in memory, enforcing the same
    /// skip rules as [`load_corpus`].
    pub fn from_documents(documents: impl IntoIterator<Item = Document>) -> Self {
        let mut corpus = Corpus {
            documents: Vec::new(),
            by_id: HashMap::new(),
            stats: LoadStats::default(),
        };
        for doc in documents {
            corpus.push(doc);
        }
        corpus
    }

    fn push(&mut self, doc: Document) {
        if doc.body.trim().is_empty() {
            self.stats.empty_body += 1;
            return;
        }
        if self.by_id.contains_key(&doc.id) {
            self.stats.duplicate_id += 1;
            return;
        }
        self.by_id.insert(doc.id.clone(), self.documents.len());
        self.documents.push(doc);
        self.stats.valid += 1;
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.by_id.get(id).map(|&i| &self.documents[i])
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn load_stats(&self) -> LoadStats {
        self.stats
    }
}

/// Load up to `limit` valid documents from a JSONL file.
///
/// Document order follows file order. Lines with an empty body or a duplicate
/// id are counted and skipped; a line that fails to parse, or lacks required
/// keys, aborts the load with its line number. Unknown keys are ignored.
pub fn load_corpus(path: &Path, limit: Option<usize>) -> Result<Corpus> {
    if limit == Some(0) {
        return Err(Error::InvalidConfig(
            "document limit must be positive".into(),
        ));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut corpus = Corpus::from_documents([]);
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawDocument =
            serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                path: path.to_path_buf(),
                line: idx + 1,
                message: e.to_string(),
            })?;
        if raw.id.is_empty() {
            return Err(Error::MalformedRecord {
                path: path.to_path_buf(),
                line: idx + 1,
                message: "document id is empty".into(),
            });
        }
        corpus.push(Document {
            id: raw.id,
            title: raw.title,
            body: raw.body,
        });
        if let Some(limit) = limit {
            if corpus.len() == limit {
                break;
            }
        }
    }

    if corpus.is_empty() {
        return Err(Error::EmptyCorpus {
            path: path.to_path_buf(),
        });
    }
    Ok(corpus)
}

/// Validation counters for a loaded corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: usize,
    pub empty_body: usize,
    pub duplicate_id: usize,
}

/// Report how many documents were kept and how many lines were skipped, and
/// why. The three counters sum to the number of record lines consumed.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let stats = corpus.load_stats();
    ValidationReport {
        valid: stats.valid,
        empty_body: stats.empty_body,
        duplicate_id: stats.duplicate_id,
    }
}
