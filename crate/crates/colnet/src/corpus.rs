//! Corpus loading and text normalization.
//!
//! Normalization is deliberately minimal: lowercase everything, treat
//! punctuation and symbols as token separators, keep digits, no stemming.
//! Sentence boundaries carry no marker, so downstream n-grams cross them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus root not found: {0}")]
    RootNotFound(PathBuf),
    #[error("unreadable file {path}: {source}")]
    Unreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed manifest line {line}: expected `path<TAB>genre`")]
    MalformedManifest { line: usize },
    #[error("n-gram order {0} unsupported (expected 2 or 3)")]
    BadNgramOrder(usize),
}

/// One genre-labeled document as an ordered token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub genre: String,
    pub tokens: Vec<String>,
}

/// A collection of documents with a genre index.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
    genre_index: BTreeMap<String, Vec<usize>>,
}

impl Corpus {
    pub fn from_documents(documents: Vec<Document>) -> Self {
        let mut genre_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, doc) in documents.iter().enumerate() {
            genre_index.entry(doc.genre.clone()).or_default().push(i);
        }
        Corpus {
            documents,
            genre_index,
        }
    }

    pub fn genres(&self) -> impl Iterator<Item = &str> {
        self.genre_index.keys().map(|g| g.as_str())
    }

    pub fn documents_in(&self, genre: &str) -> Vec<&Document> {
        self.genre_index
            .get(genre)
            .map(|idx| idx.iter().map(|&i| &self.documents[i]).collect())
            .unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }
}

fn is_separator(c: char) -> bool {
    // Punctuation and symbols separate tokens; letters, digits and marks
    // are token characters. Whitespace always separates.
    c.is_whitespace() || !(c.is_alphanumeric() || is_combining_mark(c))
}

fn is_combining_mark(c: char) -> bool {
    // Combining marks attached to letters survive normalization.
    matches!(c, '\u{0300}'..='\u{036f}' | '\u{1ab0}'..='\u{1aff}' | '\u{20d0}'..='\u{20ff}')
}

/// Lowercase and split on whitespace/punctuation. Punctuation characters are
/// removed entirely and split tokens at their position, so "don't" becomes
/// ["don", "t"]. No stemming is applied.
pub fn tokenize(raw_text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in raw_text.chars() {
        if is_separator(c) {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else {
            for lc in c.to_lowercase() {
                current.push(lc);
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// All contiguous n-grams of `tokens` in order, for n in {2, 3}.
pub fn ngram_stream(tokens: &[String], n: usize) -> Result<impl Iterator<Item = &[String]>, CorpusError> {
    if n != 2 && n != 3 {
        return Err(CorpusError::BadNgramOrder(n));
    }
    Ok(if tokens.len() >= n {
        tokens.windows(n)
    } else {
        [].windows(n)
    })
}

fn read_document(path: &Path, doc_id: String, genre: String) -> Result<Document, CorpusError> {
    let bytes = fs::read(path).map_err(|e| CorpusError::Unreadable {
        path: path.to_path_buf(),
        source: e,
    })?;
    let text = match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("{}: invalid UTF-8, undecodable bytes replaced", path.display());
            String::from_utf8_lossy(e.as_bytes()).into_owned()
        }
    };
    Ok(Document {
        doc_id,
        genre,
        tokens: tokenize(&text),
    })
}

/// Load a corpus laid out as `<root>/<genre>/<doc>` plain-text files, or,
/// when `manifest` is given, from `path<TAB>genre` records (paths relative
/// to `root`). Documents are ordered lexicographically by path.
pub fn load_corpus(root: &Path, manifest: Option<&Path>) -> Result<Corpus, CorpusError> {
    if !root.is_dir() {
        return Err(CorpusError::RootNotFound(root.to_path_buf()));
    }
    let mut entries: Vec<(PathBuf, String)> = Vec::new();
    if let Some(manifest) = manifest {
        let content = fs::read_to_string(manifest).map_err(|e| CorpusError::Unreadable {
            path: manifest.to_path_buf(),
            source: e,
        })?;
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (path, genre) = line
                .split_once('\t')
                .ok_or(CorpusError::MalformedManifest { line: lineno + 1 })?;
            entries.push((root.join(path), genre.to_string()));
        }
    } else {
        let mut genres: Vec<PathBuf> = fs::read_dir(root)
            .map_err(|e| CorpusError::Unreadable {
                path: root.to_path_buf(),
                source: e,
            })?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        genres.sort();
        for genre_dir in genres {
            let genre = genre_dir
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let mut files: Vec<PathBuf> = fs::read_dir(&genre_dir)
                .map_err(|e| CorpusError::Unreadable {
                    path: genre_dir.clone(),
                    source: e,
                })?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            for f in files {
                entries.push((f, genre.clone()));
            }
        }
    }
    entries.sort();
    let mut documents = Vec::with_capacity(entries.len());
    for (path, genre) in entries {
        let doc_id = path
            .strip_prefix(root)
            .unwrap_or(&path)
            .to_string_lossy()
            .into_owned();
        documents.push(read_document(&path, doc_id, genre)?);
    }
    if documents.is_empty() {
        log::warn!("corpus at {} contains zero documents", root.display());
    }
    Ok(Corpus::from_documents(documents))
}
