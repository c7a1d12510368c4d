use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One corpus line: `{"id": ..., "text": ..., "topics": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub topics: Vec<String>,
}

impl Document {
    pub fn has_topic(&self, topic: &str) -> bool {
        self.topics.iter().any(|t| t == topic)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    /// Fails on duplicate document ids.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::InvalidParam {
                    name: "corpus",
                    reason: format!("duplicate document id `{}`", d.id),
                });
            }
        }
        Ok(Self { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.id.clone()).collect()
    }

    /// All topic ids, sorted.
    pub fn topics(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .documents
            .iter()
            .flat_map(|d| d.topics.iter().map(String::as_str))
            .collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Per-document membership in `topic`.
    pub fn relevance(&self, topic: &str) -> Vec<bool> {
        self.documents.iter().map(|d| d.has_topic(topic)).collect()
    }

    pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Self> {
        let mut documents = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            documents.push(doc);
        }
        Self::new(documents)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = fs::File::open(path)?;
        Self::read_jsonl(std::io::BufReader::new(f))
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for d in &self.documents {
            serde_json::to_writer(&mut w, d)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub(crate) fn subset(&self, keep: &[usize]) -> Self {
        Self {
            documents: keep.iter().map(|&i| self.documents[i].clone()).collect(),
        }
    }
}

/// Converts the one-file-per-message newsgroup layout (`<root>/.../<group>/<msg>`)
/// into a corpus. The topic of a message is its parent directory name and the id
/// is its path relative to `root`. Files are visited in sorted order; non-UTF-8
/// bytes are replaced.
pub fn ingest_newsgroups(root: impl AsRef<Path>) -> Result<Corpus> {
    let root = root.as_ref();
    let mut files = Vec::new();
    collect_files(root, &mut files)?;
    files.sort();
    let mut documents = Vec::with_capacity(files.len());
    for path in files {
        let Some(group) = path
            .parent()
            .and_then(Path::file_name)
            .and_then(|s| s.to_str())
        else {
            continue;
        };
        let rel = path.strip_prefix(root).unwrap_or(&path);
        let id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let bytes = fs::read(&path)?;
        documents.push(Document {
            id,
            text: String::from_utf8_lossy(&bytes).into_owned(),
            topics: vec![group.to_owned()],
        });
    }
    Corpus::new(documents)
}

fn collect_files(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}
