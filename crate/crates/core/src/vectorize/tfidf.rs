use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::matrix::SparseRow;
use super::{tokenize, Corpus};
use crate::art::FeatureVector;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_FEATURES: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TermEntry {
    term: String,
    df: usize,
}

/// Retained terms with their document frequencies. Index order is descending
/// document frequency, ties lexicographic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyFile", into = "VocabularyFile")]
pub struct Vocabulary {
    n_docs: usize,
    terms: Vec<String>,
    df: Vec<usize>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    n_docs: usize,
    terms: Vec<TermEntry>,
}

impl From<VocabularyFile> for Vocabulary {
    fn from(f: VocabularyFile) -> Self {
        let (terms, df) = f.terms.into_iter().map(|e| (e.term, e.df)).unzip();
        Self::build(f.n_docs, terms, df)
    }
}

impl From<Vocabulary> for VocabularyFile {
    fn from(v: Vocabulary) -> Self {
        Self {
            n_docs: v.n_docs,
            terms: v
                .terms
                .into_iter()
                .zip(v.df)
                .map(|(term, df)| TermEntry { term, df })
                .collect(),
        }
    }
}

impl Vocabulary {
    fn build(n_docs: usize, terms: Vec<String>, df: Vec<usize>) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            n_docs,
            terms,
            df,
            index,
        }
    }

    /// Fits over raw texts.
    pub fn fit<'a>(texts: impl IntoIterator<Item = &'a str>, max_features: usize) -> Result<Self> {
        if max_features == 0 {
            return Err(Error::InvalidParam {
                name: "max_features",
                reason: "must be at least 1".into(),
            });
        }
        let mut counts: HashMap<String, usize> = HashMap::new();
        let mut n_docs = 0;
        for text in texts {
            n_docs += 1;
            let unique: HashSet<String> = tokenize(text).into_iter().collect();
            for t in unique {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
        if n_docs == 0 {
            return Err(Error::Empty("corpus"));
        }
        let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(max_features);
        let (terms, df) = ranked.into_iter().unzip();
        Ok(Self::build(n_docs, terms, df))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn df(&self, i: usize) -> usize {
        self.df[i]
    }

    /// Smoothed idf: `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, i: usize) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + self.df[i] as f64)).ln() + 1.0
    }

    /// tf-idf weights (raw counts times idf) divided by the document's largest
    /// weight. Out-of-vocabulary tokens are ignored.
    pub fn transform_sparse(&self, text: &str) -> SparseRow {
        let mut tf: BTreeMap<usize, u32> = BTreeMap::new();
        for t in tokenize(text) {
            if let Some(i) = self.index_of(&t) {
                *tf.entry(i).or_insert(0) += 1;
            }
        }
        let weights: Vec<(usize, f64)> = tf
            .into_iter()
            .map(|(i, n)| (i, n as f64 * self.idf(i)))
            .collect();
        let max = weights.iter().map(|&(_, w)| w).fold(0.0, f64::max);
        if max <= 0.0 {
            return SparseRow::default();
        }
        SparseRow::from_pairs(weights.into_iter().map(|(i, w)| (i, w / max)))
    }
}

pub fn fit_tfidf(corpus: &Corpus, max_features: usize) -> Result<Vocabulary> {
    Vocabulary::fit(
        corpus.documents().iter().map(|d| d.text.as_str()),
        max_features,
    )
}

/// Dense tf-idf vector of `text` over `vocab`.
pub fn tfidf_vector(text: &str, vocab: &Vocabulary) -> FeatureVector<f64> {
    let dim = vocab.len().max(1);
    FeatureVector::new(vocab.transform_sparse(text).to_dense(dim))
        .expect("tf-idf weights lie in [0, 1]")
}
