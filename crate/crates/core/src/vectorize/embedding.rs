use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::matrix::{FeatureMatrix, Scaling, SparseRow};
use super::tokenize;
use crate::art::FeatureVector;
use crate::error::{Error, Result};

/// Pretrained word vectors (GloVe / word2vec text format).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
    duplicates: usize,
}

impl EmbeddingTable {
    /// Parses `token v1 ... vD` lines. A leading word2vec `count dim` header is
    /// skipped. Repeated tokens keep their first vector and are counted in
    /// [`duplicates`](Self::duplicates).
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut dim = 0;
        let mut index = HashMap::new();
        let mut vectors = Vec::new();
        let mut duplicates = 0;
        for (i, line) in reader.lines().enumerate() {
            let n = i + 1;
            let line = line?;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if n == 1
                && rest.len() == 1
                && token.parse::<usize>().is_ok()
                && rest[0].parse::<usize>().is_ok()
            {
                continue;
            }
            let values = rest
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Parse {
                            line: n,
                            msg: format!("malformed number `{s}`"),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            if dim == 0 {
                if values.is_empty() {
                    return Err(Error::Parse {
                        line: n,
                        msg: "token without a vector".into(),
                    });
                }
                dim = values.len();
            } else if values.len() != dim {
                return Err(Error::Parse {
                    line: n,
                    msg: format!("expected {dim} values, found {}", values.len()),
                });
            }
            if index.contains_key(token) {
                duplicates += 1;
                continue;
            }
            index.insert(token.to_owned(), index.len());
            vectors.extend(values);
        }
        if index.is_empty() {
            return Err(Error::Empty("embedding file"));
        }
        if duplicates > 0 {
            log::warn!("embedding table: {duplicates} duplicate token(s) ignored");
        }
        Ok(Self {
            dim,
            index,
            vectors,
            duplicates,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Unweighted mean of the known tokens' vectors; `None` when no token is known.
    pub fn mean_vector(&self, text: &str) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for t in tokenize(text) {
            if let Some(v) = self.get(&t) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                n += 1;
            }
        }
        (n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect())
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    EmbeddingTable::from_reader(BufReader::new(File::open(path)?))
}

/// Per-dimension min-max scaling fitted over document mean vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl EmbeddingScaler {
    pub fn fit<'a>(dim: usize, means: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut min = vec![f64::INFINITY; dim];
        let mut max = vec![f64::NEG_INFINITY; dim];
        for v in means {
            for d in 0..dim {
                min[d] = min[d].min(v[d]);
                max[d] = max[d].max(v[d]);
            }
        }
        Self { min, max }
    }

    /// Maps into `[0, 1]`; constant (or unseen) dimensions map to 0.5.
    pub fn scale(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| {
                if hi > lo {
                    ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.5
                }
            })
            .collect()
    }
}

/// Scales a document's mean vector; documents with no known tokens get the
/// neutral all-0.5 vector.
pub fn embed_document(
    text: &str,
    table: &EmbeddingTable,
    scaler: &EmbeddingScaler,
) -> FeatureVector<f64> {
    let values = match table.mean_vector(text) {
        Some(mean) => scaler.scale(&mean),
        None => vec![0.5; table.dim()],
    };
    FeatureVector::new(values).expect("scaled embeddings lie in [0, 1]")
}

/// Document embedding fitted over a corpus.
#[derive(Debug, Clone)]
pub struct EmbeddingVectorizer<'t> {
    table: &'t EmbeddingTable,
    scaler: EmbeddingScaler,
}

impl<'t> EmbeddingVectorizer<'t> {
    pub fn fit<'a>(table: &'t EmbeddingTable, texts: impl IntoIterator<Item = &'a str>) -> Self {
        let means: Vec<Vec<f64>> = texts
            .into_iter()
            .filter_map(|t| table.mean_vector(t))
            .collect();
        let scaler = EmbeddingScaler::fit(table.dim(), means.iter().map(Vec::as_slice));
        Self { table, scaler }
    }

    pub fn scaler(&self) -> &EmbeddingScaler {
        &self.scaler
    }

    pub fn transform(&self, text: &str) -> FeatureVector<f64> {
        embed_document(text, self.table, &self.scaler)
    }

    pub fn transform_all<'a>(&self, texts: impl IntoIterator<Item = &'a str>) -> FeatureMatrix {
        let rows = texts
            .into_iter()
            .map(|t| SparseRow::from_dense(self.transform(t).as_slice()))
            .collect();
        FeatureMatrix::new(
            self.table.dim(),
            rows,
            Scaling::MinMax {
                min: self.scaler.min.clone(),
                max: self.scaler.max.clone(),
            },
        )
        .expect("scaled embeddings lie in [0, 1]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "drive 0.1 0.2 0.3\nscsi -1 0 1\n";

    #[test]
    fn loads_two_lines() {
        let t = EmbeddingTable::from_reader(TABLE.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("scsi").unwrap(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn malformed_number_cites_line() {
        let mut text = String::new();
        for i in 0..6 {
            text.push_str(&format!("w{i} 0.1 0.2\n"));
        }
        text.push_str("bad 0.1 zero\n");
        match EmbeddingTable::from_reader(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_line_is_an_error() {
        assert!(matches!(
            EmbeddingTable::from_reader("a 1 2\nb 1\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn duplicate_first_wins() {
        let t = EmbeddingTable::from_reader("a 1 2\na 3 4\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.duplicates(), 1);
        assert_eq!(t.get("a").unwrap(), &[1.0, 2.0]);
    }

    #[test]
    fn word2vec_header_is_skipped() {
        let t = EmbeddingTable::from_reader("2 2\na 1 2\nb 3 4\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn document_embedding() {
        let t = EmbeddingTable::from_reader("aa 0 10\nbb 1 10\ncc 2 10\n".as_bytes()).unwrap();
        let texts = ["aa", "bb cc", "cc", "nothing"];
        let vz = EmbeddingVectorizer::fit(&t, texts);
        // Means: [0,10], [1.5,10], [2,10]; dim 0 spans 0..2, dim 1 is constant.
        assert_eq!(vz.transform("aa").as_slice(), &[0.0, 0.5]);
        assert_eq!(vz.transform("cc").as_slice(), &[1.0, 0.5]);
        assert_eq!(vz.transform("bb cc").as_slice(), &[0.75, 0.5]);
        assert_eq!(vz.transform("nothing").as_slice(), &[0.5, 0.5]);
        let m = vz.transform_all(texts);
        assert_eq!(m.len(), 4);
        assert_eq!(m.dense(3), vec![0.5, 0.5]);
    }
}
