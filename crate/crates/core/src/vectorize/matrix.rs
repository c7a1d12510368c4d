use std::io::{Read, Write};

use crate::art::{complement_code_sparse, ComplementCoded};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"FAMX";
const VERSION: u32 = 1;

/// Non-zero coordinates of one feature vector, indices strictly increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseRow {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseRow {
    /// Keeps non-zero pairs; `pairs` must be in increasing index order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut row = Self::default();
        for (i, v) in pairs {
            if v != 0.0 {
                row.indices.push(i as u32);
                row.values.push(v);
            }
        }
        row
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self::from_pairs(values.iter().copied().enumerate())
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i as usize] = v;
        }
        out
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .map(|&i| i as usize)
            .zip(self.values.iter().copied())
    }
}

/// How the rows were scaled into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Scaling {
    /// Each row divided by its own maximum (tf-idf).
    RowMax,
    /// Per-dimension min-max over the corpus (embeddings).
    MinMax { min: Vec<f64>, max: Vec<f64> },
}

/// Row-per-document feature matrix, stored sparse in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    dim: usize,
    rows: Vec<SparseRow>,
    scaling: Scaling,
}

impl FeatureMatrix {
    pub fn new(dim: usize, rows: Vec<SparseRow>, scaling: Scaling) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("feature dimension"));
        }
        for row in &rows {
            if let Some(&i) = row.indices.iter().find(|&&i| i as usize >= dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: i as usize + 1,
                });
            }
            if let Some(&v) = row.values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Domain { index: 0, value: v });
            }
        }
        Ok(Self { dim, rows, scaling })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn dense(&self, i: usize) -> Vec<f64> {
        self.rows[i].to_dense(self.dim)
    }

    /// Complement-coded input for row `i`.
    pub fn encode(&self, i: usize) -> ComplementCoded<f64> {
        let pairs: Vec<(usize, f64)> = self.rows[i].pairs().collect();
        complement_code_sparse(self.dim, &pairs).expect("rows are validated on construction")
    }

    /// Rows `keep`, in the given order.
    pub fn select(&self, keep: &[usize]) -> Self {
        Self {
            dim: self.dim,
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            scaling: self.scaling.clone(),
        }
    }

    /// Median of every column, implicit zeros included.
    pub fn column_medians(&self) -> Vec<f64> {
        let mut columns = vec![Vec::new(); self.dim];
        for row in &self.rows {
            for (i, v) in row.pairs() {
                columns[i].push(v);
            }
        }
        let n = self.rows.len();
        columns
            .into_iter()
            .map(|mut col| {
                col.resize(n, 0.0);
                crate::stats::median(&mut col)
            })
            .collect()
    }

    /// Binary layout, little endian: magic `FAMX`, `u32` version, `u64` dim,
    /// `u64` row count, `u8` scaling tag (0 row-max, 1 min-max), min-max bounds
    /// as `dim` + `dim` `f64`s when tagged 1, then each row as a `u32` entry
    /// count followed by that many (`u32` index, `f64` value) pairs.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        w.write_all(&(self.rows.len() as u64).to_le_bytes())?;
        match &self.scaling {
            Scaling::RowMax => w.write_all(&[0])?,
            Scaling::MinMax { min, max } => {
                w.write_all(&[1])?;
                for v in min.iter().chain(max) {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        for row in &self.rows {
            w.write_all(&(row.nnz() as u32).to_le_bytes())?;
            for (&i, v) in row.indices.iter().zip(&row.values) {
                w.write_all(&i.to_le_bytes())?;
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Parse {
                line: 0,
                msg: "not a feature matrix file".into(),
            });
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unsupported feature matrix version {version}"),
            });
        }
        let dim = read_u64(&mut r)? as usize;
        let count = read_u64(&mut r)? as usize;
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let scaling = match tag[0] {
            0 => Scaling::RowMax,
            1 => {
                let min = read_f64s(&mut r, dim)?;
                let max = read_f64s(&mut r, dim)?;
                Scaling::MinMax { min, max }
            }
            t => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("unknown scaling tag {t}"),
                })
            }
        };
        let mut rows = Vec::with_capacity(count);
        for k in 0..count {
            let nnz = read_u32(&mut r)? as usize;
            let mut row = SparseRow {
                indices: Vec::with_capacity(nnz),
                values: Vec::with_capacity(nnz),
            };
            for _ in 0..nnz {
                let i = read_u32(&mut r)?;
                if row.indices.last().is_some_and(|&last| last >= i) {
                    return Err(Error::Parse {
                        line: k + 1,
                        msg: "row indices are not increasing".into(),
                    });
                }
                row.indices.push(i);
                row.values.push(read_f64s(&mut r, 1)?[0]);
            }
            rows.push(row);
        }
        Self::new(dim, rows, scaling)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; 8 * n];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_roundtrip() {
        let rows = vec![
            SparseRow::from_dense(&[0.0, 0.25, 1.0]),
            SparseRow::default(),
            SparseRow::from_dense(&[1.0 / 3.0, 0.0, 0.0]),
        ];
        for scaling in [
            Scaling::RowMax,
            Scaling::MinMax {
                min: vec![-1.0, 0.0, 2.0],
                max: vec![1.0, 0.5, 3.0],
            },
        ] {
            let m = FeatureMatrix::new(3, rows.clone(), scaling).unwrap();
            let mut buf = Vec::new();
            m.write_to(&mut buf).unwrap();
            assert_eq!(&buf[..4], b"FAMX");
            assert_eq!(FeatureMatrix::read_from(&buf[..]).unwrap(), m);
        }
    }

    #[test]
    fn medians_count_implicit_zeros() {
        let rows = vec![
            SparseRow::from_dense(&[0.2, 1.0]),
            SparseRow::from_dense(&[0.0, 0.5]),
            SparseRow::from_dense(&[0.6, 0.0]),
            SparseRow::from_dense(&[0.0, 0.7]),
        ];
        let m = FeatureMatrix::new(2, rows, Scaling::RowMax).unwrap();
        assert_eq!(m.column_medians(), vec![0.1, 0.6]);
        assert_eq!(m.select(&[2, 0]).dense(0), vec![0.6, 0.0]);
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = SparseRow {
            indices: vec![5],
            values: vec![0.5],
        };
        assert!(FeatureMatrix::new(3, vec![bad], Scaling::RowMax).is_err());
        let bad = SparseRow {
            indices: vec![0],
            values: vec![1.5],
        };
        assert!(FeatureMatrix::new(3, vec![bad], Scaling::RowMax).is_err());
        assert!(FeatureMatrix::read_from(&b"XXXX"[..]).is_err());
    }

    #[test]
    fn encode_matches_dense_coding() {
        let m = FeatureMatrix::new(
            4,
            vec![SparseRow::from_dense(&[0.0, 0.5, 0.0, 0.2])],
            Scaling::RowMax,
        )
        .unwrap();
        let dense = crate::art::complement_code(&m.dense(0)).unwrap();
        assert_eq!(m.encode(0), dense);
    }
}
