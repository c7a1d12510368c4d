use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Oracle, ReviewState};
use crate::error::{Error, Result};

/// Effectiveness of one run. Seed documents count as reviewed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub relevant_total: usize,
    pub relevant_reviewed: usize,
    pub documents_reviewed: usize,
    pub batches: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    /// Set when nothing was reviewed; precision is then reported as 0.
    pub precision_undefined: bool,
}

impl RunMetrics {
    pub fn from_counts(
        relevant_total: usize,
        relevant_reviewed: usize,
        documents_reviewed: usize,
        batches: usize,
    ) -> Self {
        let recall = if relevant_total == 0 {
            0.0
        } else {
            relevant_reviewed as f64 / relevant_total as f64
        };
        let precision_undefined = documents_reviewed == 0;
        let precision = if precision_undefined {
            0.0
        } else {
            relevant_reviewed as f64 / documents_reviewed as f64
        };
        let f1 = if recall > 0.0 && precision > 0.0 {
            2.0 * recall * precision / (recall + precision)
        } else {
            0.0
        };
        Self {
            relevant_total,
            relevant_reviewed,
            documents_reviewed,
            batches,
            recall,
            precision,
            f1,
            precision_undefined,
        }
    }
}

pub fn compute_metrics(state: &ReviewState, oracle: &(impl Oracle + ?Sized)) -> RunMetrics {
    let reviewed = state.reviewed();
    RunMetrics::from_counts(
        oracle.relevant_total(),
        reviewed.iter().filter(|r| r.relevant).count(),
        reviewed.len(),
        state.batches(),
    )
}

/// One row of the metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub corpus: String,
    pub vectorizer: String,
    pub topic: String,
    pub relevant_total: usize,
    pub documents_reviewed: usize,
    pub batches: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl MetricsRecord {
    pub fn new(corpus: &str, vectorizer: &str, topic: &str, m: &RunMetrics) -> Self {
        Self {
            corpus: corpus.to_owned(),
            vectorizer: vectorizer.to_owned(),
            topic: topic.to_owned(),
            relevant_total: m.relevant_total,
            documents_reviewed: m.documents_reviewed,
            batches: m.batches,
            recall: m.recall,
            precision: m.precision,
            f1: m.f1,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            msg: format!("{kind:?}"),
        },
    }
}

pub fn write_metrics_csv<W: Write>(w: W, records: &[MetricsRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_metrics_csv<R: Read>(r: R) -> Result<Vec<MetricsRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(csv_error))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_only_arithmetic() {
        let m = RunMetrics::from_counts(20, 10, 100, 0);
        assert_eq!(m.recall, 0.5);
        assert_eq!(m.precision, 0.1);
        let expected = 2.0 * 0.5 * 0.1 / 0.6;
        assert!((m.f1 - expected).abs() < 1e-15);
    }

    #[test]
    fn full_recall() {
        assert_eq!(RunMetrics::from_counts(7, 7, 30, 2).recall, 1.0);
    }

    #[test]
    fn empty_review_is_flagged() {
        let m = RunMetrics::from_counts(5, 0, 0, 0);
        assert!(m.precision_undefined);
        assert_eq!((m.precision, m.f1), (0.0, 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            MetricsRecord::new("c", "tfidf", "a", &RunMetrics::from_counts(20, 18, 300, 3)),
            MetricsRecord::new("c", "tfidf", "b,q", &RunMetrics::from_counts(3, 1, 100, 0)),
        ];
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "corpus,vectorizer,topic,relevant_total,documents_reviewed,batches,recall,precision,f1\n"
        ));
        assert_eq!(read_metrics_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn bad_csv_reports_line() {
        let text = "corpus,vectorizer,topic,relevant_total,documents_reviewed,batches,recall,precision,f1\n\
                    c,t,a,1,2,0,0.5,0.5,0.5\nc,t,b,x,2,0,0.5,0.5,0.5\n";
        assert!(matches!(
            read_metrics_csv(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
