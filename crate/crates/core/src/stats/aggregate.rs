use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{friedman, median, nemenyi, FriedmanResult, ResultMatrix};
use crate::error::{Error, Result};
use crate::tar::MetricsRecord;

/// Median effectiveness of one vectorizer on one corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedianRow {
    pub corpus: String,
    pub vectorizer: String,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

/// Mean per-topic recall of `a` minus that of `b` on one corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDifference {
    pub corpus: String,
    pub a: String,
    pub b: String,
    pub mean_recall_difference: f64,
    /// `**` significant at .01, `*` at .05, empty otherwise or when untested.
    pub significance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub medians: Vec<MedianRow>,
    pub differences: Vec<PairDifference>,
    /// Friedman test on recall per corpus, where one could be run.
    pub friedman: Vec<(String, FriedmanResult)>,
    /// Why tests were skipped.
    pub notices: Vec<String>,
}

/// Medians per (corpus, vectorizer) and, for corpora with several
/// vectorizers, mean pairwise recall differences with Friedman/Nemenyi
/// significance over topics. Groups and pairs come out in name order.
pub fn aggregate(records: &[MetricsRecord]) -> Result<Aggregate> {
    if records.is_empty() {
        return Err(Error::Empty("metrics records"));
    }
    // corpus -> vectorizer -> topic -> record
    let mut groups: BTreeMap<&str, BTreeMap<&str, BTreeMap<&str, &MetricsRecord>>> =
        BTreeMap::new();
    for r in records {
        let prev = groups
            .entry(&r.corpus)
            .or_default()
            .entry(&r.vectorizer)
            .or_default()
            .insert(&r.topic, r);
        if prev.is_some() {
            return Err(Error::InvalidParam {
                name: "records",
                reason: format!(
                    "duplicate row for ({}, {}, {})",
                    r.corpus, r.vectorizer, r.topic
                ),
            });
        }
    }

    let mut out = Aggregate {
        medians: Vec::new(),
        differences: Vec::new(),
        friedman: Vec::new(),
        notices: Vec::new(),
    };
    for (&corpus, by_vec) in &groups {
        for (&vectorizer, by_topic) in by_vec {
            let column = |f: fn(&MetricsRecord) -> f64| -> f64 {
                median(&mut by_topic.values().map(|r| f(r)).collect::<Vec<_>>())
            };
            out.medians.push(MedianRow {
                corpus: corpus.to_owned(),
                vectorizer: vectorizer.to_owned(),
                recall: column(|r| r.recall),
                precision: column(|r| r.precision),
                f1: column(|r| r.f1),
            });
        }
        if by_vec.len() < 2 {
            out.notices.push(format!(
                "corpus {corpus}: one vectorizer, significance tests skipped"
            ));
            continue;
        }

        let all: BTreeSet<&str> = by_vec.values().flat_map(|t| t.keys().copied()).collect();
        let asymmetric: Vec<String> = all
            .iter()
            .filter(|t| by_vec.values().any(|m| !m.contains_key(**t)))
            .map(|t| t.to_string())
            .collect();
        if !asymmetric.is_empty() {
            return Err(Error::TopicMismatch {
                corpus: corpus.to_owned(),
                topics: asymmetric,
            });
        }

        let systems: Vec<String> = by_vec.keys().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<f64>> = all
            .iter()
            .map(|t| by_vec.values().map(|m| m[t].recall).collect())
            .collect();
        let n = rows.len() as f64;
        let matrix = ResultMatrix::new(systems.clone(), rows)?;
        let markers = significance_markers(corpus, &matrix, &mut out);
        for a in 0..systems.len() {
            for b in a + 1..systems.len() {
                let diff: f64 = matrix.rows().iter().map(|r| r[a] - r[b]).sum::<f64>() / n;
                out.differences.push(PairDifference {
                    corpus: corpus.to_owned(),
                    a: systems[a].clone(),
                    b: systems[b].clone(),
                    mean_recall_difference: diff,
                    significance: markers.get(&(a, b)).copied().unwrap_or_default().to_owned(),
                });
            }
        }
    }
    Ok(out)
}

// Pairs are only marked when the Friedman test rejects at the same level.
fn significance_markers(
    corpus: &str,
    matrix: &ResultMatrix,
    out: &mut Aggregate,
) -> BTreeMap<(usize, usize), &'static str> {
    let mut marks = BTreeMap::new();
    let fr = match friedman(matrix) {
        Ok(fr) => fr,
        Err(e) => {
            out.notices
                .push(format!("corpus {corpus}: significance tests skipped ({e})"));
            return marks;
        }
    };
    for (level, mark) in [(0.05, "*"), (0.01, "**")] {
        if fr.p_value >= level {
            continue;
        }
        match nemenyi(matrix, level) {
            Ok(nr) => {
                for p in nr.pairs.iter().filter(|p| p.significant) {
                    marks.insert((p.a, p.b), mark);
                }
            }
            Err(e) => {
                out.notices
                    .push(format!("corpus {corpus}: post-hoc test skipped ({e})"));
                break;
            }
        }
    }
    out.friedman.push((corpus.to_owned(), fr));
    marks
}

impl Aggregate {
    /// `corpus,vectorizer,recall,precision,f1`
    pub fn write_medians_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(w, &self.medians)
    }

    /// `corpus,a,b,mean_recall_difference,significance`
    pub fn write_differences_csv<W: Write>(&self, w: W) -> Result<()> {
        write_csv(w, &self.differences)
    }

    /// Plain-text tables for terminals and reports.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Median metrics by corpus and vectorizer");
        let _ = writeln!(
            s,
            "{:<16} {:<12} {:>8} {:>9} {:>8}",
            "corpus", "vectorizer", "recall", "precision", "f1"
        );
        for m in &self.medians {
            let _ = writeln!(
                s,
                "{:<16} {:<12} {:>8.2} {:>9.2} {:>8.2}",
                m.corpus, m.vectorizer, m.recall, m.precision, m.f1
            );
        }
        if !self.differences.is_empty() {
            let _ = writeln!(s, "\nAverage recall difference (row minus column)");
            for d in &self.differences {
                let _ = writeln!(
                    s,
                    "{:<16} {:<12} {:<12} {:>7.2}{}",
                    d.corpus, d.a, d.b, d.mean_recall_difference, d.significance
                );
            }
        }
        for (corpus, fr) in &self.friedman {
            let _ = writeln!(
                s,
                "\n{corpus}: Friedman chi2({}) = {:.2}, p = {:.3e}",
                fr.df, fr.statistic, fr.p_value
            );
        }
        if !self.differences.is_empty() {
            let _ = writeln!(s, "\n* p < .05, ** p < .01 (Nemenyi)");
        }
        for n in &self.notices {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

fn write_csv<W: Write, R: Serialize>(w: W, rows: &[R]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(vectorizer: &str, topic: &str, recall: f64) -> MetricsRecord {
        MetricsRecord {
            corpus: "c".into(),
            vectorizer: vectorizer.into(),
            topic: topic.into(),
            relevant_total: 10,
            documents_reviewed: 100,
            batches: 1,
            recall,
            precision: recall / 2.0,
            f1: recall / 3.0,
        }
    }

    #[test]
    fn single_row_group() {
        let a = aggregate(&[rec("tfidf", "x", 0.7)]).unwrap();
        assert_eq!(a.medians.len(), 1);
        assert_eq!((a.medians[0].recall, a.medians[0].precision), (0.7, 0.35));
        assert!(a.differences.is_empty());
        assert_eq!(a.notices.len(), 1);
    }

    #[test]
    fn odd_median() {
        let rows = [rec("v", "a", 0.9), rec("v", "b", 0.2), rec("v", "c", 0.4)];
        assert_eq!(aggregate(&rows).unwrap().medians[0].recall, 0.4);
    }

    #[test]
    fn mean_difference() {
        let rows = [
            rec("a", "t1", 1.0),
            rec("a", "t2", 0.8),
            rec("b", "t1", 0.9),
            rec("b", "t2", 0.7),
        ];
        let agg = aggregate(&rows).unwrap();
        assert_eq!(agg.differences.len(), 1);
        let d = &agg.differences[0];
        assert_eq!((d.a.as_str(), d.b.as_str()), ("a", "b"));
        assert!((d.mean_recall_difference - 0.1).abs() < 1e-12);
    }

    #[test]
    fn mismatched_topics_listed() {
        let rows = [
            rec("a", "t1", 1.0),
            rec("a", "t2", 0.8),
            rec("b", "t1", 0.9),
            rec("b", "t3", 0.7),
        ];
        match aggregate(&rows) {
            Err(Error::TopicMismatch { topics, .. }) => assert_eq!(topics, vec!["t2", "t3"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dominant_system_is_marked() {
        let mut rows = Vec::new();
        for t in 0..20 {
            let topic = format!("t{t:02}");
            rows.push(rec("best", &topic, 0.95));
            rows.push(rec("mid", &topic, 0.6 + t as f64 * 0.001));
            rows.push(rec("low", &topic, 0.3));
        }
        let agg = aggregate(&rows).unwrap();
        assert_eq!(agg.friedman[0].1.statistic, 40.0);
        let best_low = agg
            .differences
            .iter()
            .find(|d| d.a == "best" && d.b == "low")
            .unwrap();
        assert_eq!(best_low.significance, "**");
        let text = agg.render_text();
        assert!(text.contains("chi2(2) = 40.00"));
    }

    #[test]
    fn csv_headers() {
        let rows = [
            rec("a", "t1", 1.0),
            rec("a", "t2", 0.8),
            rec("b", "t1", 0.9),
            rec("b", "t2", 0.7),
        ];
        let agg = aggregate(&rows).unwrap();
        let mut m = Vec::new();
        agg.write_medians_csv(&mut m).unwrap();
        assert!(String::from_utf8(m)
            .unwrap()
            .starts_with("corpus,vectorizer,recall,precision,f1\n"));
        let mut d = Vec::new();
        agg.write_differences_csv(&mut d).unwrap();
        assert!(String::from_utf8(d)
            .unwrap()
            .starts_with("corpus,a,b,mean_recall_difference,significance\n"));
    }
}
