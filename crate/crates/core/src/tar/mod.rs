//! Simulated technology-assisted review: seed a model with a few judged
//! documents, then repeatedly review the top-scoring documents it predicts
//! relevant until it predicts none.

mod metrics;

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::art::{ArtParams, Label};
use crate::artmap::ArtmapModel;
use crate::error::{Error, Result};
use crate::vectorize::FeatureMatrix;

pub use metrics::{
    compute_metrics, read_metrics_csv, write_metrics_csv, MetricsRecord, RunMetrics,
};

pub const RELEVANT: &str = "relevant";
pub const NON_RELEVANT: &str = "non-relevant";

pub fn label_for(relevant: bool) -> Label {
    Label::new(if relevant { RELEVANT } else { NON_RELEVANT })
}

/// Ground-truth judgments, by document index.
pub trait Oracle {
    fn is_relevant(&self, doc: usize) -> bool;
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn relevant_total(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_relevant(i)).count()
    }
}

impl Oracle for [bool] {
    fn is_relevant(&self, doc: usize) -> bool {
        self[doc]
    }

    fn len(&self) -> usize {
        <[bool]>::len(self)
    }
}

impl Oracle for Vec<bool> {
    fn is_relevant(&self, doc: usize) -> bool {
        self[doc]
    }

    fn len(&self) -> usize {
        Vec::len(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicRunConfig {
    pub topic: String,
    pub seed_relevant: usize,
    pub seed_nonrelevant: usize,
    pub batch_size: usize,
    pub rng_seed: u64,
    pub params: ArtParams<f64>,
}

impl TopicRunConfig {
    /// 10 relevant + 90 non-relevant seed documents, batches of 100.
    pub fn new(topic: impl Into<String>, rng_seed: u64) -> Self {
        Self {
            topic: topic.into(),
            seed_relevant: 10,
            seed_nonrelevant: 90,
            batch_size: 100,
            rng_seed,
            params: ArtParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("seed_relevant", self.seed_relevant),
            ("seed_nonrelevant", self.seed_nonrelevant),
            ("batch_size", self.batch_size),
        ] {
            if v == 0 {
                return Err(Error::InvalidParam {
                    name,
                    reason: "must be at least 1".into(),
                });
            }
        }
        self.params.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedSelection {
    /// Seed documents in training order.
    pub seed: Vec<usize>,
    pub remaining: Vec<usize>,
    pub relevant: usize,
    pub nonrelevant: usize,
    /// Whether the requested counts were scaled down.
    pub scaled: bool,
}

/// Draws the seed set uniformly without replacement from each stratum.
///
/// With fewer than the requested relevant or non-relevant documents available,
/// both counts are scaled by the same factor `min(1, P/r, Q/n)` (rounded, at
/// least one of each kind that exists).
pub fn select_seed(
    oracle: &(impl Oracle + ?Sized),
    config: &TopicRunConfig,
) -> Result<SeedSelection> {
    config.validate()?;
    let (pos, neg): (Vec<usize>, Vec<usize>) =
        (0..oracle.len()).partition(|&i| oracle.is_relevant(i));
    if pos.is_empty() {
        return Err(Error::SkipTopic(config.topic.clone()));
    }
    let scale = (pos.len() as f64 / config.seed_relevant as f64)
        .min(neg.len() as f64 / config.seed_nonrelevant as f64)
        .min(1.0);
    let scaled = scale < 1.0;
    let count = |want: usize, have: usize| -> usize {
        if have == 0 {
            0
        } else {
            ((want as f64 * scale).round() as usize).clamp(1, have)
        }
    };
    let relevant = count(config.seed_relevant, pos.len());
    let nonrelevant = count(config.seed_nonrelevant, neg.len());
    if scaled {
        log::info!(
            "topic {}: seed scaled to {relevant} relevant + {nonrelevant} non-relevant",
            config.topic
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut seed: Vec<usize> = sample(&mut rng, pos.len(), relevant)
        .into_iter()
        .map(|k| pos[k])
        .collect();
    seed.extend(
        sample(&mut rng, neg.len(), nonrelevant)
            .into_iter()
            .map(|k| neg[k]),
    );
    seed.shuffle(&mut rng);
    let chosen: BTreeSet<usize> = seed.iter().copied().collect();
    let remaining = (0..oracle.len()).filter(|i| !chosen.contains(i)).collect();
    Ok(SeedSelection {
        seed,
        remaining,
        relevant,
        nonrelevant,
        scaled,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewedDoc {
    pub doc: usize,
    pub id: String,
    /// Subsethood score at selection time; `None` for seed documents.
    pub score: Option<f64>,
    pub relevant: bool,
    /// 0 for the seed.
    pub batch: usize,
}

/// Progress of one review run.
#[derive(Debug, Clone)]
pub struct ReviewState {
    reviewed: Vec<ReviewedDoc>,
    unreviewed: BTreeSet<usize>,
    model: ArtmapModel<f64>,
    batches: usize,
}

impl ReviewState {
    /// Trains a fresh model on the seed documents in selection order.
    pub fn seeded(
        matrix: &FeatureMatrix,
        ids: &[String],
        oracle: &(impl Oracle + ?Sized),
        selection: &SeedSelection,
        params: ArtParams<f64>,
    ) -> Result<Self> {
        if ids.len() != matrix.len() || oracle.len() != matrix.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.len(),
                actual: if ids.len() != matrix.len() {
                    ids.len()
                } else {
                    oracle.len()
                },
            });
        }
        let mut model = ArtmapModel::new(matrix.dim(), params)?;
        let mut reviewed = Vec::with_capacity(selection.seed.len());
        for &doc in &selection.seed {
            let relevant = oracle.is_relevant(doc);
            model.train_encoded(&matrix.encode(doc), label_for(relevant))?;
            reviewed.push(ReviewedDoc {
                doc,
                id: ids[doc].clone(),
                score: None,
                relevant,
                batch: 0,
            });
        }
        let unreviewed = selection.remaining.iter().copied().collect();
        Ok(Self {
            reviewed,
            unreviewed,
            model,
            batches: 0,
        })
    }

    pub fn reviewed(&self) -> &[ReviewedDoc] {
        &self.reviewed
    }

    pub fn unreviewed(&self) -> &BTreeSet<usize> {
        &self.unreviewed
    }

    pub fn model(&self) -> &ArtmapModel<f64> {
        &self.model
    }

    pub fn into_model(self) -> ArtmapModel<f64> {
        self.model
    }

    /// Review batches after the seed.
    pub fn batches(&self) -> usize {
        self.batches
    }

    /// Relevant documents found after each batch, starting with the seed.
    pub fn relevant_found_by_batch(&self) -> Vec<usize> {
        let mut out = vec![0; self.batches + 1];
        for r in self.reviewed.iter().filter(|r| r.relevant) {
            out[r.batch] += 1;
        }
        for b in 1..out.len() {
            out[b] += out[b - 1];
        }
        out
    }

    /// Unreviewed documents the model currently labels relevant, best first
    /// (score descending, then document id).
    pub fn ranked_candidates(
        &self,
        matrix: &FeatureMatrix,
        ids: &[String],
    ) -> Result<Vec<(usize, f64)>> {
        let mut hits = Vec::new();
        for &doc in &self.unreviewed {
            let p = self.model.predict_encoded(&matrix.encode(doc))?;
            if p.label.as_str() == RELEVANT {
                hits.push((doc, p.score));
            }
        }
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| ids[a.0].cmp(&ids[b.0])));
        Ok(hits)
    }

    /// Reviews one batch. Returns false, changing nothing, when no unreviewed
    /// document is predicted relevant.
    pub fn step(
        &mut self,
        matrix: &FeatureMatrix,
        ids: &[String],
        oracle: &(impl Oracle + ?Sized),
        batch_size: usize,
    ) -> Result<bool> {
        let mut batch = self.ranked_candidates(matrix, ids)?;
        if batch.is_empty() {
            return Ok(false);
        }
        batch.truncate(batch_size.max(1));
        self.batches += 1;
        for (doc, score) in batch {
            let relevant = oracle.is_relevant(doc);
            self.unreviewed.remove(&doc);
            self.model
                .train_encoded(&matrix.encode(doc), label_for(relevant))?;
            self.reviewed.push(ReviewedDoc {
                doc,
                id: ids[doc].clone(),
                score: Some(score),
                relevant,
                batch: self.batches,
            });
        }
        Ok(true)
    }

    /// One JSON object per batch, the seed as batch 0.
    pub fn write_log<W: Write>(&self, mut w: W) -> Result<()> {
        for batch in 0..=self.batches {
            let docs: Vec<&ReviewedDoc> =
                self.reviewed.iter().filter(|r| r.batch == batch).collect();
            let entry = BatchLog {
                batch,
                doc_ids: docs.iter().map(|r| r.id.as_str()).collect(),
                scores: docs.iter().map(|r| r.score).collect(),
                labels: docs
                    .iter()
                    .map(|r| label_for(r.relevant).as_str().to_owned())
                    .collect(),
            };
            serde_json::to_writer(&mut w, &entry)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct BatchLog<'a> {
    batch: usize,
    doc_ids: Vec<&'a str>,
    scores: Vec<Option<f64>>,
    labels: Vec<String>,
}

/// Runs batches until the model predicts nothing relevant among the
/// unreviewed documents.
pub fn review_loop(
    mut state: ReviewState,
    matrix: &FeatureMatrix,
    ids: &[String],
    oracle: &(impl Oracle + ?Sized),
    config: &TopicRunConfig,
) -> Result<ReviewState> {
    while state.step(matrix, ids, oracle, config.batch_size)? {
        log::debug!(
            "topic {}: batch {} done, {} unreviewed",
            config.topic,
            state.batches,
            state.unreviewed.len()
        );
    }
    Ok(state)
}

/// Outcome of a complete simulated review for one topic.
#[derive(Debug, Clone)]
pub struct TopicRun {
    pub selection: SeedSelection,
    pub state: ReviewState,
    pub metrics: RunMetrics,
}

/// Seed selection, seed training, the review loop, and scoring.
pub fn run_topic(
    matrix: &FeatureMatrix,
    ids: &[String],
    oracle: &(impl Oracle + ?Sized),
    config: &TopicRunConfig,
) -> Result<TopicRun> {
    let selection = select_seed(oracle, config)?;
    let state = ReviewState::seeded(matrix, ids, oracle, &selection, config.params)?;
    let state = review_loop(state, matrix, ids, oracle, config)?;
    let metrics = compute_metrics(&state, oracle);
    Ok(TopicRun {
        selection,
        state,
        metrics,
    })
}
