use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use fuzzy_artmap::explain::{
    model_rectangles, rectangles_to_json, render_rules_json, render_rules_text, rules_for_label,
    FeatureSpace,
};
use fuzzy_artmap::tar::{label_for, run_topic, write_metrics_csv, MetricsRecord, TopicRun};
use fuzzy_artmap::vectorize::{
    fit_tfidf, load_embeddings, stratified_sample_indices, Corpus, EmbeddingVectorizer,
    FeatureMatrix, Scaling, Vocabulary,
};
use fuzzy_artmap::Error;
use rayon::prelude::*;

use crate::config::{config_error, topic_seed, ExperimentConfig, Topics, VectorizerKind};

pub struct Vectorized {
    pub matrix: FeatureMatrix,
    pub vocabulary: Option<Vocabulary>,
}

impl Vectorized {
    pub fn space(&self) -> FeatureSpace {
        match &self.vocabulary {
            Some(v) => FeatureSpace::Terms(v.terms().to_vec()),
            None => FeatureSpace::Embedding {
                dim: self.matrix.dim(),
            },
        }
    }
}

pub fn load_corpus(cfg: &ExperimentConfig) -> Result<Corpus> {
    let path = cfg.corpus_path();
    let corpus =
        Corpus::load(path).with_context(|| format!("reading corpus {}", path.display()))?;
    if corpus.is_empty() {
        anyhow::bail!("corpus {} has no documents", path.display());
    }
    Ok(corpus)
}

pub fn vectorize(cfg: &ExperimentConfig, corpus: &Corpus) -> Result<Vectorized> {
    let texts = || corpus.documents().iter().map(|d| d.text.as_str());
    match cfg.vectorizer {
        VectorizerKind::Tfidf => {
            let vocab = fit_tfidf(corpus, cfg.max_features)?;
            let rows = texts().map(|t| vocab.transform_sparse(t)).collect();
            let matrix = FeatureMatrix::new(vocab.len(), rows, Scaling::RowMax)?;
            Ok(Vectorized {
                matrix,
                vocabulary: Some(vocab),
            })
        }
        VectorizerKind::Embedding => {
            let path = cfg.embeddings.as_deref().expect("validated");
            let table = load_embeddings(path)
                .with_context(|| format!("reading embeddings {}", path.display()))?;
            let matrix = EmbeddingVectorizer::fit(&table, texts()).transform_all(texts());
            Ok(Vectorized {
                matrix,
                vocabulary: None,
            })
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Feature matrix, ids, vocabulary and column medians under `dir`.
pub fn write_vectorized(dir: &Path, corpus: &Corpus, v: &Vectorized) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = create(&dir.join("features.famx"))?;
    v.matrix.write_to(&mut w)?;
    w.flush()?;
    let mut ids = corpus.ids().join("\n");
    ids.push('\n');
    write_text(&dir.join("ids.txt"), &ids)?;
    write_text(
        &dir.join("medians.json"),
        &serde_json::to_string(&v.matrix.column_medians())?,
    )?;
    if let Some(vocab) = &v.vocabulary {
        write_text(
            &dir.join("vocabulary.json"),
            &serde_json::to_string_pretty(vocab)?,
        )?;
    }
    Ok(())
}

pub fn vectorize_command(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let v = vectorize(cfg, &corpus)?;
    write_vectorized(&cfg.out, &corpus, &v)?;
    println!(
        "{} documents x {} features written to {}",
        v.matrix.len(),
        v.matrix.dim(),
        cfg.out.display()
    );
    Ok(())
}

/// File name for a topic: anything outside `[A-Za-z0-9._-]` becomes `_`.
pub fn topic_file_stem(topic: &str) -> String {
    topic
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

struct TopicOutcome {
    record: MetricsRecord,
    scaled_seed: bool,
}

pub fn run_command(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let topics = match &cfg.topics {
        Topics::Keyword(_) => corpus.topics(),
        Topics::List(list) => list.clone(),
    };
    if topics.is_empty() {
        anyhow::bail!("corpus has no topics");
    }
    let started = std::time::Instant::now();
    let v = vectorize(cfg, &corpus)?;
    log::info!(
        "vectorized {} documents into {} features",
        v.matrix.len(),
        v.matrix.dim()
    );

    let out = &cfg.out;
    for sub in ["runs", "models", "rules", "rectangles"] {
        fs::create_dir_all(out.join(sub))
            .with_context(|| format!("creating {}", out.join(sub).display()))?;
    }
    write_text(&out.join("config.toml"), &cfg.to_toml()?)?;
    if let Some(vocab) = &v.vocabulary {
        write_text(
            &out.join("vocabulary.json"),
            &serde_json::to_string_pretty(vocab)?,
        )?;
    }
    let medians = v.matrix.column_medians();
    write_text(&out.join("medians.json"), &serde_json::to_string(&medians)?)?;

    let ids = corpus.ids();
    let space = v.space();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| config_error(format!("worker pool: {e}")))?;
    let results: Vec<Result<Option<TopicOutcome>>> = pool.install(|| {
        topics
            .par_iter()
            .map(|topic| run_one(cfg, &corpus, &ids, &v.matrix, &space, &medians, topic))
            .collect()
    });

    let mut records = Vec::new();
    let mut scaled = Vec::new();
    for (topic, r) in topics.iter().zip(results) {
        if let Some(o) = r.with_context(|| format!("topic {topic}"))? {
            if o.scaled_seed {
                scaled.push(topic.clone());
            }
            records.push(o.record);
        }
    }
    let mut w = create(&out.join("metrics.csv"))?;
    write_metrics_csv(&mut w, &records)?;
    w.flush()?;
    if records.is_empty() {
        anyhow::bail!("no topic had relevant documents");
    }
    print_summary(&records, &scaled);
    log::info!(
        "finished {} topics in {:.1?}",
        records.len(),
        started.elapsed()
    );
    Ok(())
}

fn run_one(
    cfg: &ExperimentConfig,
    corpus: &Corpus,
    ids: &[String],
    matrix: &FeatureMatrix,
    space: &FeatureSpace,
    medians: &[f64],
    topic: &str,
) -> Result<Option<TopicOutcome>> {
    let seed = topic_seed(cfg.rng_seed, topic);
    let relevance = corpus.relevance(topic);
    let (run, ids) = if cfg.downsample < 1.0 {
        let keep = stratified_sample_indices(&relevance, cfg.downsample, seed)?;
        let sub_ids: Vec<String> = keep.iter().map(|&i| ids[i].clone()).collect();
        let sub_rel: Vec<bool> = keep.iter().map(|&i| relevance[i]).collect();
        let sub = matrix.select(&keep);
        (
            run_topic(&sub, &sub_ids, &sub_rel, &cfg.topic_config(topic, seed)),
            sub_ids,
        )
    } else {
        (
            run_topic(matrix, ids, &relevance, &cfg.topic_config(topic, seed)),
            ids.to_vec(),
        )
    };
    let run = match run {
        Ok(run) => run,
        Err(Error::SkipTopic(t)) => {
            log::warn!("skipping topic {t}: no relevant documents");
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    log::info!(
        "topic {topic}: recall {:.3} after {} batches over {} documents",
        run.metrics.recall,
        run.metrics.batches,
        ids.len()
    );
    write_topic_artifacts(cfg, &run, space, medians, topic)?;
    Ok(Some(TopicOutcome {
        record: MetricsRecord::new(
            &cfg.corpus_name(),
            &cfg.vectorizer_name(),
            topic,
            &run.metrics,
        ),
        scaled_seed: run.selection.scaled,
    }))
}

fn write_topic_artifacts(
    cfg: &ExperimentConfig,
    run: &TopicRun,
    space: &FeatureSpace,
    medians: &[f64],
    topic: &str,
) -> Result<()> {
    let out = &cfg.out;
    let stem = topic_file_stem(topic);
    let mut w = create(&out.join("runs").join(format!("{stem}.jsonl")))?;
    run.state.write_log(&mut w)?;
    w.flush()?;

    let model = run.state.model();
    let mut w = create(&out.join("models").join(format!("{stem}.model")))?;
    model.save(&mut w)?;
    w.flush()?;

    let rects = model_rectangles(model)?;
    write_text(
        &out.join("rectangles").join(format!("{stem}.json")),
        &rectangles_to_json(&rects)?,
    )?;

    if let FeatureSpace::Terms(_) = space {
        let limit = (cfg.max_antecedents > 0).then_some(cfg.max_antecedents);
        let rules = rules_for_label(model, &label_for(true), space, medians, limit)?;
        if !rules.is_empty() {
            write_text(
                &out.join("rules").join(format!("{stem}.txt")),
                &render_rules_text(&rules)?,
            )?;
            write_text(
                &out.join("rules").join(format!("{stem}.json")),
                &render_rules_json(&rules)?,
            )?;
        }
    }
    Ok(())
}

fn print_summary(records: &[MetricsRecord], scaled: &[String]) {
    let width = records
        .iter()
        .map(|r| r.topic.len())
        .max()
        .unwrap_or(5)
        .max(5);
    println!(
        "{:<width$} {:>8} {:>8} {:>7} {:>7} {:>9} {:>6}",
        "topic", "relevant", "reviewed", "batches", "recall", "precision", "f1"
    );
    for r in records {
        println!(
            "{:<width$} {:>8} {:>8} {:>7} {:>7.3} {:>9.3} {:>6.3}",
            r.topic, r.relevant_total, r.documents_reviewed, r.batches, r.recall, r.precision, r.f1
        );
    }
    if !scaled.is_empty() {
        println!("seed scaled down for: {}", scaled.join(", "));
    }
}
