use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use fuzzy_artmap::tar::TopicRunConfig;
use fuzzy_artmap::vectorize::DEFAULT_MAX_FEATURES;
use fuzzy_artmap::ArtParams;
use serde::{Deserialize, Serialize};

/// Bad configuration or arguments; exits with status 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VectorizerKind {
    Tfidf,
    Embedding,
}

/// `"all"` or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Topics {
    Keyword(String),
    List(Vec<String>),
}

impl Topics {
    pub fn parse_flag(s: &str) -> Self {
        if s == "all" {
            Topics::Keyword(s.to_owned())
        } else {
            Topics::List(
                s.split(',')
                    .map(|t| t.trim().to_owned())
                    .filter(|t| !t.is_empty())
                    .collect(),
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    /// Defaults to the corpus file stem.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_name: Option<String>,
    pub vectorizer: VectorizerKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<PathBuf>,
    pub max_features: usize,
    pub topics: Topics,
    pub downsample: f64,
    pub rho: f64,
    pub beta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub seed_relevant: usize,
    pub seed_nonrelevant: usize,
    pub rng_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Antecedents kept per exported rule; 0 keeps all.
    pub max_antecedents: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = ArtParams::<f64>::default();
        Self {
            corpus: None,
            corpus_name: None,
            vectorizer: VectorizerKind::Tfidf,
            embeddings: None,
            max_features: DEFAULT_MAX_FEATURES,
            topics: Topics::Keyword("all".into()),
            downsample: 1.0,
            rho: p.rho,
            beta: p.beta,
            alpha: p.alpha,
            epsilon: p.epsilon,
            batch_size: 100,
            seed_relevant: 10,
            seed_nonrelevant: 90,
            rng_seed: 0,
            workers: None,
            max_antecedents: 6,
            out: PathBuf::from("out"),
        }
    }
}

/// Flags shared by `vectorize` and `run`; each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus in JSON lines (`id`, `text`, `topics`).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub vectorizer: Option<VectorizerKind>,
    /// Word vectors in GloVe or word2vec text format.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Comma-separated topics, or `all`.
    #[arg(long)]
    pub topics: Option<String>,
    /// Per-topic stratified sampling fraction in (0, 1].
    #[arg(long)]
    pub downsample: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Base RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for topic runs (default: available cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn relative_to(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_relative() {
        base.join(p)
    } else {
        p
    }
}

impl ExperimentConfig {
    /// Config file (paths inside it relative to the file), then flags.
    pub fn resolve(o: &Overrides) -> anyhow::Result<Self> {
        let mut c = match &o.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    config_error(format!("cannot read config {}: {e}", path.display()))
                })?;
                let mut c: ExperimentConfig = toml::from_str(&text)
                    .map_err(|e| config_error(format!("config {}: {e}", path.display())))?;
                let base = path.parent().unwrap_or(Path::new(""));
                c.corpus = c.corpus.map(|p| relative_to(base, p));
                c.embeddings = c.embeddings.map(|p| relative_to(base, p));
                c.out = relative_to(base, c.out);
                c
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &o.corpus {
            c.corpus = Some(v.clone());
        }
        if let Some(v) = o.vectorizer {
            c.vectorizer = v;
        }
        if let Some(v) = &o.embeddings {
            c.embeddings = Some(v.clone());
        }
        if let Some(v) = &o.topics {
            c.topics = Topics::parse_flag(v);
        }
        if let Some(v) = o.downsample {
            c.downsample = v;
        }
        if let Some(v) = o.rho {
            c.rho = v;
        }
        if let Some(v) = o.beta {
            c.beta = v;
        }
        if let Some(v) = o.alpha {
            c.alpha = v;
        }
        if let Some(v) = o.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = o.seed {
            c.rng_seed = v;
        }
        if let Some(v) = o.workers {
            c.workers = Some(v);
        }
        if let Some(v) = &o.out {
            c.out = v.clone();
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.corpus.is_none() {
            return Err(config_error("`corpus` is required"));
        }
        match (self.vectorizer, &self.embeddings) {
            (VectorizerKind::Embedding, None) => {
                return Err(config_error(
                    "`embeddings` is required when vectorizer = \"embedding\"",
                ))
            }
            (VectorizerKind::Tfidf, Some(_)) => {
                return Err(config_error(
                    "`embeddings` is only used with vectorizer = \"embedding\"",
                ))
            }
            _ => {}
        }
        if let Topics::Keyword(k) = &self.topics {
            if k != "all" {
                return Err(config_error(format!(
                    "`topics` must be \"all\" or a list, got \"{k}\""
                )));
            }
        }
        if let Topics::List(t) = &self.topics {
            if t.is_empty() {
                return Err(config_error("`topics` list is empty"));
            }
        }
        if !(self.downsample > 0.0 && self.downsample <= 1.0) {
            return Err(config_error(format!(
                "`downsample` must lie in (0, 1], got {}",
                self.downsample
            )));
        }
        if self.max_features == 0 {
            return Err(config_error("`max_features` must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(config_error("`workers` must be at least 1"));
        }
        self.topic_config("", 0)
            .validate()
            .map_err(|e| config_error(e.to_string()))?;
        Ok(())
    }

    pub fn params(&self) -> ArtParams<f64> {
        ArtParams {
            rho: self.rho,
            beta: self.beta,
            alpha: self.alpha,
            epsilon: self.epsilon,
        }
    }

    pub fn topic_config(&self, topic: &str, rng_seed: u64) -> TopicRunConfig {
        TopicRunConfig {
            topic: topic.to_owned(),
            seed_relevant: self.seed_relevant,
            seed_nonrelevant: self.seed_nonrelevant,
            batch_size: self.batch_size,
            rng_seed,
            params: self.params(),
        }
    }

    pub fn corpus_path(&self) -> &Path {
        self.corpus.as_deref().expect("validated")
    }

    pub fn corpus_name(&self) -> String {
        self.corpus_name
            .clone()
            .unwrap_or_else(|| file_stem(self.corpus_path()))
    }

    /// `tfidf`, or the embedding file stem.
    pub fn vectorizer_name(&self) -> String {
        match (self.vectorizer, &self.embeddings) {
            (VectorizerKind::Embedding, Some(p)) => file_stem(p),
            _ => "tfidf".into(),
        }
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }
}

fn file_stem(p: &Path) -> String {
    p.file_stem()
        .map_or_else(|| "corpus".into(), |s| s.to_string_lossy().into_owned())
}

/// Per-topic seed: FNV-1a over the base seed and the topic name, so results
/// do not depend on topic order or worker count.
pub fn topic_seed(base: u64, topic: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in base.to_le_bytes().iter().chain(topic.as_bytes()) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
