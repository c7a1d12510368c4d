//! From raw text to `[0, 1]`-bounded feature vectors.

mod corpus;
mod embedding;
mod matrix;
mod sample;
mod tfidf;
mod tokenize;

pub use corpus::{ingest_newsgroups, Corpus, Document};
pub use embedding::{
    embed_document, load_embeddings, EmbeddingScaler, EmbeddingTable, EmbeddingVectorizer,
};
pub use matrix::{FeatureMatrix, Scaling, SparseRow};
pub use sample::{stratified_downsample, stratified_sample_indices};
pub use tfidf::{fit_tfidf, tfidf_vector, Vocabulary, DEFAULT_MAX_FEATURES};
pub use tokenize::tokenize;
