use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Corpus;
use crate::error::{Error, Result};

/// Samples `round(fraction * n)` documents independently from the documents in
/// `topic` and from the rest, keeping corpus order. Deterministic per seed.
pub fn stratified_downsample(
    corpus: &Corpus,
    fraction: f64,
    topic: &str,
    rng_seed: u64,
) -> Result<Corpus> {
    let keep = stratified_sample_indices(&corpus.relevance(topic), fraction, rng_seed)?;
    Ok(corpus.subset(&keep))
}

/// Index form of [`stratified_downsample`]: sorted positions to keep, strata
/// given by `relevance`.
pub fn stratified_sample_indices(
    relevance: &[bool],
    fraction: f64,
    rng_seed: u64,
) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParam {
            name: "fraction",
            reason: format!("{fraction} is outside (0, 1]"),
        });
    }
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..relevance.len()).partition(|&i| relevance[i]);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut keep = Vec::new();
    for stratum in [pos, neg] {
        let n = ((fraction * stratum.len() as f64).round() as usize).min(stratum.len());
        keep.extend(
            sample(&mut rng, stratum.len(), n)
                .into_iter()
                .map(|k| stratum[k]),
        );
    }
    keep.sort_unstable();
    Ok(keep)
}
