//! Synthetic dataset construction: corrupt clean text, label, filter.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::align::{count_errors, label_tokens};
use crate::corpus::{LabeledSentence, ParallelPair, Sentence};
use crate::decode::{decode_n, DecodeConfig};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::seq2seq::Corruptor;

pub const DEFAULT_SAMPLES: usize = 10;
pub const DEFAULT_MAX_ERRORS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    pub decode: DecodeConfig,
    /// Corruptions requested per clean sentence.
    pub samples_per_source: usize,
    /// Instances with more `i` labels than this are dropped.
    pub max_errors: usize,
    pub dedup: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            decode: DecodeConfig::default(),
            samples_per_source: DEFAULT_SAMPLES,
            max_errors: DEFAULT_MAX_ERRORS,
            dedup: true,
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_source < 1 {
            return Err(Error::config("samples per source must be at least 1"));
        }
        self.decode.validate()
    }
}

/// Generates corruptions for every clean sentence, ordered by
/// (source index, rank). Sampling for sentence `k` uses its own stream
/// derived from `(decode.seed, k)`, so the result does not depend on
/// scheduling.
pub fn corrupt_corpus(model: &Corruptor, clean: &[Sentence], cfg: &BuildConfig) -> Result<Vec<ParallelPair>> {
    cfg.validate()?;
    let per_source: Vec<Vec<ParallelPair>> = clean
        .par_iter()
        .enumerate()
        .map(|(k, source)| {
            let decode = DecodeConfig {
                seed: derive_seed(cfg.decode.seed, k as u64),
                ..cfg.decode.clone()
            };
            let ids = model.encode_sentence(source);
            let hyps = decode_n(&model.params, &ids, &decode, cfg.samples_per_source)?;
            let mut pairs = Vec::with_capacity(hyps.len());
            for hyp in hyps {
                let tokens = model.render(source, hyp.output_ids())?;
                if tokens.is_empty() {
                    log::warn!("skipping empty corruption of sentence {k}: {source}");
                    continue;
                }
                pairs.push(ParallelPair {
                    source: source.clone(),
                    target: Sentence::new(tokens)?,
                    score: Some(hyp.log_prob),
                });
            }
            Ok(pairs)
        })
        .collect::<Result<_>>()?;
    Ok(per_source.into_iter().flatten().collect())
}

/// Labels each pair, then drops exact duplicates (first occurrence wins) and
/// instances with more than `max_errors` errors. Order is preserved.
pub fn build_labeled(pairs: &[ParallelPair], cfg: &BuildConfig) -> Result<Vec<LabeledSentence>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for pair in pairs {
        let labeled = label_tokens(&pair.source, &pair.target)?;
        if count_errors(&labeled) > cfg.max_errors {
            continue;
        }
        if cfg.dedup && !seen.insert(labeled.clone()) {
            continue;
        }
        out.push(labeled);
    }
    Ok(out)
}
