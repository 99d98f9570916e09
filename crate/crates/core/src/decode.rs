//! Argmax, temperature-sampling and beam-search decoding.
//!
//! Decoders are generic over [`StepModel`], a left-to-right conditional
//! model that returns log-probabilities over the vocabulary for the next
//! token. The trained seq2seq network implements it, and so can small
//! hand-written tables in tests.

use std::cmp::Ordering;

use rand::Rng;

use crate::corpus::{BOS, EOS};
use crate::error::{Error, Result};
use crate::linalg::{self, logsumexp};
use crate::rng::seeded;
use crate::seq2seq::Distribution;

pub trait StepModel {
    type State: Clone;

    fn vocab_size(&self) -> usize;

    /// Decoder state before the first output token.
    fn start(&self, source: &[usize]) -> Result<Self::State>;

    /// Log-probabilities of the next token given the last one.
    fn step(&self, state: &Self::State, prev_token: usize) -> Result<(Vec<f64>, Self::State)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Argmax,
    Temperature,
    Beam,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "am" | "argmax" => Ok(Strategy::Argmax),
            "ts" | "temperature" => Ok(Strategy::Temperature),
            "bs" | "beam" => Ok(Strategy::Beam),
            other => Err(Error::config(format!(
                "unknown strategy {other:?} (expected am, ts or bs)"
            ))),
        }
    }
}

pub const DEFAULT_TAU: f64 = 0.05;
pub const DEFAULT_BEAM_WIDTH: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    pub strategy: Strategy,
    pub tau: f64,
    pub beam_width: usize,
    /// Maximum emitted tokens, EOS included. `None` means `2·|source| + 5`.
    pub max_len: Option<usize>,
    pub seed: u64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            strategy: Strategy::Argmax,
            tau: DEFAULT_TAU,
            beam_width: DEFAULT_BEAM_WIDTH,
            max_len: None,
            seed: 0,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau.is_nan() || self.tau <= 0.0 {
            return Err(Error::config(format!("temperature must be positive, got {}", self.tau)));
        }
        if self.beam_width < 1 {
            return Err(Error::config("beam width must be at least 1"));
        }
        if self.max_len == Some(0) {
            return Err(Error::config("max_len must be at least 1"));
        }
        Ok(())
    }

    pub fn max_len_for(&self, source_len: usize) -> usize {
        self.max_len.unwrap_or(2 * source_len + 5)
    }
}

/// A (possibly partial) output sequence.
#[derive(Debug, Clone)]
pub struct Hypothesis<S> {
    /// Emitted ids, including a final EOS if one was produced.
    pub token_ids: Vec<usize>,
    /// Sum of token log-probabilities in nats.
    pub log_prob: f64,
    pub state: S,
    pub finished: bool,
}

impl<S> Hypothesis<S> {
    /// Emitted ids without the terminating EOS.
    pub fn output_ids(&self) -> &[usize] {
        match self.token_ids.last() {
            Some(&EOS) => &self.token_ids[..self.token_ids.len() - 1],
            _ => &self.token_ids,
        }
    }
}

/// Reshapes `p` by temperature: `p̃_i ∝ p_i^(1/τ)`, evaluated in log space.
pub fn apply_temperature(p: &Distribution, tau: f64) -> Result<Distribution> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::config(format!("temperature must be positive, got {tau}")));
    }
    let logs: Vec<f64> = p.probs().iter().map(|x| x.ln()).collect();
    Ok(Distribution::from_log_probs(&tempered_log_probs(&logs, tau)))
}

fn tempered_log_probs(log_probs: &[f64], tau: f64) -> Vec<f64> {
    let scaled: Vec<f64> = log_probs.iter().map(|lp| lp / tau).collect();
    let lse = logsumexp(&scaled);
    scaled.iter().map(|s| s - lse).collect()
}

/// Inverse-CDF draw over ids in ascending order.
fn sample_index(log_probs: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, lp) in log_probs.iter().enumerate() {
        let p = lp.exp();
        if p > 0.0 {
            last_positive = i;
        }
        cum += p;
        if u < cum {
            return i;
        }
    }
    last_positive
}

fn check_source(source: &[usize]) -> Result<()> {
    if source.is_empty() {
        return Err(Error::EmptyInput("cannot decode an empty source"));
    }
    Ok(())
}

fn decode_by<M, F>(model: &M, source: &[usize], max_len: usize, mut choose: F) -> Result<Hypothesis<M::State>>
where
    M: StepModel,
    F: FnMut(&[f64]) -> usize,
{
    check_source(source)?;
    let mut hyp = Hypothesis {
        token_ids: Vec::new(),
        log_prob: 0.0,
        state: model.start(source)?,
        finished: false,
    };
    let mut prev = BOS;
    while !hyp.finished {
        let (log_probs, next) = model.step(&hyp.state, prev)?;
        let tok = choose(&log_probs);
        hyp.log_prob += log_probs[tok];
        hyp.token_ids.push(tok);
        hyp.state = next;
        hyp.finished = tok == EOS || hyp.token_ids.len() >= max_len;
        prev = tok;
    }
    Ok(hyp)
}

/// Emits the most likely token at every step (ties to the lowest id).
pub fn greedy_decode<M: StepModel>(model: &M, source: &[usize], config: &DecodeConfig) -> Result<Hypothesis<M::State>> {
    config.validate()?;
    decode_by(model, source, config.max_len_for(source.len()), linalg::argmax)
}

/// Samples every token from the temperature-reshaped distribution. The
/// reported `log_prob` is under the untempered model.
pub fn temperature_decode<M: StepModel>(
    model: &M,
    source: &[usize],
    config: &DecodeConfig,
) -> Result<Hypothesis<M::State>> {
    config.validate()?;
    let mut rng = seeded(config.seed);
    let tau = config.tau;
    decode_by(model, source, config.max_len_for(source.len()), |lp| {
        sample_index(&tempered_log_probs(lp, tau), rng.random::<f64>())
    })
}

fn better<S>(a: &Hypothesis<S>, b: &Hypothesis<S>) -> Ordering {
    b.log_prob
        .partial_cmp(&a.log_prob)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.token_ids.cmp(&b.token_ids))
}

/// Beam search without length normalization. Finished hypotheses stay in the
/// beam and compete on raw score; returns up to `beam_width` hypotheses,
/// best first.
pub fn beam_decode<M: StepModel>(
    model: &M,
    source: &[usize],
    config: &DecodeConfig,
) -> Result<Vec<Hypothesis<M::State>>> {
    config.validate()?;
    check_source(source)?;
    let width = config.beam_width;
    let max_len = config.max_len_for(source.len());
    let mut beam = vec![Hypothesis {
        token_ids: Vec::new(),
        log_prob: 0.0,
        state: model.start(source)?,
        finished: false,
    }];
    while beam.iter().any(|h| !h.finished) {
        let mut candidates = Vec::with_capacity(beam.len() * model.vocab_size());
        for hyp in beam {
            if hyp.finished {
                candidates.push(hyp);
                continue;
            }
            let prev = hyp.token_ids.last().copied().unwrap_or(BOS);
            let (log_probs, next) = model.step(&hyp.state, prev)?;
            for (tok, lp) in log_probs.iter().enumerate() {
                let mut token_ids = Vec::with_capacity(hyp.token_ids.len() + 1);
                token_ids.extend_from_slice(&hyp.token_ids);
                token_ids.push(tok);
                let finished = tok == EOS || token_ids.len() >= max_len;
                candidates.push(Hypothesis {
                    token_ids,
                    log_prob: hyp.log_prob + lp,
                    state: next.clone(),
                    finished,
                });
            }
        }
        if candidates.len() > width {
            candidates.select_nth_unstable_by(width - 1, better);
            candidates.truncate(width);
        }
        candidates.sort_by(better);
        beam = candidates;
    }
    Ok(beam)
}

/// Dispatches on `config.strategy`, returning up to `samples` hypotheses.
/// Argmax yields one; temperature sampling draws `samples` streams seeded
/// from `config.seed`; beam search returns the `samples` best of a beam of
/// width `max(beam_width, samples)`.
pub fn decode_n<M: StepModel>(
    model: &M,
    source: &[usize],
    config: &DecodeConfig,
    samples: usize,
) -> Result<Vec<Hypothesis<M::State>>> {
    match config.strategy {
        Strategy::Argmax => Ok(vec![greedy_decode(model, source, config)?]),
        Strategy::Temperature => (0..samples as u64)
            .map(|k| {
                let cfg = DecodeConfig {
                    seed: crate::rng::derive_seed(config.seed, k),
                    ..config.clone()
                };
                temperature_decode(model, source, &cfg)
            })
            .collect(),
        Strategy::Beam => {
            let cfg = DecodeConfig {
                beam_width: config.beam_width.max(samples),
                ..config.clone()
            };
            let mut hyps = beam_decode(model, source, &cfg)?;
            hyps.truncate(samples);
            Ok(hyps)
        }
    }
}

/// Teacher-forced log-probability of `token_ids` under `model`.
pub fn score_sequence<M: StepModel>(model: &M, source: &[usize], token_ids: &[usize]) -> Result<f64> {
    let mut state = model.start(source)?;
    let mut prev = BOS;
    let mut total = 0.0;
    for &tok in token_ids {
        let (lp, next) = model.step(&state, prev)?;
        total += lp[tok];
        state = next;
        prev = tok;
    }
    Ok(total)
}
