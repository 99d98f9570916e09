//! Attentive encoder-decoder used as the corruption model.
//!
//! A single forward LSTM encodes the clean sentence into one context vector
//! per token. At every output step the previous decoder hidden state scores
//! each context with an additive MLP, the softmax-weighted summary is fed to
//! the decoder LSTM together with the embedding of the last emitted token, and
//! a linear projection of the new hidden state gives a distribution over the
//! vocabulary.

mod grad;
mod io;
mod train;

use std::sync::Arc;

use crate::corpus::{Sentence, Vocabulary, BOS, UNK};
use crate::decode::StepModel;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::lstm::{LstmState, LstmWeights, StepCache};
use crate::optim::ParamSet;
use crate::rng::seeded;

pub use grad::{batch_gradient, batch_loss, loss, token_accuracy, IdPair};
pub use io::{load_corruptor, read_corruptor, save_corruptor, write_corruptor, MAGIC};
pub use train::{to_id_pairs, train, train_corruptor, EpochRecord, TrainConfig, TrainOutcome};

/// Sizes of every tensor in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub vocab: usize,
    pub emb: usize,
    pub cell: usize,
}

impl Dims {
    pub fn validate(&self) -> Result<()> {
        if self.vocab == 0 || self.emb == 0 || self.cell == 0 {
            return Err(Error::config(format!("all dimensions must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seq2SeqParams {
    pub dims: Dims,
    pub src_emb: Matrix,
    pub tgt_emb: Matrix,
    pub encoder: LstmWeights,
    /// Input is `[target embedding; attention summary]`.
    pub decoder: LstmWeights,
    /// Projects the decoder state inside the alignment scorer.
    pub att_state: Matrix,
    /// Projects each context vector inside the alignment scorer.
    pub att_ctx: Matrix,
    pub att_v: Vec<f64>,
    pub out_w: Matrix,
    pub out_b: Vec<f64>,
}

impl ParamSet for Seq2SeqParams {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![
            &self.src_emb.data,
            &self.tgt_emb.data,
            &self.encoder.w.data,
            &self.encoder.b,
            &self.decoder.w.data,
            &self.decoder.b,
            &self.att_state.data,
            &self.att_ctx.data,
            &self.att_v,
            &self.out_w.data,
            &self.out_b,
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            &mut self.src_emb.data,
            &mut self.tgt_emb.data,
            &mut self.encoder.w.data,
            &mut self.encoder.b,
            &mut self.decoder.w.data,
            &mut self.decoder.b,
            &mut self.att_state.data,
            &mut self.att_ctx.data,
            &mut self.att_v,
            &mut self.out_w.data,
            &mut self.out_b,
        ]
    }
}

/// Encoder output for one source sentence.
#[derive(Debug, Clone)]
pub struct EncodedSource {
    pub contexts: Vec<Vec<f64>>,
    /// `att_ctx · context_j`, precomputed once per sentence.
    pub keys: Vec<Vec<f64>>,
    pub final_state: LstmState,
    pub(crate) caches: Vec<StepCache>,
}

#[derive(Debug, Clone)]
pub struct Attention {
    pub weights: Vec<f64>,
    pub summary: Vec<f64>,
    /// `tanh(att_state · s + key_j)` per context, kept for backprop.
    pub(crate) hidden: Vec<Vec<f64>>,
}

/// A probability vector over the target vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates non-negativity and normalization (±1e-9).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput("distribution has no components"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invariant("distribution has a negative or non-finite component"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invariant(format!("distribution sums to {total}")));
        }
        Ok(Distribution(probs))
    }

    pub(crate) fn from_log_probs(log_probs: &[f64]) -> Self {
        Distribution(log_probs.iter().map(|lp| lp.exp()).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Output of one decoder step with everything backprop needs.
pub(crate) struct DecoderStep {
    pub state: LstmState,
    pub cache: StepCache,
    pub log_probs: Vec<f64>,
}

impl Seq2SeqParams {
    /// Uniform(−0.08, 0.08) initialization from the seeded generator.
    pub fn init(seed: u64, dims: Dims) -> Result<Self> {
        dims.validate()?;
        let mut rng = seeded(seed);
        let Dims { vocab, emb, cell } = dims;
        Ok(Seq2SeqParams {
            dims,
            src_emb: Matrix::uniform(vocab, emb, &mut rng),
            tgt_emb: Matrix::uniform(vocab, emb, &mut rng),
            encoder: LstmWeights::init(emb, cell, &mut rng),
            decoder: LstmWeights::init(emb + cell, cell, &mut rng),
            att_state: Matrix::uniform(cell, cell, &mut rng),
            att_ctx: Matrix::uniform(cell, cell, &mut rng),
            att_v: linalg::uniform_vec(cell, &mut rng),
            out_w: Matrix::uniform(vocab, cell, &mut rng),
            out_b: linalg::uniform_vec(vocab, &mut rng),
        })
    }

    pub fn zeros_like(&self) -> Self {
        Seq2SeqParams {
            dims: self.dims,
            src_emb: self.src_emb.zeros_like(),
            tgt_emb: self.tgt_emb.zeros_like(),
            encoder: self.encoder.zeros_like(),
            decoder: self.decoder.zeros_like(),
            att_state: self.att_state.zeros_like(),
            att_ctx: self.att_ctx.zeros_like(),
            att_v: vec![0.0; self.att_v.len()],
            out_w: self.out_w.zeros_like(),
            out_b: vec![0.0; self.out_b.len()],
        }
    }

    fn check_token(&self, id: usize) -> Result<()> {
        if id >= self.dims.vocab {
            return Err(Error::config(format!(
                "token id {id} out of range for vocabulary of {}",
                self.dims.vocab
            )));
        }
        Ok(())
    }

    /// Runs the encoder over source token ids.
    pub fn encode(&self, source: &[usize]) -> Result<EncodedSource> {
        if source.is_empty() {
            return Err(Error::EmptyInput("cannot encode an empty sentence"));
        }
        let mut state = LstmState::zeros(self.dims.cell);
        let mut contexts = Vec::with_capacity(source.len());
        let mut caches = Vec::with_capacity(source.len());
        for &id in source {
            self.check_token(id)?;
            let (next, cache) = self.encoder.step(self.src_emb.row(id), &state);
            contexts.push(next.h.clone());
            caches.push(cache);
            state = next;
        }
        let keys = contexts.iter().map(|c| self.att_ctx.matvec(c)).collect();
        Ok(EncodedSource {
            contexts,
            keys,
            final_state: state,
            caches,
        })
    }

    /// Additive attention of decoder hidden state `state_h` over the contexts.
    pub fn attend(&self, state_h: &[f64], encoded: &EncodedSource) -> Result<Attention> {
        if encoded.contexts.is_empty() {
            return Err(Error::config("attention needs at least one context"));
        }
        if state_h.len() != self.dims.cell {
            return Err(Error::config(format!(
                "decoder state has {} entries, expected {}",
                state_h.len(),
                self.dims.cell
            )));
        }
        let query = self.att_state.matvec(state_h);
        let mut hidden = Vec::with_capacity(encoded.keys.len());
        let mut scores = Vec::with_capacity(encoded.keys.len());
        for key in &encoded.keys {
            let u: Vec<f64> = query.iter().zip(key).map(|(q, k)| (q + k).tanh()).collect();
            scores.push(linalg::dot(&self.att_v, &u));
            hidden.push(u);
        }
        let weights = linalg::softmax(&scores);
        let mut summary = vec![0.0; self.dims.cell];
        for (w, ctx) in weights.iter().zip(&encoded.contexts) {
            linalg::axpy(*w, ctx, &mut summary);
        }
        Ok(Attention {
            weights,
            summary,
            hidden,
        })
    }

    pub(crate) fn decoder_step_raw(
        &self,
        state: &LstmState,
        prev_token: usize,
        summary: &[f64],
    ) -> Result<DecoderStep> {
        self.check_token(prev_token)?;
        let mut input = Vec::with_capacity(self.dims.emb + self.dims.cell);
        input.extend_from_slice(self.tgt_emb.row(prev_token));
        input.extend_from_slice(summary);
        let (next, cache) = self.decoder.step(&input, state);
        let mut logits = self.out_w.matvec(&next.h);
        linalg::add_assign(&mut logits, &self.out_b);
        Ok(DecoderStep {
            state: next,
            cache,
            log_probs: linalg::log_softmax(&logits),
        })
    }

    /// One decoder step: LSTM over `[embedding(prev); summary]`, then the
    /// output softmax.
    pub fn decoder_step(
        &self,
        state: &LstmState,
        prev_token: usize,
        summary: &[f64],
    ) -> Result<(Distribution, LstmState)> {
        let step = self.decoder_step_raw(state, prev_token, summary)?;
        Ok((Distribution::from_log_probs(&step.log_probs), step.state))
    }

    /// Teacher-forced log-probability of `target` (which should include the
    /// terminating EOS if one was emitted), summed left to right.
    pub fn sequence_log_prob(&self, source: &[usize], target: &[usize]) -> Result<f64> {
        let encoded = self.encode(source)?;
        let mut state = encoded.final_state.clone();
        let mut prev = BOS;
        let mut total = 0.0;
        for &tok in target {
            self.check_token(tok)?;
            let att = self.attend(&state.h, &encoded)?;
            let step = self.decoder_step_raw(&state, prev, &att.summary)?;
            total += step.log_probs[tok];
            state = step.state;
            prev = tok;
        }
        Ok(total)
    }

    /// Source position receiving the largest attention weight at each output
    /// step when teacher-forcing `target`.
    pub fn attention_peaks(&self, source: &[usize], target: &[usize]) -> Result<Vec<usize>> {
        let encoded = self.encode(source)?;
        let mut state = encoded.final_state.clone();
        let mut prev = BOS;
        let mut peaks = Vec::with_capacity(target.len());
        for &tok in target {
            let att = self.attend(&state.h, &encoded)?;
            peaks.push(linalg::argmax(&att.weights));
            state = self.decoder_step_raw(&state, prev, &att.summary)?.state;
            prev = tok;
        }
        Ok(peaks)
    }
}

/// Decoder state threaded through [`StepModel`]: the shared encoding plus
/// the recurrent state.
#[derive(Debug, Clone)]
pub struct Seq2SeqState {
    encoded: Arc<EncodedSource>,
    lstm: LstmState,
}

impl StepModel for Seq2SeqParams {
    type State = Seq2SeqState;

    fn vocab_size(&self) -> usize {
        self.dims.vocab
    }

    fn start(&self, source: &[usize]) -> Result<Seq2SeqState> {
        let encoded = self.encode(source)?;
        let lstm = encoded.final_state.clone();
        Ok(Seq2SeqState {
            encoded: Arc::new(encoded),
            lstm,
        })
    }

    fn step(&self, state: &Seq2SeqState, prev_token: usize) -> Result<(Vec<f64>, Seq2SeqState)> {
        let att = self.attend(&state.lstm.h, &state.encoded)?;
        let step = self.decoder_step_raw(&state.lstm, prev_token, &att.summary)?;
        Ok((
            step.log_probs,
            Seq2SeqState {
                encoded: Arc::clone(&state.encoded),
                lstm: step.state,
            },
        ))
    }
}

/// A trained corruption model: parameters plus the vocabulary they index.
#[derive(Debug, Clone, PartialEq)]
pub struct Corruptor {
    pub vocab: Vocabulary,
    pub params: Seq2SeqParams,
}

impl Corruptor {
    pub fn new(vocab: Vocabulary, params: Seq2SeqParams) -> Result<Self> {
        if vocab.len() != params.dims.vocab {
            return Err(Error::config(format!(
                "vocabulary has {} entries but model expects {}",
                vocab.len(),
                params.dims.vocab
            )));
        }
        Ok(Corruptor { vocab, params })
    }

    pub fn encode_sentence(&self, sentence: &Sentence) -> Vec<usize> {
        self.vocab.encode(sentence)
    }

    /// Maps generated ids (EOS already stripped) back to surface tokens. An
    /// emitted UNK copies the source word the decoder attended to most.
    pub fn render(&self, source: &Sentence, ids: &[usize]) -> Result<Vec<String>> {
        let peaks = if ids.contains(&UNK) {
            self.params.attention_peaks(&self.encode_sentence(source), ids)?
        } else {
            Vec::new()
        };
        Ok(ids
            .iter()
            .enumerate()
            .map(|(k, &id)| match id {
                UNK => source.tokens()[peaks[k]].clone(),
                _ => self.vocab.token(id).unwrap_or("<unk>").to_string(),
            })
            .collect())
    }
}
