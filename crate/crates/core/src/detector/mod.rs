//! Bidirectional LSTM token tagger predicting `c`/`i` per word.

mod io;
mod train;

use rayon::prelude::*;

use crate::corpus::{Label, LabeledSentence, Sentence, Vocabulary};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::lstm::{LstmState, LstmWeights, StepCache};
use crate::optim::ParamSet;
use crate::rng::seeded;

pub use io::{load_detector, read_detector, save_detector, write_detector, MAGIC};
pub use train::{train_detector, Alternation, DataSource, DetectorEpoch, DetectorTrainConfig, DetectorTraining};

/// Class index of `c` in the output layer.
pub const CORRECT: usize = 0;
/// Class index of `i` in the output layer.
pub const INCORRECT: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorParams {
    pub emb: Matrix,
    pub forward: LstmWeights,
    pub backward: LstmWeights,
    /// `2 × 2·cell`, input is `[h_forward; h_backward]`.
    pub out_w: Matrix,
    pub out_b: Vec<f64>,
}

impl ParamSet for DetectorParams {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![
            &self.emb.data,
            &self.forward.w.data,
            &self.forward.b,
            &self.backward.w.data,
            &self.backward.b,
            &self.out_w.data,
            &self.out_b,
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            &mut self.emb.data,
            &mut self.forward.w.data,
            &mut self.forward.b,
            &mut self.backward.w.data,
            &mut self.backward.b,
            &mut self.out_w.data,
            &mut self.out_b,
        ]
    }
}

struct Trace {
    fw_caches: Vec<StepCache>,
    bw_caches: Vec<StepCache>,
    features: Vec<Vec<f64>>,
    probs: Vec<[f64; 2]>,
}

impl DetectorParams {
    pub fn init(seed: u64, vocab: usize, emb: usize, cell: usize) -> Result<Self> {
        if vocab == 0 || emb == 0 || cell == 0 {
            return Err(Error::config("detector dimensions must be positive"));
        }
        let mut rng = seeded(seed);
        Ok(DetectorParams {
            emb: Matrix::uniform(vocab, emb, &mut rng),
            forward: LstmWeights::init(emb, cell, &mut rng),
            backward: LstmWeights::init(emb, cell, &mut rng),
            out_w: Matrix::uniform(2, 2 * cell, &mut rng),
            out_b: linalg::uniform_vec(2, &mut rng),
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.emb.rows
    }

    pub fn emb_size(&self) -> usize {
        self.emb.cols
    }

    pub fn cell_size(&self) -> usize {
        self.forward.hidden
    }

    pub fn zeros_like(&self) -> Self {
        DetectorParams {
            emb: self.emb.zeros_like(),
            forward: self.forward.zeros_like(),
            backward: self.backward.zeros_like(),
            out_w: self.out_w.zeros_like(),
            out_b: vec![0.0; 2],
        }
    }

    fn trace(&self, ids: &[usize]) -> Result<Trace> {
        if ids.is_empty() {
            return Err(Error::EmptyInput("cannot tag an empty sentence"));
        }
        if let Some(&bad) = ids.iter().find(|&&id| id >= self.vocab_size()) {
            return Err(Error::config(format!("token id {bad} out of range")));
        }
        let n = ids.len();
        let cell = self.cell_size();
        let mut fw_caches = Vec::with_capacity(n);
        let mut bw_caches = Vec::with_capacity(n);
        let mut features = vec![vec![0.0; 2 * cell]; n];
        let mut state = LstmState::zeros(cell);
        for (t, &id) in ids.iter().enumerate() {
            let (next, cache) = self.forward.step(self.emb.row(id), &state);
            features[t][..cell].copy_from_slice(&next.h);
            fw_caches.push(cache);
            state = next;
        }
        let mut state = LstmState::zeros(cell);
        for t in (0..n).rev() {
            let (next, cache) = self.backward.step(self.emb.row(ids[t]), &state);
            features[t][cell..].copy_from_slice(&next.h);
            bw_caches.push(cache);
            state = next;
        }
        let probs = features
            .iter()
            .map(|f| {
                let mut logits = self.out_w.matvec(f);
                linalg::add_assign(&mut logits, &self.out_b);
                let p = linalg::softmax(&logits);
                [p[0], p[1]]
            })
            .collect();
        Ok(Trace {
            fw_caches,
            bw_caches,
            features,
            probs,
        })
    }

    /// Class probabilities `[p(c), p(i)]` for every token.
    pub fn class_probs(&self, ids: &[usize]) -> Result<Vec<[f64; 2]>> {
        Ok(self.trace(ids)?.probs)
    }

    /// Probability of `i` for every token.
    pub fn forward_pass(&self, ids: &[usize]) -> Result<Vec<f64>> {
        Ok(self.class_probs(ids)?.iter().map(|p| p[INCORRECT]).collect())
    }

    /// Mean token cross-entropy of one sentence.
    pub fn loss(&self, ids: &[usize], labels: &[usize]) -> Result<f64> {
        let probs = self.class_probs(ids)?;
        check_labels(ids, labels)?;
        let nll: f64 = probs.iter().zip(labels).map(|(p, &l)| -p[l].ln()).sum();
        Ok(nll / ids.len() as f64)
    }

    fn backward_into(&self, ids: &[usize], labels: &[usize], weight: f64, grad: &mut DetectorParams) -> Result<f64> {
        check_labels(ids, labels)?;
        let trace = self.trace(ids)?;
        let n = ids.len();
        let cell = self.cell_size();
        let scale = weight / n as f64;
        let mut d_features = vec![vec![0.0; 2 * cell]; n];
        let mut nll = 0.0;
        for t in 0..n {
            let p = trace.probs[t];
            nll -= p[labels[t]].ln();
            let mut dlogits = [p[0] * scale, p[1] * scale];
            dlogits[labels[t]] -= scale;
            grad.out_w.outer_acc(&dlogits, &trace.features[t]);
            linalg::add_assign(&mut grad.out_b, &dlogits);
            self.out_w.matvec_t_acc(&dlogits, &mut d_features[t]);
        }
        let mut dh = vec![0.0; cell];
        let mut dc = vec![0.0; cell];
        for t in (0..n).rev() {
            linalg::add_assign(&mut dh, &d_features[t][..cell]);
            let (dx, dhp, dcp) = self.forward.backward(&trace.fw_caches[t], &dh, &dc, &mut grad.forward);
            linalg::add_assign(grad.emb.row_mut(ids[t]), &dx);
            dh = dhp;
            dc = dcp;
        }
        // bw_caches[k] processed token n-1-k.
        let mut dh = vec![0.0; cell];
        let mut dc = vec![0.0; cell];
        for k in (0..n).rev() {
            let t = n - 1 - k;
            linalg::add_assign(&mut dh, &d_features[t][cell..]);
            let (dx, dhp, dcp) = self
                .backward
                .backward(&trace.bw_caches[k], &dh, &dc, &mut grad.backward);
            linalg::add_assign(grad.emb.row_mut(ids[t]), &dx);
            dh = dhp;
            dc = dcp;
        }
        Ok(nll / n as f64)
    }

    /// Mean over sentences of per-sentence mean token cross-entropy, and its
    /// gradient. Per-sentence gradients are summed in input order.
    pub fn batch_gradient(&self, batch: &[(Vec<usize>, Vec<usize>)]) -> Result<(f64, DetectorParams)> {
        let weight = 1.0 / batch.len().max(1) as f64;
        let parts: Vec<(f64, DetectorParams)> = batch
            .par_iter()
            .map(|(ids, labels)| {
                let mut g = self.zeros_like();
                self.backward_into(ids, labels, weight, &mut g).map(|l| (l, g))
            })
            .collect::<Result<_>>()?;
        let mut total = self.zeros_like();
        let mut loss = 0.0;
        for (l, g) in &parts {
            loss += l;
            total.accumulate(g);
        }
        Ok((loss * weight, total))
    }
}

fn check_labels(ids: &[usize], labels: &[usize]) -> Result<()> {
    if ids.len() != labels.len() || labels.iter().any(|&l| l > INCORRECT) {
        return Err(Error::config("labels must be 0/1 and match the token count"));
    }
    Ok(())
}

pub(crate) fn label_index(label: Label) -> usize {
    match label {
        Label::Correct => CORRECT,
        Label::Incorrect => INCORRECT,
    }
}

/// A trained tagger: parameters plus the vocabulary they index.
#[derive(Debug, Clone, PartialEq)]
pub struct Detector {
    pub vocab: Vocabulary,
    pub params: DetectorParams,
}

impl Detector {
    pub fn new(vocab: Vocabulary, params: DetectorParams) -> Result<Self> {
        if vocab.len() != params.vocab_size() {
            return Err(Error::config(format!(
                "vocabulary has {} entries but detector expects {}",
                vocab.len(),
                params.vocab_size()
            )));
        }
        Ok(Detector { vocab, params })
    }

    pub fn probabilities<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<f64>> {
        let ids: Vec<usize> = tokens.iter().map(|t| self.vocab.id(t.as_ref())).collect();
        self.params.forward_pass(&ids)
    }

    /// Tags `i` wherever `p(i) ≥ threshold`.
    pub fn predict_labels(&self, sentence: &Sentence, threshold: f64) -> Result<LabeledSentence> {
        let probs = self.probabilities(sentence.tokens())?;
        let labels = probs
            .iter()
            .map(|&p| {
                if p >= threshold {
                    Label::Incorrect
                } else {
                    Label::Correct
                }
            })
            .collect();
        LabeledSentence::new(sentence.tokens().to_vec(), labels)
    }

    /// Re-tags every sentence of a gold set, keeping its tokens.
    pub fn predict_all(&self, data: &[LabeledSentence], threshold: f64) -> Result<Vec<LabeledSentence>> {
        data.par_iter()
            .map(|s| self.predict_labels(&s.sentence(), threshold))
            .collect()
    }
}
