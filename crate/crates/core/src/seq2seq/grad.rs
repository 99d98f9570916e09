//! Teacher-forced cross-entropy and its exact gradient.

use rayon::prelude::*;

use super::{Attention, Seq2SeqParams};
use crate::corpus::{BOS, EOS};
use crate::error::Result;
use crate::linalg;
use crate::lstm::{LstmState, StepCache};
use crate::optim::ParamSet;

/// A training pair already mapped to vocabulary ids (no BOS/EOS).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdPair {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
}

struct StepTrace {
    prev: usize,
    gold: usize,
    state_in: LstmState,
    attention: Attention,
    cache: StepCache,
    h_out: Vec<f64>,
    log_probs: Vec<f64>,
}

struct Trace {
    encoded: super::EncodedSource,
    steps: Vec<StepTrace>,
    loss: f64,
}

fn forward(params: &Seq2SeqParams, pair: &IdPair) -> Result<Trace> {
    let encoded = params.encode(&pair.source)?;
    let mut state = encoded.final_state.clone();
    let golds = pair.target.iter().copied().chain(std::iter::once(EOS));
    let mut prev = BOS;
    let mut steps = Vec::with_capacity(pair.target.len() + 1);
    let mut nll = 0.0;
    for gold in golds {
        let attention = params.attend(&state.h, &encoded)?;
        let step = params.decoder_step_raw(&state, prev, &attention.summary)?;
        nll -= step.log_probs[gold];
        let h_out = step.state.h.clone();
        steps.push(StepTrace {
            prev,
            gold,
            state_in: std::mem::replace(&mut state, step.state),
            attention,
            cache: step.cache,
            h_out,
            log_probs: step.log_probs,
        });
        prev = gold;
    }
    let loss = nll / steps.len() as f64;
    Ok(Trace { encoded, steps, loss })
}

/// Mean per-token negative log-likelihood of `target` followed by EOS.
pub fn loss(params: &Seq2SeqParams, pair: &IdPair) -> Result<f64> {
    forward(params, pair).map(|t| t.loss)
}

/// Mean of per-pair losses, summed in order.
pub fn batch_loss(params: &Seq2SeqParams, pairs: &[IdPair]) -> Result<f64> {
    let losses: Vec<f64> = pairs.par_iter().map(|p| loss(params, p)).collect::<Result<_>>()?;
    Ok(losses.iter().sum::<f64>() / losses.len().max(1) as f64)
}

/// Fraction of target tokens (EOS included) that are the teacher-forced argmax.
pub fn token_accuracy(params: &Seq2SeqParams, pairs: &[IdPair]) -> Result<f64> {
    let mut hits = 0usize;
    let mut total = 0usize;
    for pair in pairs {
        for step in forward(params, pair)?.steps {
            hits += usize::from(linalg::argmax(&step.log_probs) == step.gold);
            total += 1;
        }
    }
    Ok(hits as f64 / total.max(1) as f64)
}

/// Gradient of `loss(params, pair) * weight`, accumulated into `grad`.
fn backward(params: &Seq2SeqParams, pair: &IdPair, weight: f64, grad: &mut Seq2SeqParams) -> Result<f64> {
    let trace = forward(params, pair)?;
    let cell = params.dims.cell;
    let n_src = trace.encoded.contexts.len();
    let scale = weight / trace.steps.len() as f64;

    let mut d_contexts = vec![vec![0.0; cell]; n_src];
    let mut dh = vec![0.0; cell];
    let mut dc = vec![0.0; cell];

    for step in trace.steps.iter().rev() {
        // output layer
        let mut dlogits: Vec<f64> = step.log_probs.iter().map(|lp| lp.exp() * scale).collect();
        dlogits[step.gold] -= scale;
        grad.out_w.outer_acc(&dlogits, &step.h_out);
        linalg::add_assign(&mut grad.out_b, &dlogits);
        params.out_w.matvec_t_acc(&dlogits, &mut dh);

        // decoder LSTM
        let (dx, dh_prev, dc_prev) = params.decoder.backward(&step.cache, &dh, &dc, &mut grad.decoder);
        let emb = params.dims.emb;
        linalg::add_assign(grad.tgt_emb.row_mut(step.prev), &dx[..emb]);
        let d_summary = &dx[emb..];
        dh = dh_prev;
        dc = dc_prev;

        // attention: summary = Σ α_j ctx_j, α = softmax(v · tanh(Ws s + Wc ctx_j))
        let att = &step.attention;
        let d_alpha: Vec<f64> = trace
            .encoded
            .contexts
            .iter()
            .map(|c| linalg::dot(d_summary, c))
            .collect();
        let mean = linalg::dot(&att.weights, &d_alpha);
        let mut d_query = vec![0.0; cell];
        for j in 0..n_src {
            linalg::axpy(att.weights[j], d_summary, &mut d_contexts[j]);
            let d_score = att.weights[j] * (d_alpha[j] - mean);
            if d_score == 0.0 {
                continue;
            }
            let u = &att.hidden[j];
            linalg::axpy(d_score, u, &mut grad.att_v);
            let d_pre: Vec<f64> = u
                .iter()
                .zip(&params.att_v)
                .map(|(uk, vk)| d_score * vk * (1.0 - uk * uk))
                .collect();
            linalg::add_assign(&mut d_query, &d_pre);
            grad.att_ctx.outer_acc(&d_pre, &trace.encoded.contexts[j]);
            params.att_ctx.matvec_t_acc(&d_pre, &mut d_contexts[j]);
        }
        grad.att_state.outer_acc(&d_query, &step.state_in.h);
        params.att_state.matvec_t_acc(&d_query, &mut dh);
    }

    // The decoder starts from the encoder's final state.
    for j in (0..n_src).rev() {
        linalg::add_assign(&mut dh, &d_contexts[j]);
        let (dx, dh_prev, dc_prev) = params
            .encoder
            .backward(&trace.encoded.caches[j], &dh, &dc, &mut grad.encoder);
        linalg::add_assign(grad.src_emb.row_mut(pair.source[j]), &dx);
        dh = dh_prev;
        dc = dc_prev;
    }
    Ok(trace.loss)
}

/// Exact gradient of [`batch_loss`]. Per-pair gradients may be computed in
/// parallel but are summed in input order.
pub fn batch_gradient(params: &Seq2SeqParams, pairs: &[IdPair]) -> Result<(f64, Seq2SeqParams)> {
    let weight = 1.0 / pairs.len().max(1) as f64;
    let parts: Vec<(f64, Seq2SeqParams)> = pairs
        .par_iter()
        .map(|p| {
            let mut g = params.zeros_like();
            backward(params, p, weight, &mut g).map(|l| (l, g))
        })
        .collect::<Result<_>>()?;
    let mut total = params.zeros_like();
    let mut loss = 0.0;
    for (l, g) in &parts {
        loss += l;
        total.accumulate(g);
    }
    Ok((loss * weight, total))
}
