#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashMap;

use wrongsmith::corpus::{BOS, EOS};
use wrongsmith::decode::StepModel;
use wrongsmith::linalg::log_softmax;
use wrongsmith::rng::{derive_seed, splitmix64};
use wrongsmith::Result;

/// A random autoregressive model whose next-token logits are a hash of the
/// emitted prefix.
pub struct RandomTable {
    pub vocab: usize,
    pub seed: u64,
    /// Logit range is `[-spread, spread]`.
    pub spread: f64,
}

impl RandomTable {
    pub fn log_probs(&self, prefix: &[usize]) -> Vec<f64> {
        let mut h = self.seed;
        for &t in prefix {
            h = derive_seed(h, t as u64 + 1);
        }
        let logits: Vec<f64> = (0..self.vocab)
            .map(|k| {
                let u = (splitmix64(derive_seed(h, 1000 + k as u64)) >> 11) as f64 / (1u64 << 53) as f64;
                (2.0 * u - 1.0) * self.spread
            })
            .collect();
        log_softmax(&logits)
    }
}

impl StepModel for RandomTable {
    type State = Option<Vec<usize>>;

    fn vocab_size(&self) -> usize {
        self.vocab
    }

    fn start(&self, _source: &[usize]) -> Result<Self::State> {
        Ok(None)
    }

    fn step(&self, state: &Self::State, prev: usize) -> Result<(Vec<f64>, Self::State)> {
        let prefix = match state {
            None => {
                assert_eq!(prev, BOS);
                Vec::new()
            }
            Some(p) => {
                let mut p = p.clone();
                p.push(prev);
                p
            }
        };
        Ok((self.log_probs(&prefix), Some(prefix)))
    }
}

/// Every complete output of at most `max_len` tokens with its score, best
/// first (ties by id sequence). An output is complete when it ends in EOS
/// or reaches `max_len`.
pub fn enumerate_outputs(model: &RandomTable, max_len: usize) -> Vec<(Vec<usize>, f64)> {
    fn walk(
        model: &RandomTable,
        max_len: usize,
        prefix: &mut Vec<usize>,
        score: f64,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        let lp = model.log_probs(prefix);
        for (tok, l) in lp.iter().enumerate() {
            prefix.push(tok);
            if tok == EOS || prefix.len() == max_len {
                out.push((prefix.clone(), score + l));
            } else {
                walk(model, max_len, prefix, score + l, out);
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    walk(model, max_len, &mut Vec::new(), 0.0, &mut out);
    out.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    out
}

/// Unit-cost edit distance by memoized recursion.
pub fn edit_distance_oracle(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&d) = memo.get(&(i, j)) {
            return d;
        }
        let d = (go(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]))
            .min(go(a, b, i + 1, j, memo) + 1)
            .min(go(a, b, i, j + 1, memo) + 1);
        memo.insert((i, j), d);
        d
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

/// All words of length `1..=max_len` over `alphabet` symbols.
pub fn all_words(alphabet: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..alphabet).map(move |c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn words(w: &[u8]) -> Vec<String> {
    w.iter().map(|c| ((b'a' + c) as char).to_string()).collect()
}
