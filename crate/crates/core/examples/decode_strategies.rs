//! Argmax, temperature sampling and beam search on a hand-written model.
//!
//! The model corrupts "he go" style sentences: after the subject it prefers
//! the correct verb but leaves some mass on a bare form.
//!
//!     cargo run --example decode_strategies

use std::collections::BTreeMap;

use wrongsmith::corpus::{BOS, EOS};
use wrongsmith::decode::{decode_n, DecodeConfig, StepModel, Strategy};
use wrongsmith::Result;

const WORDS: [&str; 8] = ["<pad>", "<unk>", "<s>", "</s>", "he", "goes", "go", "."];

/// Next-word probabilities depend only on the previous word.
struct Bigram;

impl StepModel for Bigram {
    type State = ();

    fn vocab_size(&self) -> usize {
        WORDS.len()
    }

    fn start(&self, _source: &[usize]) -> Result<()> {
        Ok(())
    }

    fn step(&self, _state: &(), prev: usize) -> Result<(Vec<f64>, ())> {
        let mut p = vec![1e-6; WORDS.len()];
        match prev {
            BOS => p[4] = 1.0,
            4 => {
                p[5] = 0.7;
                p[6] = 0.3;
            }
            5 | 6 => {
                p[7] = 0.9;
                p[EOS] = 0.1;
            }
            _ => p[EOS] = 1.0,
        }
        let total: f64 = p.iter().sum();
        Ok((p.iter().map(|x| (x / total).ln()).collect(), ()))
    }
}

fn show(ids: &[usize]) -> String {
    ids.iter().map(|&i| WORDS[i]).collect::<Vec<_>>().join(" ")
}

pub fn run() -> Result<()> {
    let source = [4, 5, 7];
    let argmax = DecodeConfig {
        strategy: Strategy::Argmax,
        ..DecodeConfig::default()
    };
    let best = &decode_n(&Bigram, &source, &argmax, 1)?[0];
    println!("argmax: {}  (log p {:.3})", show(best.output_ids()), best.log_prob);

    let beam = DecodeConfig {
        strategy: Strategy::Beam,
        beam_width: 4,
        ..DecodeConfig::default()
    };
    println!("beam, 4 best:");
    for h in decode_n(&Bigram, &source, &beam, 4)? {
        println!("  {:<12} log p {:.3}", show(h.output_ids()), h.log_prob);
    }

    for tau in [1.0, 0.5, 0.05] {
        let cfg = DecodeConfig {
            strategy: Strategy::Temperature,
            tau,
            seed: 3,
            ..DecodeConfig::default()
        };
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for h in decode_n(&Bigram, &source, &cfg, 1000)? {
            *counts.entry(show(h.output_ids())).or_default() += 1;
        }
        println!("temperature {tau}, 1000 samples: {counts:?}");
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}
