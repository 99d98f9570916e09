mod common;

use common::{enumerate_outputs, RandomTable};
use proptest::prelude::*;
use wrongsmith::decode::{
    apply_temperature, beam_decode, greedy_decode, score_sequence, DecodeConfig, Strategy as Decoding,
};
use wrongsmith::seq2seq::Distribution;

fn config(beam_width: usize, max_len: usize) -> DecodeConfig {
    DecodeConfig {
        strategy: Decoding::Beam,
        beam_width,
        max_len: Some(max_len),
        ..DecodeConfig::default()
    }
}

#[test]
fn width_one_beam_is_greedy() {
    for seed in 0..100 {
        let model = RandomTable {
            vocab: 4 + (seed as usize % 4),
            seed,
            spread: 3.0,
        };
        let cfg = config(1, 8);
        let beam = beam_decode(&model, &[4], &cfg).unwrap();
        let greedy = greedy_decode(&model, &[4], &cfg).unwrap();
        assert_eq!(beam.len(), 1);
        assert_eq!(beam[0].token_ids, greedy.token_ids, "seed {seed}");
        assert!((beam[0].log_prob - greedy.log_prob).abs() < 1e-12);
    }
}

#[test]
fn wide_beam_matches_exhaustive_enumeration() {
    for seed in 0..40 {
        for vocab in 4..=5 {
            for max_len in 1..=4 {
                let model = RandomTable {
                    vocab,
                    seed,
                    spread: 2.0,
                };
                let width = vocab.pow(max_len as u32);
                let beam = beam_decode(&model, &[4], &config(width, max_len)).unwrap();
                let oracle = enumerate_outputs(&model, max_len);
                assert_eq!(beam.len(), oracle.len().min(width));
                for (h, (ids, score)) in beam.iter().zip(&oracle) {
                    assert_eq!(&h.token_ids, ids, "seed {seed} |V| {vocab} max_len {max_len}");
                    assert!((h.log_prob - score).abs() < 1e-12);
                    assert!((score_sequence(&model, &[4], ids).unwrap() - score).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn temperature_hand_cases() {
    let p = Distribution::new(vec![0.5, 0.25, 0.25]).unwrap();
    let same = apply_temperature(&p, 1.0).unwrap();
    for (a, b) in same.probs().iter().zip(p.probs()) {
        assert!((a - b).abs() < 1e-12);
    }
    let squared = apply_temperature(&p, 0.5).unwrap();
    for (a, b) in squared.probs().iter().zip([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]) {
        assert!((a - b).abs() < 1e-12);
    }
}

fn distribution() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..1.0, 2..12).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn temperature_preserves_rank(p in distribution(), tau in 0.01f64..10.0) {
        let q = apply_temperature(&Distribution::new(p.clone()).unwrap(), tau).unwrap();
        let q = q.probs();
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for i in 0..p.len() {
            for j in 0..p.len() {
                if p[i] > p[j] {
                    prop_assert!(q[i] >= q[j]);
                }
            }
        }
    }
}
