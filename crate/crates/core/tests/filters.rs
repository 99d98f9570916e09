use std::collections::HashSet;

use rand::Rng;
use wrongsmith::align::{count_errors, label_tokens};
use wrongsmith::corpus::{ParallelPair, Sentence};
use wrongsmith::dataset::{build_labeled, BuildConfig};
use wrongsmith::rng::seeded;

const WORDS: [&str; 6] = ["the", "cat", "sat", "on", "a", "mat"];

fn random_sentence(rng: &mut impl Rng, max_len: usize) -> Sentence {
    let n = rng.random_range(1..=max_len);
    Sentence::new(
        (0..n)
            .map(|_| WORDS[rng.random_range(0..WORDS.len())].to_string())
            .collect(),
    )
    .unwrap()
}

#[test]
fn built_datasets_have_no_duplicates_or_noisy_rows() {
    let mut rng = seeded(11);
    // A small source pool and short targets make repeats common.
    let sources: Vec<Sentence> = (0..200).map(|_| random_sentence(&mut rng, 6)).collect();
    let pairs: Vec<ParallelPair> = (0..10_000)
        .map(|_| {
            let source = sources[rng.random_range(0..sources.len())].clone();
            let target = if rng.random_bool(0.3) {
                source.clone()
            } else {
                random_sentence(&mut rng, 9)
            };
            ParallelPair::new(source, target)
        })
        .collect();
    for max_errors in [0, 2, 5] {
        for dedup in [true, false] {
            let cfg = BuildConfig {
                max_errors,
                dedup,
                ..BuildConfig::default()
            };
            let built = build_labeled(&pairs, &cfg).unwrap();
            assert!(built.iter().all(|s| count_errors(s) <= max_errors));
            let expected: Vec<_> = pairs
                .iter()
                .map(|p| label_tokens(&p.source, &p.target).unwrap())
                .filter(|s| count_errors(s) <= max_errors)
                .collect();
            if dedup {
                let unique: HashSet<_> = built.iter().collect();
                assert_eq!(unique.len(), built.len());
                let distinct: HashSet<_> = expected.iter().collect();
                assert_eq!(built.len(), distinct.len());
            } else {
                assert_eq!(built, expected);
            }
            assert!(!built.is_empty());
        }
    }
}
