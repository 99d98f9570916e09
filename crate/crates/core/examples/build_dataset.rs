//! From corruptions to a filtered, labelled training set.
//!
//!     cargo run --example build_dataset

use wrongsmith::align::count_errors;
use wrongsmith::corpus::{format_labeled, ParallelPair, Sentence};
use wrongsmith::dataset::{build_labeled, BuildConfig};
use wrongsmith::rng::seeded;
use wrongsmith::toy::ToyLanguage;

pub fn run() -> wrongsmith::Result<()> {
    let lang = ToyLanguage::default();
    let mut rng = seeded(4);
    let mut pairs: Vec<ParallelPair> = (0..400).map(|_| lang.generate_pair(&mut rng)).collect();
    // Repeats and a badly garbled row, as decoders sometimes produce.
    pairs.extend(pairs[..50].to_vec());
    let source = pairs[0].source.clone();
    let garbled = Sentence::from_words(&["x"; 9])?;
    pairs.push(ParallelPair::new(source, garbled));

    for (name, cfg) in [
        ("defaults", BuildConfig::default()),
        (
            "no dedup",
            BuildConfig {
                dedup: false,
                ..BuildConfig::default()
            },
        ),
        (
            "error-free only",
            BuildConfig {
                max_errors: 0,
                ..BuildConfig::default()
            },
        ),
    ] {
        let data = build_labeled(&pairs, &cfg)?;
        let errors: usize = data.iter().map(count_errors).sum();
        println!(
            "{name:<16} {} of {} pairs kept, {errors} error tokens",
            data.len(),
            pairs.len()
        );
    }
    let data = build_labeled(&pairs, &BuildConfig::default())?;
    print!("first instances:\n{}", format_labeled(&data[..2]));
    Ok(())
}

fn main() -> wrongsmith::Result<()> {
    run()
}
