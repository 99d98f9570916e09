//! Train a BiLSTM error detector on a small real set, with and without
//! alternating synthetic epochs.
//!
//! The synthetic data here comes straight from the toy error model, which
//! shows the upper end of what augmentation can do; `toy_experiment` uses a
//! learned corruptor instead.
//!
//!     cargo run --release --example train_detector

use wrongsmith::align::label_tokens;
use wrongsmith::corpus::LabeledSentence;
use wrongsmith::detector::{train_detector, DetectorTrainConfig};
use wrongsmith::eval::prf;
use wrongsmith::rng::seeded;
use wrongsmith::toy::ToyLanguage;

fn main() -> wrongsmith::Result<()> {
    let lang = ToyLanguage::default();
    let mut rng = seeded(9);
    let mut labelled = |n: usize| -> wrongsmith::Result<Vec<LabeledSentence>> {
        (0..n)
            .map(|_| {
                let p = lang.generate_pair(&mut rng);
                label_tokens(&p.source, &p.target)
            })
            .collect()
    };
    let (real, dev, test, synthetic) = (labelled(300)?, labelled(100)?, labelled(500)?, labelled(900)?);

    let cfg = DetectorTrainConfig {
        max_epochs: 60,
        patience: 20,
        ..DetectorTrainConfig::default()
    };
    for (name, syn) in [("real only", &synthetic[..0]), ("real + synthetic", &synthetic[..])] {
        let trained = train_detector(&real, syn, &dev, &cfg)?;
        let pred = trained.detector.predict_all(&test, cfg.threshold)?;
        println!(
            "{name:<18} best epoch {:>3}   test {}",
            trained.best_epoch,
            prf(&pred, &test, 0.5)?
        );
    }

    let trained = train_detector(&real, &synthetic, &dev, &cfg)?;
    let history = trained.history_jsonl();
    let lines: Vec<&str> = history.lines().collect();
    println!("last epochs:\n{}", lines[lines.len().saturating_sub(4)..].join("\n"));
    let sentence = &test
        .iter()
        .find(|s| s.labels().iter().any(|l| l.as_str() == "i"))
        .expect("an erroneous test sentence")
        .sentence();
    let tagged = trained.detector.predict_labels(sentence, cfg.threshold)?;
    let probs = trained.detector.probabilities(sentence.tokens())?;
    for ((t, l), p) in tagged.tokens().iter().zip(tagged.labels()).zip(probs) {
        println!("  {t:<10} {}  p(i) = {p:.3}", l.as_str());
    }
    Ok(())
}
