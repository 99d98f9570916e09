//! Train a corruption model on toy learner data and corrupt clean text with
//! each decoding strategy.
//!
//!     cargo run --release --example train_corruptor

use wrongsmith::decode::{decode_n, DecodeConfig, Strategy};
use wrongsmith::rng::seeded;
use wrongsmith::seq2seq::{load_corruptor, save_corruptor, train_corruptor, TrainConfig};
use wrongsmith::toy::ToyLanguage;

fn main() -> wrongsmith::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let lang = ToyLanguage::default();
    let mut rng = seeded(2018);
    let train: Vec<_> = (0..1000).map(|_| lang.generate_pair(&mut rng)).collect();
    let dev: Vec<_> = (0..100).map(|_| lang.generate_pair(&mut rng)).collect();
    let cfg = TrainConfig {
        patience: 10,
        max_epochs: 100,
        seed: 7,
        ..TrainConfig::default()
    };
    let (model, history) = train_corruptor(&train, &dev, &cfg)?;
    let best = history.iter().map(|r| r.dev_loss).fold(f64::INFINITY, f64::min);
    println!("{} epochs, best dev loss {best:.4}", history.len());

    let path = std::env::temp_dir().join("wrongsmith-toy.wsm");
    save_corruptor(&model, &path)?;
    let model = load_corruptor(&path)?;
    println!("model saved to {}", path.display());

    for _ in 0..4 {
        let clean = lang.generate(&mut rng);
        println!("\n{clean}");
        let ids = model.encode_sentence(&clean);
        for strategy in [Strategy::Argmax, Strategy::Temperature, Strategy::Beam] {
            let cfg = DecodeConfig {
                strategy,
                seed: 1,
                ..DecodeConfig::default()
            };
            for h in decode_n(&model.params, &ids, &cfg, 3)? {
                let words = model.render(&clean, h.output_ids())?;
                println!("  {strategy:?}: {}  ({:.2})", words.join(" "), h.log_prob);
            }
        }
    }
    Ok(())
}
