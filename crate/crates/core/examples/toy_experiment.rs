//! End-to-end desk-scale experiment: train a corruptor on toy learner data,
//! augment a small real set with its corruptions, and compare detectors.
//!
//!     cargo run --release --example toy_experiment [n_seeds]

use std::time::Instant;

use wrongsmith::experiment::{run, train_toy_corruptor, ExperimentConfig, ToyData};

fn main() -> wrongsmith::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut cfg = ExperimentConfig::default();
    if let Some(n) = std::env::args().nth(1).and_then(|a| a.parse::<u64>().ok()) {
        cfg.seeds = (1..=n).collect();
    }
    let start = Instant::now();
    let data = ToyData::generate(&cfg)?;
    let model = train_toy_corruptor(&data, &cfg)?;
    println!("corruptor trained in {:.1?}", start.elapsed());
    let report = run(&cfg, &data, &model)?;
    print!("{}", report.render());
    println!("total {:.1?}", start.elapsed());
    Ok(())
}
