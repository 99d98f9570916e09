//! Desk-scale augmentation experiments on the toy language.
//!
//! A corruptor is trained once on toy learner pairs; clean toy text is then
//! corrupted with each decoding strategy and the resulting synthetic data is
//! used to augment a small real training set. Detector F0.5 on a held-out
//! set is compared across seeds, synthetic volumes and strategies.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::corpus::{LabeledSentence, ParallelPair, Sentence};
use crate::dataset::{build_labeled, corrupt_corpus, BuildConfig};
use crate::decode::{DecodeConfig, Strategy};
use crate::detector::{train_detector, DetectorTrainConfig};
use crate::error::Result;
use crate::eval::prf;
use crate::rng::{derive_seed, seeded};
use crate::seq2seq::{train_corruptor, Corruptor, TrainConfig};
use crate::toy::ToyLanguage;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub data_seed: u64,
    pub corruptor_pairs: usize,
    pub corruptor_dev_pairs: usize,
    /// Real labelled training sentences, taken from the corruptor pairs.
    pub real_sentences: usize,
    pub test_sentences: usize,
    pub clean_sentences: usize,
    pub corruptor: TrainConfig,
    pub detector: DetectorTrainConfig,
    pub seeds: Vec<u64>,
    /// Synthetic volume as a multiple of the real set size.
    pub volumes: Vec<usize>,
    /// Volume used when comparing strategies.
    pub strategy_volume: usize,
    pub samples_per_source: usize,
    pub tau: f64,
    pub beam_width: usize,
    pub max_errors: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data_seed: 2018,
            corruptor_pairs: 1000,
            corruptor_dev_pairs: 100,
            real_sentences: 300,
            test_sentences: 500,
            clean_sentences: 1600,
            corruptor: TrainConfig {
                patience: 10,
                max_epochs: 100,
                seed: 7,
                ..TrainConfig::default()
            },
            detector: DetectorTrainConfig {
                patience: 30,
                ..DetectorTrainConfig::default()
            },
            seeds: (1..=10).collect(),
            volumes: vec![0, 1, 2, 3, 4],
            strategy_volume: 2,
            samples_per_source: 1,
            tau: crate::decode::DEFAULT_TAU,
            beam_width: crate::decode::DEFAULT_BEAM_WIDTH,
            max_errors: crate::dataset::DEFAULT_MAX_ERRORS,
        }
    }
}

/// All data splits of one toy experiment.
#[derive(Debug, Clone)]
pub struct ToyData {
    pub corruptor_train: Vec<ParallelPair>,
    pub corruptor_dev: Vec<ParallelPair>,
    pub real_train: Vec<LabeledSentence>,
    pub real_dev: Vec<LabeledSentence>,
    pub test: Vec<LabeledSentence>,
    pub clean: Vec<Sentence>,
}

fn label_pairs(pairs: &[ParallelPair]) -> Result<Vec<LabeledSentence>> {
    pairs
        .iter()
        .map(|p| crate::align::label_tokens(&p.source, &p.target))
        .collect()
}

impl ToyData {
    pub fn generate(cfg: &ExperimentConfig) -> Result<Self> {
        let lang = ToyLanguage::default();
        let mut rng = seeded(cfg.data_seed);
        let mut pairs = |n: usize| (0..n).map(|_| lang.generate_pair(&mut rng)).collect::<Vec<_>>();
        let corruptor_train = pairs(cfg.corruptor_pairs);
        let corruptor_dev = pairs(cfg.corruptor_dev_pairs);
        let test_pairs = pairs(cfg.test_sentences);
        let clean = (0..cfg.clean_sentences).map(|_| lang.generate(&mut rng)).collect();
        Ok(ToyData {
            real_train: label_pairs(&corruptor_train[..cfg.real_sentences.min(corruptor_train.len())])?,
            real_dev: label_pairs(&corruptor_dev)?,
            test: label_pairs(&test_pairs)?,
            corruptor_train,
            corruptor_dev,
            clean,
        })
    }
}

pub fn train_toy_corruptor(data: &ToyData, cfg: &ExperimentConfig) -> Result<Corruptor> {
    let (model, history) = train_corruptor(&data.corruptor_train, &data.corruptor_dev, &cfg.corruptor)?;
    if let Some(last) = history.last() {
        log::info!(
            "corruptor trained for {} epochs, final dev loss {:.4}",
            last.epoch,
            last.dev_loss
        );
    }
    Ok(model)
}

/// Labelled, filtered corruptions of the clean pool.
pub fn synthetic_pool(
    model: &Corruptor,
    clean: &[Sentence],
    strategy: Strategy,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<Vec<LabeledSentence>> {
    let build = BuildConfig {
        decode: DecodeConfig {
            strategy,
            tau: cfg.tau,
            beam_width: cfg.beam_width,
            max_len: None,
            seed,
        },
        samples_per_source: cfg.samples_per_source,
        max_errors: cfg.max_errors,
        dedup: true,
    };
    build_labeled(&corrupt_corpus(model, clean, &build)?, &build)
}

/// Deterministic random subset of `n` instances (all of them if fewer).
pub fn take_volume(pool: &[LabeledSentence], n: usize, seed: u64) -> Vec<LabeledSentence> {
    let mut picked = pool.to_vec();
    picked.shuffle(&mut seeded(seed));
    picked.truncate(n);
    picked
}

/// Trains a detector and returns its held-out token F0.5.
pub fn detector_f05(data: &ToyData, synthetic: &[LabeledSentence], cfg: &DetectorTrainConfig) -> Result<f64> {
    let trained = train_detector(&data.real_train, synthetic, &data.real_dev, cfg)?;
    let pred = trained.detector.predict_all(&data.test, cfg.threshold)?;
    Ok(prf(&pred, &data.test, 0.5)?.f)
}

#[derive(Debug, Clone, Serialize)]
pub struct SeedResult {
    pub seed: u64,
    /// Held-out F0.5 for each configured volume (volume 0 is the baseline).
    pub volume_f05: Vec<(usize, f64)>,
    /// Held-out F0.5 per strategy at the comparison volume.
    pub strategy_f05: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = match sorted.len() {
            0 => 0.0,
            k if k % 2 == 1 => sorted[k / 2],
            k => (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0,
        };
        Summary {
            mean,
            std: var.sqrt(),
            median,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub seeds: Vec<SeedResult>,
    pub pool_sizes: Vec<(String, usize)>,
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Argmax => "AM",
        Strategy::Temperature => "TS",
        Strategy::Beam => "BS",
    }
}

impl ExperimentReport {
    pub fn baseline(&self) -> Vec<f64> {
        self.at_volume(0)
    }

    pub fn at_volume(&self, volume: usize) -> Vec<f64> {
        self.seeds
            .iter()
            .filter_map(|s| s.volume_f05.iter().find(|(v, _)| *v == volume).map(|(_, f)| *f))
            .collect()
    }

    pub fn for_strategy(&self, name: &str) -> Vec<f64> {
        self.seeds
            .iter()
            .filter_map(|s| s.strategy_f05.iter().find(|(n, _)| n == name).map(|(_, f)| *f))
            .collect()
    }

    pub fn volumes(&self) -> Vec<usize> {
        self.seeds
            .first()
            .map(|s| s.volume_f05.iter().map(|(v, _)| *v).collect())
            .unwrap_or_default()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, size) in &self.pool_sizes {
            out += &format!("synthetic pool {name}: {size} instances\n");
        }
        out += "volume  median F0.5  mean ± std\n";
        for v in self.volumes() {
            let s = Summary::of(&self.at_volume(v));
            out += &format!(
                "{v:>5}x  {:>10.2}  {:.2} ± {:.2}\n",
                s.median * 100.0,
                s.mean * 100.0,
                s.std * 100.0
            );
        }
        out += "strategy  mean ± std F0.5\n";
        let base = Summary::of(&self.baseline());
        out += &format!("{:<8}  {:.2} ± {:.2}\n", "none", base.mean * 100.0, base.std * 100.0);
        for name in ["AM", "TS", "BS"] {
            let s = Summary::of(&self.for_strategy(name));
            out += &format!("{name:<8}  {:.2} ± {:.2}\n", s.mean * 100.0, s.std * 100.0);
        }
        out
    }
}

/// Runs the volume sweep (temperature sampling) and the strategy comparison
/// over every seed, reusing one trained corruptor.
pub fn run(cfg: &ExperimentConfig, data: &ToyData, model: &Corruptor) -> Result<ExperimentReport> {
    let am = synthetic_pool(model, &data.clean, Strategy::Argmax, 0, cfg)?;
    let bs = synthetic_pool(model, &data.clean, Strategy::Beam, 0, cfg)?;
    let mut pool_sizes = vec![("AM".to_string(), am.len()), ("BS".to_string(), bs.len())];
    let n_real = data.real_train.len();
    let mut seeds = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let ts = synthetic_pool(model, &data.clean, Strategy::Temperature, derive_seed(seed, 1), cfg)?;
        if seed == cfg.seeds[0] {
            pool_sizes.push(("TS".to_string(), ts.len()));
        }
        let det = DetectorTrainConfig {
            seed,
            ..cfg.detector.clone()
        };
        let mut volume_f05 = Vec::with_capacity(cfg.volumes.len());
        let mut ts_at_comparison = None;
        for &v in &cfg.volumes {
            let syn = take_volume(&ts, v * n_real, derive_seed(seed, 2));
            let f = detector_f05(data, &syn, &det)?;
            log::info!("seed {seed} volume {v}x ({} synthetic): F0.5 {:.4}", syn.len(), f);
            if v == cfg.strategy_volume {
                ts_at_comparison = Some(f);
            }
            volume_f05.push((v, f));
        }
        let mut strategy_f05 = Vec::with_capacity(3);
        for (strategy, pool) in [
            (Strategy::Argmax, &am),
            (Strategy::Temperature, &ts),
            (Strategy::Beam, &bs),
        ] {
            let f = match (strategy, ts_at_comparison) {
                (Strategy::Temperature, Some(f)) => f,
                _ => {
                    let syn = take_volume(pool, cfg.strategy_volume * n_real, derive_seed(seed, 2));
                    detector_f05(data, &syn, &det)?
                }
            };
            log::info!("seed {seed} {}: F0.5 {:.4}", strategy_name(strategy), f);
            strategy_f05.push((strategy_name(strategy).to_string(), f));
        }
        seeds.push(SeedResult {
            seed,
            volume_f05,
            strategy_f05,
        });
    }
    Ok(ExperimentReport { seeds, pool_sizes })
}
