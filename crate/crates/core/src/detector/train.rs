use rand::seq::SliceRandom;
use serde::Serialize;

use super::{label_index, Detector, DetectorParams};
use crate::corpus::{LabeledSentence, Vocabulary};
use crate::error::{Error, Result};
use crate::eval::prf;
use crate::optim::{EarlyStopping, ParamSet, Verdict};
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternation {
    /// Every epoch is a pass over real and synthetic data mixed together.
    None,
    /// Epochs alternate between real data and a synthetic shard.
    Epoch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Real,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTrainConfig {
    pub cell_size: usize,
    pub emb_size: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Evaluated epochs without dev F0.5 improvement before stopping.
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub clip: Option<f64>,
    pub min_count: usize,
    pub alternation: Alternation,
    /// Schedule so that the last epoch is on real data, and only select
    /// checkpoints after real epochs.
    pub end_on_real: bool,
    /// `p(i)` at or above this predicts `i`.
    pub threshold: f64,
}

impl Default for DetectorTrainConfig {
    fn default() -> Self {
        DetectorTrainConfig {
            cell_size: 32,
            emb_size: 24,
            learning_rate: 2.0,
            batch_size: 4,
            patience: 20,
            max_epochs: 100,
            seed: 1,
            clip: Some(5.0),
            min_count: 1,
            alternation: Alternation::Epoch,
            end_on_real: true,
            threshold: 0.5,
        }
    }
}

impl DetectorTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patience < 1 {
            return Err(Error::config("patience must be at least 1"));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::config("learning rate must be positive"));
        }
        if self.batch_size < 1 || self.max_epochs < 1 {
            return Err(Error::config("batch size and max epochs must be at least 1"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::config("threshold must lie in (0, 1)"));
        }
        if self.cell_size == 0 || self.emb_size == 0 || self.min_count == 0 {
            return Err(Error::config(
                "cell size, embedding size and min_count must be positive",
            ));
        }
        Ok(())
    }

    /// Data source of each epoch `1..=max_epochs` when synthetic data exists.
    pub fn schedule(&self) -> Vec<DataSource> {
        (1..=self.max_epochs)
            .map(|e| {
                let real = match self.alternation {
                    Alternation::None => true,
                    Alternation::Epoch if self.end_on_real => (self.max_epochs - e).is_multiple_of(2),
                    Alternation::Epoch => e % 2 == 1,
                };
                if real {
                    DataSource::Real
                } else {
                    DataSource::Synthetic
                }
            })
            .collect()
    }
}

/// One line of training history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorEpoch {
    pub epoch: usize,
    pub source: DataSource,
    pub dev_f05: f64,
}

#[derive(Debug, Clone)]
pub struct DetectorTraining {
    pub detector: Detector,
    pub history: Vec<DetectorEpoch>,
    pub best_epoch: usize,
}

impl DetectorTraining {
    /// History as JSON lines.
    pub fn history_jsonl(&self) -> String {
        self.history
            .iter()
            .map(|r| serde_json::to_string(r).expect("history serializes") + "\n")
            .collect()
    }
}

type Encoded = (Vec<usize>, Vec<usize>);

fn encode(vocab: &Vocabulary, data: &[LabeledSentence]) -> Vec<Encoded> {
    data.iter()
        .map(|s| {
            let ids = s.tokens().iter().map(|t| vocab.id(t)).collect();
            let labels = s.labels().iter().map(|&l| label_index(l)).collect();
            (ids, labels)
        })
        .collect()
}

/// Trains a tagger on real data, alternating epoch by epoch with synthetic
/// data or mixing the two (see [`Alternation`]). For alternation, synthetic
/// data is shuffled once and split into shards of `|real|` sentences
/// consumed round-robin. Early stopping tracks token F0.5 on `dev`.
pub fn train_detector(
    real: &[LabeledSentence],
    synthetic: &[LabeledSentence],
    dev: &[LabeledSentence],
    cfg: &DetectorTrainConfig,
) -> Result<DetectorTraining> {
    cfg.validate()?;
    if real.is_empty() {
        return Err(Error::EmptyInput("real training set is empty"));
    }
    if dev.is_empty() {
        return Err(Error::EmptyInput("development set is empty"));
    }
    let vocab = Vocabulary::build(
        real.iter()
            .chain(synthetic)
            .map(|s| s.sentence())
            .collect::<Vec<_>>()
            .iter(),
        cfg.min_count,
    )?;
    let mut params = DetectorParams::init(cfg.seed, vocab.len(), cfg.emb_size, cfg.cell_size)?;
    let mut real_enc = encode(&vocab, real);
    let mut syn_enc = encode(&vocab, synthetic);
    syn_enc.shuffle(&mut seeded(derive_seed(cfg.seed, u64::MAX)));
    let shards: Vec<&[Encoded]> = syn_enc.chunks(real.len()).collect();

    let alternating = cfg.alternation == Alternation::Epoch && !shards.is_empty();
    if cfg.alternation == Alternation::None {
        real_enc.extend(syn_enc.iter().cloned());
    }
    let schedule = if alternating {
        cfg.schedule()
    } else {
        vec![DataSource::Real; cfg.max_epochs]
    };
    let checkpoint_any = !(alternating && cfg.end_on_real);

    let mut stopper = EarlyStopping::new(cfg.patience, true);
    let mut best = params.clone();
    let mut history = Vec::new();
    let mut synthetic_epochs = 0usize;
    for (e, source) in schedule.iter().enumerate() {
        let epoch = e + 1;
        let data: &[Encoded] = match source {
            DataSource::Real => &real_enc,
            DataSource::Synthetic => {
                synthetic_epochs += 1;
                shards[(synthetic_epochs - 1) % shards.len()]
            }
        };
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut seeded(derive_seed(cfg.seed, epoch as u64)));
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<Encoded> = chunk.iter().map(|&i| data[i].clone()).collect();
            let (_, grad) = params.batch_gradient(&batch)?;
            params.sgd_step(&grad, cfg.learning_rate, cfg.clip);
        }
        if !params.all_finite() {
            return Err(Error::invariant(format!(
                "detector parameters diverged at epoch {epoch}"
            )));
        }
        let snapshot = Detector::new(vocab.clone(), params.clone())?;
        let dev_f05 = prf(&snapshot.predict_all(dev, cfg.threshold)?, dev, 0.5)?.f;
        log::debug!("detector epoch {epoch} ({source:?}): dev F0.5 {dev_f05:.4}");
        history.push(DetectorEpoch {
            epoch,
            source: *source,
            dev_f05,
        });
        if !checkpoint_any && *source != DataSource::Real {
            continue;
        }
        match stopper.observe(epoch, dev_f05) {
            Verdict::Improved => best = params.clone(),
            Verdict::NoImprovement => {}
            Verdict::Stop => break,
        }
    }
    let best_epoch = stopper.best().map(|(e, _)| e).unwrap_or(0);
    Ok(DetectorTraining {
        detector: Detector::new(vocab, best)?,
        history,
        best_epoch,
    })
}
