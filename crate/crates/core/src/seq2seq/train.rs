use rand::seq::SliceRandom;

use super::{batch_gradient, batch_loss, Corruptor, Dims, IdPair, Seq2SeqParams};
use crate::corpus::{ParallelPair, Vocabulary};
use crate::error::{Error, Result};
use crate::optim::{EarlyStopping, ParamSet, Verdict};
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub cell_size: usize,
    pub emb_size: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Epochs without dev improvement before stopping.
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    /// Global gradient-norm clip.
    pub clip: Option<f64>,
    /// Vocabulary cutoff used by [`train_corruptor`].
    pub min_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            cell_size: 64,
            emb_size: 64,
            learning_rate: 1.0,
            batch_size: 8,
            patience: 20,
            max_epochs: 200,
            seed: 1,
            clip: Some(5.0),
            min_count: 1,
        }
    }
}

impl TrainConfig {
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
        if self.cell_size == 0 || self.emb_size == 0 {
            return Err(Error::config("cell and embedding sizes must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    /// Mean dev cross-entropy; lower is better.
    pub dev_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: Seq2SeqParams,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
}

/// SGD over shuffled mini-batches with early stopping on mean dev loss. The
/// returned parameters are those of the best dev epoch.
pub fn train(
    mut params: Seq2SeqParams,
    train_pairs: &[IdPair],
    dev_pairs: &[IdPair],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train_pairs.is_empty() {
        return Err(Error::EmptyInput("training set is empty"));
    }
    if dev_pairs.is_empty() {
        return Err(Error::EmptyInput("development set is empty"));
    }
    let mut order: Vec<usize> = (0..train_pairs.len()).collect();
    let mut stopper = EarlyStopping::new(config.patience, false);
    let mut best = params.clone();
    let mut history = Vec::new();
    for epoch in 1..=config.max_epochs {
        let mut rng = seeded(derive_seed(config.seed, epoch as u64));
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<IdPair> = chunk.iter().map(|&i| train_pairs[i].clone()).collect();
            let (loss, grad) = batch_gradient(&params, &batch)?;
            loss_sum += loss * batch.len() as f64;
            params.sgd_step(&grad, config.learning_rate, config.clip);
        }
        if !params.all_finite() {
            return Err(Error::invariant(format!("parameters diverged at epoch {epoch}")));
        }
        let dev_loss = batch_loss(&params, dev_pairs)?;
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / train_pairs.len() as f64,
            dev_loss,
        };
        log::info!("epoch {epoch}: train {:.4} dev {:.4}", record.train_loss, dev_loss);
        history.push(record);
        match stopper.observe(epoch, dev_loss) {
            Verdict::Improved => best = params.clone(),
            Verdict::NoImprovement => {}
            Verdict::Stop => break,
        }
    }
    let best_epoch = stopper.best().map(|(e, _)| e).unwrap_or(0);
    Ok(TrainOutcome {
        params: best,
        history,
        best_epoch,
    })
}

pub fn to_id_pairs(vocab: &Vocabulary, pairs: &[ParallelPair]) -> Vec<IdPair> {
    pairs
        .iter()
        .map(|p| IdPair {
            source: vocab.encode(&p.source),
            target: vocab.encode(&p.target),
        })
        .collect()
}

/// Builds a joint vocabulary over both sides of `train_pairs`, initializes,
/// and trains a corruption model.
pub fn train_corruptor(
    train_pairs: &[ParallelPair],
    dev_pairs: &[ParallelPair],
    config: &TrainConfig,
) -> Result<(Corruptor, Vec<EpochRecord>)> {
    config.validate()?;
    let vocab = Vocabulary::build(
        train_pairs.iter().flat_map(|p| [&p.source, &p.target]),
        config.min_count,
    )?;
    let dims = Dims {
        vocab: vocab.len(),
        emb: config.emb_size,
        cell: config.cell_size,
    };
    let params = Seq2SeqParams::init(config.seed, dims)?;
    let outcome = train(
        params,
        &to_id_pairs(&vocab, train_pairs),
        &to_id_pairs(&vocab, dev_pairs),
        config,
    )?;
    Ok((Corruptor::new(vocab, outcome.params)?, outcome.history))
}
