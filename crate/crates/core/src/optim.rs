//! Parameter-set plumbing shared by both networks: SGD, clipping, finiteness
//! checks, and patience-based early stopping.

/// A fixed, ordered collection of real-valued tensors.
pub trait ParamSet {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn l2_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0, |acc, x| acc + x * x)
            .sqrt()
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            for x in t.iter_mut() {
                *x *= factor;
            }
        }
    }

    /// `self += other`, tensor by tensor.
    fn accumulate(&mut self, other: &Self)
    where
        Self: Sized,
    {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
    }

    /// Plain SGD step, rescaling `grad` first if its norm exceeds `clip`.
    fn sgd_step(&mut self, grad: &Self, learning_rate: f64, clip: Option<f64>)
    where
        Self: Sized,
    {
        let mut rate = learning_rate;
        if let Some(max_norm) = clip {
            let norm = grad.l2_norm();
            if norm > max_norm {
                rate *= max_norm / norm;
            }
        }
        for (dst, src) in self.tensors_mut().into_iter().zip(grad.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d -= rate * s;
            }
        }
    }
}

/// Tracks the best score seen so far and decides when to stop.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    higher_is_better: bool,
    best: Option<(usize, f64)>,
    since_best: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Improved,
    NoImprovement,
    Stop,
}

impl EarlyStopping {
    pub fn new(patience: usize, higher_is_better: bool) -> Self {
        EarlyStopping {
            patience,
            higher_is_better,
            best: None,
            since_best: 0,
        }
    }

    /// Records the score of `epoch`; `Stop` once `patience` consecutive
    /// epochs have failed to beat the best score.
    pub fn observe(&mut self, epoch: usize, score: f64) -> Verdict {
        let improved = match self.best {
            None => true,
            Some((_, best)) if self.higher_is_better => score > best,
            Some((_, best)) => score < best,
        };
        if improved {
            self.best = Some((epoch, score));
            self.since_best = 0;
            return Verdict::Improved;
        }
        self.since_best += 1;
        if self.since_best >= self.patience {
            Verdict::Stop
        } else {
            Verdict::NoImprovement
        }
    }

    pub fn best(&self) -> Option<(usize, f64)> {
        self.best
    }
}
