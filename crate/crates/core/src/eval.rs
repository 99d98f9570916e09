//! Token-level detection metrics and Turing-test scoring.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Label, LabeledSentence};
use crate::error::{Error, Result};

/// Precision, recall and F-beta for the positive class. Values are fractions
/// in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub beta: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl DetectionMetrics {
    /// Zero denominators give zero precision, recall or F.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, beta: f64) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f = f_beta(precision, recall, beta);
        DetectionMetrics {
            precision,
            recall,
            f,
            beta,
            tp,
            fp,
            fn_,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("metrics serialize")
    }
}

impl fmt::Display for DetectionMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P {:.2} / R {:.2} / F{} {:.2} (tp {} fp {} fn {})",
            self.precision * 100.0,
            self.recall * 100.0,
            self.beta,
            self.f * 100.0,
            self.tp,
            self.fp,
            self.fn_
        )
    }
}

pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let den = b2 * precision + recall;
    if precision + recall == 0.0 || den == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / den
    }
}

/// Token-level scores with `i` as the positive class.
pub fn prf(pred: &[LabeledSentence], gold: &[LabeledSentence], beta: f64) -> Result<DetectionMetrics> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::config("beta must be positive"));
    }
    if pred.len() != gold.len() {
        return Err(Error::Shape {
            index: pred.len().min(gold.len()),
            message: format!("{} predicted sentences but {} gold", pred.len(), gold.len()),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (index, (p, g)) in pred.iter().zip(gold).enumerate() {
        if p.len() != g.len() {
            return Err(Error::Shape {
                index,
                message: format!("{} predicted tokens but {} gold", p.len(), g.len()),
            });
        }
        for (&pl, &gl) in p.labels().iter().zip(g.labels()) {
            match (pl, gl) {
                (Label::Incorrect, Label::Incorrect) => tp += 1,
                (Label::Incorrect, Label::Correct) => fp += 1,
                (Label::Correct, Label::Incorrect) => fn_ += 1,
                (Label::Correct, Label::Correct) => {}
            }
        }
    }
    Ok(DetectionMetrics::from_counts(tp, fp, fn_, beta))
}

/// Scores an annotator hunting for synthetic items (the positive class).
/// Later judgments of the same id override earlier ones; unjudged items
/// count as not flagged.
pub fn score_turing(judgments: &[(String, bool)], key: &[(String, bool)]) -> Result<DetectionMetrics> {
    let truth: HashMap<&str, bool> = key.iter().map(|(id, s)| (id.as_str(), *s)).collect();
    let mut flagged: HashMap<&str, bool> = HashMap::new();
    for (id, says_synthetic) in judgments {
        if !truth.contains_key(id.as_str()) {
            return Err(Error::Key(id.clone()));
        }
        flagged.insert(id.as_str(), *says_synthetic);
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (id, is_synthetic) in key {
        let says = flagged.get(id.as_str()).copied().unwrap_or(false);
        match (says, *is_synthetic) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(DetectionMetrics::from_counts(tp, fp, fn_, 1.0))
}
