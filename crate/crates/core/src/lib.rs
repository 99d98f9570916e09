//! Learned grammatical-error injection for error-detection data augmentation.
//!
//! An attentive encoder-decoder ([`seq2seq`]) is trained on clean→erroneous
//! sentence pairs and then run over clean text with one of three decoding
//! strategies ([`decode`]). Each corruption is aligned to its source at the
//! word level and labelled token by token ([`align`]), filtered
//! ([`dataset`]), and used to augment a BiLSTM error detector
//! ([`detector`]) scored with token-level F-beta ([`eval`]). The [`turing`]
//! module runs a human real-vs-synthetic judgment session over HTTP.

pub mod align;
pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod decode;
pub mod detector;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod linalg;
pub mod lstm;
mod model_io;
pub mod optim;
pub mod rng;
pub mod seq2seq;
pub mod toy;
pub mod turing;

pub use error::{Error, Result};
