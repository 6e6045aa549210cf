//! From-scratch neural classifiers: a one-hidden-layer MLP trained with Adam
//! and a bidirectional LSTM trained with RMSProp through full
//! backpropagation-through-time.

#![allow(clippy::needless_range_loop)]

mod gradcheck;
mod lstm;
mod mlp;
mod optim;

pub use gradcheck::gradient_check;
pub use lstm::{lstm_step, train_bilstm, train_bilstm_with, BiLstmModel, BiLstmParams, LstmCell};
pub use mlp::{train_mlp, train_mlp_with, MlpModel, MlpParams};
pub use optim::{Adam, Optimizer, RmsProp};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sentiment::Sentiment;

/// Width of the hidden layer (MLP) and of each LSTM direction.
pub const DEFAULT_UNITS: usize = 100;

/// A model whose parameters can be visited as a fixed sequence of slices.
/// Gradients use the same type, so the two line up slice for slice.
pub trait ParamSet {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn flatten(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    fn assign(&mut self, flat: &[f64]) {
        let mut at = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[at..at + t.len()]);
            at += t.len();
        }
        assert_eq!(at, flat.len(), "flat parameter vector has the wrong length");
    }

    fn n_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}

/// Forward-pass mode. Only training draws dropout masks.
pub enum Mode<'a> {
    Infer,
    Train(&'a mut ChaCha8Rng),
}

/// What a per-epoch callback wants the trainer to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpochControl {
    Continue,
    Stop,
}

/// Patience-based stopping on a score where higher is better.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    stale: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best: f64::NEG_INFINITY,
            stale: 0,
        }
    }

    pub fn update(&mut self, score: f64) -> EpochControl {
        if score > self.best {
            self.best = score;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        if self.stale >= self.patience {
            EpochControl::Stop
        } else {
            EpochControl::Continue
        }
    }
}

pub(crate) fn glorot(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize, len: usize) -> Vec<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..len).map(|_| rng.gen_range(-limit..limit)).collect()
}

pub(crate) fn check_training_labels(n_inputs: usize, labels: &[Sentiment]) -> Result<()> {
    if n_inputs != labels.len() {
        return Err(Error::Arity {
            left: n_inputs,
            right: labels.len(),
        });
    }
    let distinct = Sentiment::ALL.iter().filter(|c| labels.contains(c)).count();
    if distinct < 2 {
        return Err(Error::DegenerateLabels {
            missing: None,
            message: format!("need at least two classes, found {distinct}"),
        });
    }
    Ok(())
}

/// Scales the gradient down so its global L2 norm is at most `max_norm`.
pub(crate) fn clip_global_norm<P: ParamSet>(grad: &mut P, max_norm: f64) -> f64 {
    let norm = grad
        .tensors()
        .iter()
        .flat_map(|t| t.iter())
        .map(|g| g * g)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        for t in grad.tensors_mut() {
            t.iter_mut().for_each(|g| *g *= s);
        }
    }
    norm
}
