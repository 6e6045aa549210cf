use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::optim::{Adam, Optimizer};
use super::{check_training_labels, glorot, EpochControl, Mode, ParamSet, DEFAULT_UNITS};
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::sentiment::{argmax, softmax, ClassProbs, Sentiment, N_CLASSES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpParams {
    pub hidden: usize,
    pub dropout: f64,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Stop after this many epochs without a dev macro-F1 gain. Only the
    /// pipeline acts on it, since it needs a dev set; off when `None`.
    pub patience: Option<usize>,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: DEFAULT_UNITS,
            dropout: 0.3,
            lr: 0.001,
            epochs: 10,
            batch_size: 32,
            patience: None,
        }
    }
}

/// `softmax(W2^T relu(W1^T x + b1) + b2)` with inverted dropout on the
/// hidden layer during training.
///
/// Inputs are sparse so wide TF-IDF features only touch the rows of `w1`
/// they activate; a dense input is the special case with every entry set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub input_dim: usize,
    pub hidden: usize,
    pub dropout: f64,
    /// `input_dim x hidden`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `hidden x 3`, row-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl ParamSet for MlpModel {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![&self.w1, &self.b1, &self.w2, &self.b2]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }
}

struct Activations {
    pre: Vec<f64>,
    /// Post-relu, post-dropout hidden values.
    hidden: Vec<f64>,
    /// Per-unit dropout multiplier (0 or 1/keep); all ones at inference.
    mask: Vec<f64>,
    probs: ClassProbs,
}

impl MlpModel {
    pub fn zeros(input_dim: usize, hidden: usize, dropout: f64) -> Self {
        MlpModel {
            input_dim,
            hidden,
            dropout,
            w1: vec![0.0; input_dim * hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden * N_CLASSES],
            b2: vec![0.0; N_CLASSES],
        }
    }

    /// Uniform Glorot weights, zero biases.
    pub fn init(input_dim: usize, hidden: usize, dropout: f64, rng: &mut ChaCha8Rng) -> Self {
        MlpModel {
            input_dim,
            hidden,
            dropout,
            w1: glorot(rng, input_dim, hidden, input_dim * hidden),
            b1: vec![0.0; hidden],
            w2: glorot(rng, hidden, N_CLASSES, hidden * N_CLASSES),
            b2: vec![0.0; N_CLASSES],
        }
    }

    fn activations(&self, x: &SparseVector, mode: Mode<'_>) -> Result<Activations> {
        x.check_dim(self.input_dim)?;
        let h = self.hidden;
        let mut pre = self.b1.clone();
        for (j, v) in x.iter() {
            let row = &self.w1[j * h..(j + 1) * h];
            for (p, w) in pre.iter_mut().zip(row) {
                *p += v * w;
            }
        }
        let mut mask = vec![1.0; h];
        if let Mode::Train(rng) = mode {
            if self.dropout > 0.0 {
                let keep = 1.0 - self.dropout;
                for m in &mut mask {
                    *m = if rng.gen_bool(keep) { 1.0 / keep } else { 0.0 };
                }
            }
        }
        let hidden: Vec<f64> = pre.iter().zip(&mask).map(|(&a, &m)| a.max(0.0) * m).collect();
        let mut logits = [0.0; N_CLASSES];
        logits.copy_from_slice(&self.b2);
        for (k, &hk) in hidden.iter().enumerate() {
            if hk != 0.0 {
                for c in 0..N_CLASSES {
                    logits[c] += hk * self.w2[k * N_CLASSES + c];
                }
            }
        }
        Ok(Activations {
            pre,
            hidden,
            mask,
            probs: softmax(&logits),
        })
    }

    pub fn forward(&self, x: &SparseVector, mode: Mode<'_>) -> Result<ClassProbs> {
        Ok(self.activations(x, mode)?.probs)
    }

    pub fn forward_dense(&self, x: &[f64], mode: Mode<'_>) -> Result<ClassProbs> {
        self.forward(&SparseVector::from_dense(x), mode)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<(Sentiment, ClassProbs)> {
        let p = self.forward(x, Mode::Infer)?;
        Ok((argmax(&p), p))
    }

    /// Mean cross-entropy over the batch and its gradient. Passing an rng
    /// turns dropout on.
    pub fn loss_and_grad(
        &self,
        xs: &[&SparseVector],
        labels: &[Sentiment],
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(f64, MlpModel)> {
        let h = self.hidden;
        let n = xs.len() as f64;
        let mut grad = MlpModel::zeros(self.input_dim, h, self.dropout);
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(labels) {
            let mode = match rng.as_deref_mut() {
                Some(r) => Mode::Train(r),
                None => Mode::Infer,
            };
            let act = self.activations(x, mode)?;
            loss -= act.probs[y.index()].max(f64::MIN_POSITIVE).ln();
            let mut dz = act.probs;
            dz[y.index()] -= 1.0;
            for c in 0..N_CLASSES {
                grad.b2[c] += dz[c] / n;
            }
            let mut da = vec![0.0; h];
            for k in 0..h {
                let row = &self.w2[k * N_CLASSES..(k + 1) * N_CLASSES];
                let mut dh = 0.0;
                for c in 0..N_CLASSES {
                    grad.w2[k * N_CLASSES + c] += act.hidden[k] * dz[c] / n;
                    dh += row[c] * dz[c];
                }
                if act.pre[k] > 0.0 {
                    da[k] = dh * act.mask[k] / n;
                }
            }
            for (g, d) in grad.b1.iter_mut().zip(&da) {
                *g += d;
            }
            for (j, v) in x.iter() {
                let row = &mut grad.w1[j * h..(j + 1) * h];
                for (g, d) in row.iter_mut().zip(&da) {
                    *g += v * d;
                }
            }
        }
        Ok((loss / n, grad))
    }
}

pub fn train_mlp(xs: &[SparseVector], labels: &[Sentiment], params: &MlpParams, seed: u64) -> Result<MlpModel> {
    train_mlp_with(xs, labels, params, seed, |_, _| EpochControl::Continue)
}

/// Mini-batch Adam. One seeded generator drives initialization, the
/// per-epoch shuffle and the dropout masks, in that order. `on_epoch` runs
/// after every epoch and may stop training early.
pub fn train_mlp_with<F>(
    xs: &[SparseVector],
    labels: &[Sentiment],
    params: &MlpParams,
    seed: u64,
    mut on_epoch: F,
) -> Result<MlpModel>
where
    F: FnMut(usize, &MlpModel) -> EpochControl,
{
    check_training_labels(xs.len(), labels)?;
    let dim = crate::features::sparse::common_dim(xs)?;
    if params.batch_size == 0 || params.hidden == 0 {
        return Err(Error::Config("MLP batch size and width must be positive".into()));
    }
    if !(0.0..1.0).contains(&params.dropout) {
        return Err(Error::Config(format!("dropout {} outside [0, 1)", params.dropout)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = MlpModel::init(dim, params.hidden, params.dropout, &mut rng);
    let mut opt = Optimizer::Adam(Adam::new(params.lr));
    let mut order: Vec<usize> = (0..xs.len()).collect();
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(params.batch_size) {
            let bx: Vec<&SparseVector> = batch.iter().map(|&i| &xs[i]).collect();
            let by: Vec<Sentiment> = batch.iter().map(|&i| labels[i]).collect();
            let (loss, grad) = model.loss_and_grad(&bx, &by, Some(&mut rng))?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss);
            }
            opt.step(&mut model, &grad);
        }
        if on_epoch(epoch, &model) == EpochControl::Stop {
            break;
        }
    }
    Ok(model)
}
