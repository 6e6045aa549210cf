use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::sentiment::{argmax, softmax, ClassProbs, Sentiment, N_CLASSES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegParams {
    /// L2 strength on the weights (biases are not penalized).
    pub lambda: f64,
    pub lr: f64,
    pub max_iters: usize,
    /// Stop when the gradient's largest absolute entry falls below this.
    pub tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            lambda: 1e-4,
            lr: 0.1,
            max_iters: 500,
            tol: 1e-6,
        }
    }
}

/// Multinomial logistic regression. Weight rows follow canonical class order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub dim: usize,
    /// `3 * dim`, class-major.
    pub weights: Vec<f64>,
    pub bias: [f64; N_CLASSES],
    pub lambda: f64,
    #[serde(skip)]
    pub loss_trace: Vec<f64>,
}

impl LogRegModel {
    pub fn zeros(dim: usize, lambda: f64) -> Self {
        LogRegModel {
            dim,
            weights: vec![0.0; N_CLASSES * dim],
            bias: [0.0; N_CLASSES],
            lambda,
            loss_trace: Vec::new(),
        }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.weights[k * self.dim..(k + 1) * self.dim]
    }

    pub fn logits(&self, x: &SparseVector) -> Result<ClassProbs> {
        x.check_dim(self.dim)?;
        let mut z = self.bias;
        for (k, zk) in z.iter_mut().enumerate() {
            *zk += x.dot_dense(self.row(k));
        }
        Ok(z)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<(Sentiment, ClassProbs)> {
        let probs = softmax(&self.logits(x)?);
        Ok((argmax(&probs), probs))
    }

    /// Weights followed by biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.extend_from_slice(&self.bias);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.weights.len() + N_CLASSES);
        let (w, b) = p.split_at(self.weights.len());
        self.weights.copy_from_slice(w);
        self.bias.copy_from_slice(b);
    }

    /// Mean cross-entropy plus `lambda / 2 * |W|^2`, with its gradient laid
    /// out like [`params`](Self::params).
    pub fn loss_and_grad(&self, xs: &[SparseVector], labels: &[Sentiment]) -> Result<(f64, Vec<f64>)> {
        let n = xs.len() as f64;
        let mut grad = vec![0.0; self.weights.len() + N_CLASSES];
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(labels) {
            let probs = softmax(&self.logits(x)?);
            loss -= probs[y.index()].max(f64::MIN_POSITIVE).ln();
            for k in 0..N_CLASSES {
                let r = probs[k] - if k == y.index() { 1.0 } else { 0.0 };
                x.add_to(r / n, &mut grad[k * self.dim..(k + 1) * self.dim]);
                grad[self.weights.len() + k] += r / n;
            }
        }
        loss /= n;
        let mut wsq = 0.0;
        for (g, &w) in grad.iter_mut().zip(&self.weights) {
            *g += self.lambda * w;
            wsq += w * w;
        }
        loss += 0.5 * self.lambda * wsq;
        Ok((loss, grad))
    }
}

/// Full-batch gradient descent from the zero model.
pub fn train_logreg(xs: &[SparseVector], labels: &[Sentiment], params: &LogRegParams) -> Result<LogRegModel> {
    if xs.len() != labels.len() {
        return Err(Error::Arity {
            left: xs.len(),
            right: labels.len(),
        });
    }
    let distinct = Sentiment::ALL.iter().filter(|c| labels.contains(c)).count();
    if distinct < 2 {
        return Err(Error::DegenerateLabels {
            missing: None,
            message: format!("logistic regression needs two classes, found {distinct}"),
        });
    }
    let dim = crate::features::sparse::common_dim(xs)?;
    let mut model = LogRegModel::zeros(dim, params.lambda);
    let mut theta = model.params();
    for _ in 0..params.max_iters {
        let (loss, grad) = model.loss_and_grad(xs, labels)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        model.loss_trace.push(loss);
        if grad.iter().fold(0.0f64, |m, g| m.max(g.abs())) < params.tol {
            break;
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= params.lr * g;
        }
        model.set_params(&theta);
    }
    Ok(model)
}
