use serde::{Deserialize, Serialize};

use super::ParamSet;

/// Adam with bias correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }
}

/// RMSProp: `v = rho v + (1 - rho) g^2; p -= lr g / (sqrt(v) + eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsProp {
    pub lr: f64,
    pub rho: f64,
    pub eps: f64,
    mean_square: Vec<Vec<f64>>,
}

impl RmsProp {
    pub fn new(lr: f64) -> Self {
        RmsProp {
            lr,
            rho: 0.9,
            eps: 1e-8,
            mean_square: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Optimizer {
    Adam(Adam),
    RmsProp(RmsProp),
}

fn shaped_like(bufs: &mut Vec<Vec<f64>>, grads: &[&[f64]]) {
    if bufs.is_empty() {
        *bufs = grads.iter().map(|g| vec![0.0; g.len()]).collect();
    }
}

impl Optimizer {
    pub fn lr(&self) -> f64 {
        match self {
            Optimizer::Adam(a) => a.lr,
            Optimizer::RmsProp(r) => r.lr,
        }
    }

    /// Applies one update. Moment buffers are allocated on first use to
    /// mirror the parameter shapes.
    pub fn step<P: ParamSet>(&mut self, params: &mut P, grad: &P) {
        let grads = grad.tensors();
        match self {
            Optimizer::Adam(a) => {
                shaped_like(&mut a.m, &grads);
                shaped_like(&mut a.v, &grads);
                a.step += 1;
                let c1 = 1.0 - a.beta1.powi(a.step as i32);
                let c2 = 1.0 - a.beta2.powi(a.step as i32);
                for (((p, g), m), v) in params.tensors_mut().into_iter().zip(&grads).zip(&mut a.m).zip(&mut a.v) {
                    for j in 0..p.len() {
                        m[j] = a.beta1 * m[j] + (1.0 - a.beta1) * g[j];
                        v[j] = a.beta2 * v[j] + (1.0 - a.beta2) * g[j] * g[j];
                        let m_hat = m[j] / c1;
                        let v_hat = v[j] / c2;
                        p[j] -= a.lr * m_hat / (v_hat.sqrt() + a.eps);
                    }
                }
            }
            Optimizer::RmsProp(r) => {
                shaped_like(&mut r.mean_square, &grads);
                for ((p, g), s) in params.tensors_mut().into_iter().zip(&grads).zip(&mut r.mean_square) {
                    for j in 0..p.len() {
                        s[j] = r.rho * s[j] + (1.0 - r.rho) * g[j] * g[j];
                        p[j] -= r.lr * g[j] / (s[j].sqrt() + r.eps);
                    }
                }
            }
        }
    }
}
