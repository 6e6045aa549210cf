use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::optim::{Optimizer, RmsProp};
use super::{check_training_labels, clip_global_norm, glorot, EpochControl, ParamSet, DEFAULT_UNITS};
use crate::embeddings::PaddedSequence;
use crate::error::{Error, Result};
use crate::sentiment::{argmax, softmax, ClassProbs, Sentiment, N_CLASSES};

/// Gate blocks inside the packed `4 * units` pre-activation vector.
const GATE_I: usize = 0;
const GATE_F: usize = 1;
const GATE_O: usize = 2;
const GATE_G: usize = 3;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// One LSTM direction. The four gates (input, forget, output, candidate)
/// are packed side by side: `w` is `input_dim x 4u`, `u` is `u x 4u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmCell {
    pub input_dim: usize,
    pub units: usize,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
}

impl ParamSet for LstmCell {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![&self.w, &self.u, &self.b]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.w, &mut self.u, &mut self.b]
    }
}

/// Everything a step's backward pass needs.
struct StepCache {
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Gate activations, packed like the pre-activations.
    gates: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
}

impl LstmCell {
    pub fn zeros(input_dim: usize, units: usize) -> Self {
        LstmCell {
            input_dim,
            units,
            w: vec![0.0; input_dim * 4 * units],
            u: vec![0.0; units * 4 * units],
            b: vec![0.0; 4 * units],
        }
    }

    /// Glorot-uniform per gate, zero biases except the forget gate's 1.0.
    pub fn init(input_dim: usize, units: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut b = vec![0.0; 4 * units];
        b[GATE_F * units..(GATE_F + 1) * units].fill(1.0);
        LstmCell {
            input_dim,
            units,
            w: glorot(rng, input_dim, units, input_dim * 4 * units),
            u: glorot(rng, units, units, units * 4 * units),
            b,
        }
    }

    fn step_cached(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> StepCache {
        let u4 = 4 * self.units;
        let mut z = self.b.clone();
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (zk, w) in z.iter_mut().zip(&self.w[j * u4..(j + 1) * u4]) {
                    *zk += xj * w;
                }
            }
        }
        for (r, &hr) in h_prev.iter().enumerate() {
            if hr != 0.0 {
                for (zk, u) in z.iter_mut().zip(&self.u[r * u4..(r + 1) * u4]) {
                    *zk += hr * u;
                }
            }
        }
        let n = self.units;
        let gates: Vec<f64> = z
            .iter()
            .enumerate()
            .map(|(k, &v)| if k / n == GATE_G { v.tanh() } else { sigmoid(v) })
            .collect();
        let mut c = vec![0.0; n];
        let mut h = vec![0.0; n];
        let mut tanh_c = vec![0.0; n];
        for k in 0..n {
            c[k] = gates[GATE_F * n + k] * c_prev[k] + gates[GATE_I * n + k] * gates[GATE_G * n + k];
            tanh_c[k] = c[k].tanh();
            h[k] = gates[GATE_O * n + k] * tanh_c[k];
        }
        StepCache {
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            gates,
            tanh_c,
            h,
            c,
        }
    }

    /// Accumulates parameter gradients into `grad` and returns the
    /// gradients flowing into `(h_prev, c_prev)`.
    fn step_backward(
        &self,
        x: &[f64],
        cache: &StepCache,
        dh: &[f64],
        dc: &[f64],
        grad: &mut LstmCell,
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.units;
        let u4 = 4 * n;
        let g = &cache.gates;
        let mut dz = vec![0.0; u4];
        let mut dc_prev = vec![0.0; n];
        for k in 0..n {
            let (i, f, o, cand) = (
                g[GATE_I * n + k],
                g[GATE_F * n + k],
                g[GATE_O * n + k],
                g[GATE_G * n + k],
            );
            let tc = cache.tanh_c[k];
            let dct = dc[k] + dh[k] * o * (1.0 - tc * tc);
            dz[GATE_I * n + k] = dct * cand * i * (1.0 - i);
            dz[GATE_F * n + k] = dct * cache.c_prev[k] * f * (1.0 - f);
            dz[GATE_O * n + k] = dh[k] * tc * o * (1.0 - o);
            dz[GATE_G * n + k] = dct * i * (1.0 - cand * cand);
            dc_prev[k] = dct * f;
        }
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (gw, d) in grad.w[j * u4..(j + 1) * u4].iter_mut().zip(&dz) {
                    *gw += xj * d;
                }
            }
        }
        let mut dh_prev = vec![0.0; n];
        for r in 0..n {
            let hr = cache.h_prev[r];
            let urow = &self.u[r * u4..(r + 1) * u4];
            let grow = &mut grad.u[r * u4..(r + 1) * u4];
            let mut acc = 0.0;
            for k in 0..u4 {
                grow[k] += hr * dz[k];
                acc += urow[k] * dz[k];
            }
            dh_prev[r] = acc;
        }
        for (gb, d) in grad.b.iter_mut().zip(&dz) {
            *gb += d;
        }
        (dh_prev, dc_prev)
    }
}

impl LstmCell {
    /// Gradient of `dh . h + dc . c` for one step from `(h_prev, c_prev)`:
    /// returns the parameter gradient and the gradients reaching `h_prev`
    /// and `c_prev`.
    pub fn step_vjp(
        &self,
        x: &[f64],
        h_prev: &[f64],
        c_prev: &[f64],
        dh: &[f64],
        dc: &[f64],
    ) -> Result<(LstmCell, Vec<f64>, Vec<f64>)> {
        lstm_step(self, x, h_prev, c_prev)?;
        for found in [dh.len(), dc.len()] {
            if found != self.units {
                return Err(Error::Dim {
                    expected: self.units,
                    found,
                });
            }
        }
        let cache = self.step_cached(x, h_prev, c_prev);
        let mut grad = LstmCell::zeros(self.input_dim, self.units);
        let (dh_prev, dc_prev) = self.step_backward(x, &cache, dh, dc, &mut grad);
        Ok((grad, dh_prev, dc_prev))
    }
}

/// A single LSTM step:
/// `c = f * c_prev + i * g`, `h = o * tanh(c)` with sigmoid gates `i, f, o`
/// and a tanh candidate `g`.
pub fn lstm_step(cell: &LstmCell, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    for (expected, found) in [
        (cell.input_dim, x.len()),
        (cell.units, h_prev.len()),
        (cell.units, c_prev.len()),
    ] {
        if expected != found {
            return Err(Error::Dim { expected, found });
        }
    }
    let cache = cell.step_cached(x, h_prev, c_prev);
    Ok((cache.h, cache.c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BiLstmParams {
    pub units: usize,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Global gradient-norm cap applied to every batch gradient.
    pub clip_norm: f64,
    pub max_len: usize,
    /// See [`MlpParams::patience`](crate::neural::MlpParams::patience).
    pub patience: Option<usize>,
}

impl Default for BiLstmParams {
    fn default() -> Self {
        BiLstmParams {
            units: DEFAULT_UNITS,
            lr: 0.01,
            epochs: 10,
            batch_size: 32,
            clip_norm: 5.0,
            max_len: crate::embeddings::DEFAULT_MAX_LEN,
            patience: None,
        }
    }
}

/// Forward and backward LSTMs over the unmasked prefix; their final hidden
/// states are concatenated and fed to a softmax layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiLstmModel {
    pub forward: LstmCell,
    pub backward: LstmCell,
    /// `2u x 3`, row-major.
    pub w_out: Vec<f64>,
    pub b_out: Vec<f64>,
}

impl ParamSet for BiLstmModel {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut t = self.forward.tensors();
        t.extend(self.backward.tensors());
        t.push(&self.w_out);
        t.push(&self.b_out);
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.forward.tensors_mut();
        t.extend(self.backward.tensors_mut());
        t.push(&mut self.w_out);
        t.push(&mut self.b_out);
        t
    }
}

struct EncodeCache {
    fwd: Vec<StepCache>,
    bwd: Vec<StepCache>,
    rep: Vec<f64>,
    probs: ClassProbs,
}

impl BiLstmModel {
    pub fn zeros(input_dim: usize, units: usize) -> Self {
        BiLstmModel {
            forward: LstmCell::zeros(input_dim, units),
            backward: LstmCell::zeros(input_dim, units),
            w_out: vec![0.0; 2 * units * N_CLASSES],
            b_out: vec![0.0; N_CLASSES],
        }
    }

    pub fn init(input_dim: usize, units: usize, rng: &mut ChaCha8Rng) -> Self {
        BiLstmModel {
            forward: LstmCell::init(input_dim, units, rng),
            backward: LstmCell::init(input_dim, units, rng),
            w_out: glorot(rng, 2 * units, N_CLASSES, 2 * units * N_CLASSES),
            b_out: vec![0.0; N_CLASSES],
        }
    }

    pub fn units(&self) -> usize {
        self.forward.units
    }

    pub fn input_dim(&self) -> usize {
        self.forward.input_dim
    }

    fn run(&self, seq: &PaddedSequence) -> Result<EncodeCache> {
        if seq.dim() != self.input_dim() {
            return Err(Error::Dim {
                expected: self.input_dim(),
                found: seq.dim(),
            });
        }
        let len = seq.len();
        if len == 0 {
            return Err(Error::EmptySequence);
        }
        let n = self.units();
        let zero = vec![0.0; n];
        let mut fwd: Vec<StepCache> = Vec::with_capacity(len);
        for t in 0..len {
            let (h, c) = fwd.last().map_or((&zero, &zero), |s| (&s.h, &s.c));
            let next = self.forward.step_cached(seq.row(t), h, c);
            fwd.push(next);
        }
        let mut bwd: Vec<StepCache> = Vec::with_capacity(len);
        for t in (0..len).rev() {
            let (h, c) = bwd.last().map_or((&zero, &zero), |s| (&s.h, &s.c));
            let next = self.backward.step_cached(seq.row(t), h, c);
            bwd.push(next);
        }
        let mut rep = fwd[len - 1].h.clone();
        rep.extend_from_slice(&bwd[len - 1].h);
        let mut logits = [0.0; N_CLASSES];
        logits.copy_from_slice(&self.b_out);
        for (r, &v) in rep.iter().enumerate() {
            for c in 0..N_CLASSES {
                logits[c] += v * self.w_out[r * N_CLASSES + c];
            }
        }
        Ok(EncodeCache {
            fwd,
            bwd,
            rep,
            probs: softmax(&logits),
        })
    }

    /// The concatenated final hidden states (length `2 * units`).
    pub fn representation(&self, seq: &PaddedSequence) -> Result<Vec<f64>> {
        Ok(self.run(seq)?.rep)
    }

    pub fn encode(&self, seq: &PaddedSequence) -> Result<ClassProbs> {
        Ok(self.run(seq)?.probs)
    }

    pub fn predict(&self, seq: &PaddedSequence) -> Result<(Sentiment, ClassProbs)> {
        let p = self.encode(seq)?;
        Ok((argmax(&p), p))
    }

    /// Mean cross-entropy over the batch and its full BPTT gradient.
    pub fn loss_and_grad(&self, seqs: &[&PaddedSequence], labels: &[Sentiment]) -> Result<(f64, BiLstmModel)> {
        let n = self.units();
        let m = seqs.len() as f64;
        let mut grad = BiLstmModel::zeros(self.input_dim(), n);
        let mut loss = 0.0;
        for (seq, &y) in seqs.iter().zip(labels) {
            let cache = self.run(seq)?;
            loss -= cache.probs[y.index()].max(f64::MIN_POSITIVE).ln();
            let mut dz = cache.probs;
            dz[y.index()] -= 1.0;
            dz.iter_mut().for_each(|d| *d /= m);
            for c in 0..N_CLASSES {
                grad.b_out[c] += dz[c];
            }
            let mut drep = vec![0.0; 2 * n];
            for (r, &v) in cache.rep.iter().enumerate() {
                for c in 0..N_CLASSES {
                    grad.w_out[r * N_CLASSES + c] += v * dz[c];
                    drep[r] += self.w_out[r * N_CLASSES + c] * dz[c];
                }
            }
            let len = cache.fwd.len();
            // forward direction consumed rows 0..len
            let (mut dh, mut dc) = (drep[..n].to_vec(), vec![0.0; n]);
            for t in (0..len).rev() {
                (dh, dc) = self
                    .forward
                    .step_backward(seq.row(t), &cache.fwd[t], &dh, &dc, &mut grad.forward);
            }
            // backward direction step s consumed row len-1-s
            let (mut dh, mut dc) = (drep[n..].to_vec(), vec![0.0; n]);
            for s in (0..len).rev() {
                (dh, dc) =
                    self.backward
                        .step_backward(seq.row(len - 1 - s), &cache.bwd[s], &dh, &dc, &mut grad.backward);
            }
        }
        Ok((loss / m, grad))
    }
}

pub fn train_bilstm(
    seqs: &[PaddedSequence],
    labels: &[Sentiment],
    params: &BiLstmParams,
    seed: u64,
) -> Result<BiLstmModel> {
    train_bilstm_with(seqs, labels, params, seed, |_, _| EpochControl::Continue)
}

/// Mini-batch RMSProp with the batch gradient clipped to `clip_norm`.
pub fn train_bilstm_with<F>(
    seqs: &[PaddedSequence],
    labels: &[Sentiment],
    params: &BiLstmParams,
    seed: u64,
    mut on_epoch: F,
) -> Result<BiLstmModel>
where
    F: FnMut(usize, &BiLstmModel) -> EpochControl,
{
    check_training_labels(seqs.len(), labels)?;
    if params.batch_size == 0 || params.units == 0 {
        return Err(Error::Config("Bi-LSTM batch size and width must be positive".into()));
    }
    let dim = seqs[0].dim();
    if let Some(bad) = seqs.iter().find(|s| s.dim() != dim) {
        return Err(Error::Dim {
            expected: dim,
            found: bad.dim(),
        });
    }
    if seqs.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySequence);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = BiLstmModel::init(dim, params.units, &mut rng);
    let mut opt = Optimizer::RmsProp(RmsProp::new(params.lr));
    let mut order: Vec<usize> = (0..seqs.len()).collect();
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(params.batch_size) {
            let bx: Vec<&PaddedSequence> = batch.iter().map(|&i| &seqs[i]).collect();
            let by: Vec<Sentiment> = batch.iter().map(|&i| labels[i]).collect();
            let (loss, mut grad) = model.loss_and_grad(&bx, &by)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss);
            }
            clip_global_norm(&mut grad, params.clip_norm);
            opt.step(&mut model, &grad);
        }
        if on_epoch(epoch, &model) == EpochControl::Stop {
            break;
        }
    }
    Ok(model)
}
