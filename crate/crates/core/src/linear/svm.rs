//! L2-regularized hinge-loss SVM solved in the dual by coordinate descent,
//! and its one-vs-one composition over the three sentiment classes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::sentiment::{argmax, ClassProbs, Sentiment, N_CLASSES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub c: f64,
    /// Stop once the largest projected-gradient violation drops below this.
    pub tol: f64,
    pub max_epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-4,
            max_epochs: 1000,
        }
    }
}

/// `sign(w . x + b)` classifier. The dual variables and the per-epoch dual
/// objective are kept for diagnostics but not serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryLinearModel {
    pub w: Vec<f64>,
    pub b: f64,
    #[serde(skip)]
    pub alphas: Vec<f64>,
    #[serde(skip)]
    pub dual_trace: Vec<f64>,
    #[serde(skip)]
    pub converged: bool,
}

impl BinaryLinearModel {
    pub fn decision(&self, x: &SparseVector) -> Result<f64> {
        x.check_dim(self.w.len())?;
        Ok(x.dot_dense(&self.w) + self.b)
    }
}

/// Trains on labels in {-1, +1}. The bias is learned as the weight of an
/// implicit constant-1 feature, so it is regularized like any other weight.
pub fn train_svm_binary(xs: &[SparseVector], ys: &[i8], params: &SvmParams, seed: u64) -> Result<BinaryLinearModel> {
    if xs.len() != ys.len() {
        return Err(Error::Arity {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if let Some(&bad) = ys.iter().find(|&&y| y != 1 && y != -1) {
        return Err(Error::Fit(format!("binary label {bad} is not +1 or -1")));
    }
    if !(ys.contains(&1) && ys.contains(&-1)) {
        return Err(Error::DegenerateLabels {
            missing: None,
            message: "binary SVM needs both +1 and -1 samples".into(),
        });
    }
    if params.c.is_nan() || params.c <= 0.0 {
        return Err(Error::Config(format!("SVM C must be positive, got {}", params.c)));
    }
    let dim = crate::features::sparse::common_dim(xs)?;
    let n = xs.len();
    let c = params.c;

    let diag: Vec<f64> = xs.iter().map(|x| x.dot(x) + 1.0).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    let mut converged = false;

    for _ in 0..params.max_epochs {
        order.shuffle(&mut rng);
        let mut max_violation: f64 = 0.0;
        for &i in &order {
            let y = ys[i] as f64;
            let g = y * (xs[i].dot_dense(&w) + b) - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == c {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / diag[i]).clamp(0.0, c);
                let delta = (alpha[i] - old) * y;
                xs[i].add_to(delta, &mut w);
                b += delta;
            }
        }
        trace.push(dual_objective(&alpha, &w, b));
        if max_violation < params.tol {
            converged = true;
            break;
        }
    }

    Ok(BinaryLinearModel {
        w,
        b,
        alphas: alpha,
        dual_trace: trace,
        converged,
    })
}

/// `sum(alpha) - |w_aug|^2 / 2`, the quantity coordinate descent maximizes.
fn dual_objective(alpha: &[f64], w: &[f64], b: f64) -> f64 {
    let wsq: f64 = w.iter().map(|v| v * v).sum::<f64>() + b * b;
    alpha.iter().sum::<f64>() - 0.5 * wsq
}

/// Class pairs in canonical order. In each pair the first class is the
/// positive side of the binary problem.
pub const PAIRS: [(Sentiment, Sentiment); 3] = [
    (Sentiment::Negative, Sentiment::Neutral),
    (Sentiment::Negative, Sentiment::Positive),
    (Sentiment::Neutral, Sentiment::Positive),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvoSvmModel {
    /// One model per entry of [`PAIRS`].
    pub pair_models: Vec<BinaryLinearModel>,
}

fn require_all_classes(labels: &[Sentiment]) -> Result<()> {
    for class in Sentiment::ALL {
        if !labels.contains(&class) {
            return Err(Error::missing_class(class));
        }
    }
    Ok(())
}

/// Pair `p` trains on the samples of its two classes only, with seed `seed + p`.
pub fn train_ovo_svm(xs: &[SparseVector], labels: &[Sentiment], params: &SvmParams, seed: u64) -> Result<OvoSvmModel> {
    if xs.len() != labels.len() {
        return Err(Error::Arity {
            left: xs.len(),
            right: labels.len(),
        });
    }
    require_all_classes(labels)?;
    let pair_models = PAIRS
        .par_iter()
        .enumerate()
        .map(|(p, &(pos, neg))| {
            let (sub_x, sub_y) = pair_subset(xs, labels, pos, neg);
            train_svm_binary(&sub_x, &sub_y, params, seed.wrapping_add(p as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OvoSvmModel { pair_models })
}

/// The binary training set for one class pair: `pos` maps to +1, `neg` to -1.
pub fn pair_subset(
    xs: &[SparseVector],
    labels: &[Sentiment],
    pos: Sentiment,
    neg: Sentiment,
) -> (Vec<SparseVector>, Vec<i8>) {
    xs.iter()
        .zip(labels)
        .filter_map(|(x, &l)| match l {
            l if l == pos => Some((x.clone(), 1)),
            l if l == neg => Some((x.clone(), -1)),
            _ => None,
        })
        .unzip()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Turns the three pairwise decision values into class probabilities:
/// each pair gives `sigmoid(d)` to its first class and `sigmoid(-d)` to its
/// second, and the votes are divided by the number of pairs.
pub fn pairwise_probs(decisions: &[f64; 3]) -> ClassProbs {
    let mut votes = [0.0; N_CLASSES];
    for (&(a, b), &d) in PAIRS.iter().zip(decisions) {
        votes[a.index()] += sigmoid(d);
        votes[b.index()] += sigmoid(-d);
    }
    votes.map(|v| v / PAIRS.len() as f64)
}

impl OvoSvmModel {
    pub fn dim(&self) -> usize {
        self.pair_models[0].w.len()
    }

    pub fn decisions(&self, x: &SparseVector) -> Result<[f64; 3]> {
        let mut d = [0.0; 3];
        for (out, m) in d.iter_mut().zip(&self.pair_models) {
            *out = m.decision(x)?;
        }
        Ok(d)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<(Sentiment, ClassProbs)> {
        let probs = pairwise_probs(&self.decisions(x)?);
        Ok((argmax(&probs), probs))
    }
}
