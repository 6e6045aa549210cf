//! Soft voting over a linear SVM, logistic regression and a random forest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::forest::{fit_forest, ForestParams, RandomForest};
use crate::linear::{train_logreg, train_ovo_svm, LogRegModel, LogRegParams, OvoSvmModel, SvmParams};
use crate::sentiment::{argmax, ClassProbs, Sentiment, N_CLASSES};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct VotingParams {
    pub svm: SvmParams,
    pub logreg: LogRegParams,
    pub forest: ForestParams,
}

/// Members in fixed order: SVM, logistic regression, forest. Equal weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingEnsemble {
    pub svm: OvoSvmModel,
    pub logreg: LogRegModel,
    pub forest: RandomForest,
}

fn member<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Member {
        member: name,
        source: Box::new(e),
    })
}

/// Members get seeds `seed`, `seed + 1`, `seed + 2` (logistic regression is
/// deterministic and ignores its seed).
pub fn fit_voting(
    xs: &[SparseVector],
    labels: &[Sentiment],
    params: &VotingParams,
    seed: u64,
) -> Result<VotingEnsemble> {
    let svm = member("svm", train_ovo_svm(xs, labels, &params.svm, seed))?;
    let logreg = member("logreg", train_logreg(xs, labels, &params.logreg))?;
    let forest = member("forest", fit_forest(xs, labels, &params.forest, seed.wrapping_add(2)))?;
    Ok(VotingEnsemble { svm, logreg, forest })
}

/// Sums the member distributions and takes the argmax of the sum; the
/// returned probabilities are the mean.
pub fn soft_vote(members: &[ClassProbs]) -> (Sentiment, ClassProbs) {
    let mut sum = [0.0; N_CLASSES];
    for p in members {
        for k in 0..N_CLASSES {
            sum[k] += p[k];
        }
    }
    let label = argmax(&sum);
    let n = members.len().max(1) as f64;
    (label, sum.map(|s| s / n))
}

impl VotingEnsemble {
    pub fn member_probs(&self, x: &SparseVector) -> Result<[ClassProbs; 3]> {
        Ok([
            self.svm.predict(x)?.1,
            self.logreg.predict(x)?.1,
            self.forest.predict_proba(x)?.1,
        ])
    }

    pub fn predict(&self, x: &SparseVector) -> Result<(Sentiment, ClassProbs)> {
        Ok(soft_vote(&self.member_probs(x)?))
    }
}
