//! Confusion matrices, per-class precision/recall/F1 and macro F1 over the
//! fixed class set.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentiment::{Sentiment, N_CLASSES};

/// Rows are gold classes, columns are predicted classes, both in canonical
/// order (-1, 0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; N_CLASSES]; N_CLASSES],
}

impl ConfusionMatrix {
    pub fn get(&self, gold: Sentiment, pred: Sentiment) -> usize {
        self.counts[gold.index()][pred.index()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

pub fn confusion_matrix(gold: &[Sentiment], pred: &[Sentiment]) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::Arity {
            left: gold.len(),
            right: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyEval);
    }
    let mut cm = ConfusionMatrix::default();
    for (g, p) in gold.iter().zip(pred) {
        cm.counts[g.index()][p.index()] += 1;
    }
    Ok(cm)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `(precision, recall, f1)` for one class. A zero denominator yields 0.
pub fn class_prf(cm: &ConfusionMatrix, class: Sentiment) -> (f64, f64, f64) {
    let k = class.index();
    let tp = cm.counts[k][k];
    let predicted: usize = (0..N_CLASSES).map(|g| cm.counts[g][k]).sum();
    let actual: usize = cm.counts[k].iter().sum();
    let p = ratio(tp, predicted);
    let r = ratio(tp, actual);
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Unweighted mean of the three per-class F1 scores.
pub fn macro_f1(cm: &ConfusionMatrix) -> f64 {
    Sentiment::ALL.iter().map(|&c| class_prf(cm, c).2).sum::<f64>() / N_CLASSES as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_samples: usize,
    pub overall: Prf,
    pub positive: Prf,
    pub neutral: Prf,
    pub negative: Prf,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Self {
        let prf = |c| {
            let (precision, recall, f1) = class_prf(cm, c);
            Prf { precision, recall, f1 }
        };
        let (negative, neutral, positive) = (
            prf(Sentiment::Negative),
            prf(Sentiment::Neutral),
            prf(Sentiment::Positive),
        );
        let mean = |f: fn(&Prf) -> f64| (f(&negative) + f(&neutral) + f(&positive)) / 3.0;
        EvalReport {
            n_samples: cm.total(),
            overall: Prf {
                precision: mean(|p| p.precision),
                recall: mean(|p| p.recall),
                f1: macro_f1(cm),
            },
            positive,
            neutral,
            negative,
            confusion: *cm,
        }
    }

    pub fn class(&self, c: Sentiment) -> &Prf {
        match c {
            Sentiment::Negative => &self.negative,
            Sentiment::Neutral => &self.neutral,
            Sentiment::Positive => &self.positive,
        }
    }
}

pub fn evaluate(gold: &[Sentiment], pred: &[Sentiment]) -> Result<EvalReport> {
    Ok(EvalReport::from_confusion(&confusion_matrix(gold, pred)?))
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>9} {:>9} {:>9}", "", "Precision", "Recall", "F1")?;
        for (name, p) in [
            ("Overall", &self.overall),
            ("Positive", &self.positive),
            ("Neutral", &self.neutral),
            ("Negative", &self.negative),
        ] {
            writeln!(f, "{name:<10} {:>9.3} {:>9.3} {:>9.3}", p.precision, p.recall, p.f1)?;
        }
        Ok(())
    }
}
