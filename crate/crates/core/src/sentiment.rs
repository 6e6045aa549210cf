//! The three-way sentiment label and the shared argmax rule.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Sentence polarity. Canonical class order is `Negative, Neutral, Positive`
/// (values -1, 0, 1) and every probability vector in this crate uses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i64")]
pub enum Sentiment {
    Negative,
    Neutral,
    Positive,
}

/// Number of classes.
pub const N_CLASSES: usize = 3;

/// A probability (or score) per class in canonical order.
pub type ClassProbs = [f64; N_CLASSES];

/// Scores closer than this are treated as tied by [`argmax`].
///
/// Summing the same three probabilities in a different order can move the
/// result by a few ulps; without a tolerance the tie-break would depend on
/// member order.
pub const TIE_EPS: f64 = 1e-12;

impl Sentiment {
    pub const ALL: [Sentiment; N_CLASSES] = [Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive];

    pub fn value(self) -> i8 {
        match self {
            Sentiment::Negative => -1,
            Sentiment::Neutral => 0,
            Sentiment::Positive => 1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Sentiment::Negative),
            0 => Some(Sentiment::Neutral),
            1 => Some(Sentiment::Positive),
            _ => None,
        }
    }

    /// Position in the canonical class order.
    pub fn index(self) -> usize {
        match self {
            Sentiment::Negative => 0,
            Sentiment::Neutral => 1,
            Sentiment::Positive => 2,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            Sentiment::Negative => "Negative",
            Sentiment::Neutral => "Neutral",
            Sentiment::Positive => "Positive",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl From<Sentiment> for i8 {
    fn from(s: Sentiment) -> i8 {
        s.value()
    }
}

impl TryFrom<i64> for Sentiment {
    type Error = String;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        Sentiment::from_value(v).ok_or_else(|| format!("sentiment {v} is not one of -1, 0, 1"))
    }
}

/// Picks the highest-scoring class; near-ties (within [`TIE_EPS`]) go to the
/// smaller sentiment value.
pub fn argmax(scores: &ClassProbs) -> Sentiment {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let idx = scores.iter().position(|&s| s >= best - TIE_EPS).unwrap_or(0);
    Sentiment::from_index(idx)
}

/// Numerically stable softmax over the three class logits.
pub fn softmax(logits: &ClassProbs) -> ClassProbs {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; N_CLASSES];
    let mut total = 0.0;
    for (o, &z) in out.iter_mut().zip(logits) {
        *o = (z - max).exp();
        total += *o;
    }
    for o in &mut out {
        *o /= total;
    }
    out
}
