use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NGramUnit {
    Word,
    Char,
}

/// An inclusive range of n-gram lengths over words or characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NGramSpec {
    pub unit: NGramUnit,
    pub min_n: usize,
    pub max_n: usize,
}

impl NGramSpec {
    pub fn new(unit: NGramUnit, min_n: usize, max_n: usize) -> Result<Self> {
        if min_n == 0 || min_n > max_n {
            return Err(Error::Config(format!(
                "n-gram range ({min_n}, {max_n}) needs 1 <= min <= max"
            )));
        }
        Ok(NGramSpec { unit, min_n, max_n })
    }

    pub fn char(min_n: usize, max_n: usize) -> Self {
        Self::new(NGramUnit::Char, min_n, max_n).expect("valid char range")
    }

    pub fn word(min_n: usize, max_n: usize) -> Self {
        Self::new(NGramUnit::Word, min_n, max_n).expect("valid word range")
    }
}

/// Lowercases and splits on runs of Unicode whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase().split_whitespace().map(str::to_owned).collect()
}

/// Counts every n-gram of the requested lengths.
///
/// Character grams run over the whole lowercased text, whitespace included,
/// so grams spanning a word boundary are kept. Word grams are joined with a
/// single space.
pub fn extract_ngrams(text: &str, spec: &NGramSpec) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    match spec.unit {
        NGramUnit::Char => {
            let chars: Vec<char> = text.to_lowercase().chars().collect();
            for n in spec.min_n..=spec.max_n {
                for window in chars.windows(n) {
                    *counts.entry(window.iter().collect()).or_insert(0) += 1;
                }
            }
        }
        NGramUnit::Word => {
            let tokens = tokenize(text);
            for n in spec.min_n..=spec.max_n {
                for window in tokens.windows(n) {
                    *counts.entry(window.join(" ")).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}
