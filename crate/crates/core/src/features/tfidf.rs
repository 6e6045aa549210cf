use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::ngram::{extract_ngrams, NGramSpec};
use super::sparse::SparseVector;
use crate::error::{Error, Result};

/// Term to index map. Terms are stored in lexicographic order and the
/// index of a term is its position in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    fn from_sorted(terms: Vec<String>) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(mut terms: Vec<String>) -> Self {
        terms.sort();
        terms.dedup();
        Vocabulary::from_sorted(terms)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfidfOptions {
    /// Drop terms seen in fewer documents than this.
    pub min_df: usize,
    /// Keep only the `k` terms with the highest document frequency
    /// (ties go to the lexicographically smaller term).
    pub max_features: Option<usize>,
}

impl Default for TfidfOptions {
    fn default() -> Self {
        TfidfOptions {
            min_df: 1,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    pub spec: NGramSpec,
    pub vocab: Vocabulary,
    /// Smoothed inverse document frequency, aligned with `vocab`.
    pub idf: Vec<f64>,
    pub n_docs: usize,
}

/// Smoothed IDF: `ln((1 + n_docs) / (1 + df)) + 1`.
fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

pub fn fit_tfidf<S: AsRef<str>>(corpus: &[S], spec: NGramSpec) -> Result<TfidfModel> {
    TfidfModel::fit(corpus, spec, TfidfOptions::default())
}

impl TfidfModel {
    pub fn fit<S: AsRef<str>>(corpus: &[S], spec: NGramSpec, options: TfidfOptions) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::Fit("TF-IDF needs at least one document".into()));
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in corpus {
            for term in extract_ngrams(doc.as_ref(), &spec).into_keys() {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(String, usize)> = df.into_iter().filter(|&(_, d)| d >= options.min_df).collect();
        if let Some(k) = options.max_features {
            if kept.len() > k {
                // stable sort keeps lexicographic order among equal df
                kept.sort_by_key(|&(_, d)| std::cmp::Reverse(d));
                kept.truncate(k);
                kept.sort_by(|a, b| a.0.cmp(&b.0));
            }
        }
        if kept.is_empty() {
            return Err(Error::Fit(format!(
                "corpus of {} documents yields no {:?} terms of length {}..={}",
                corpus.len(),
                spec.unit,
                spec.min_n,
                spec.max_n
            )));
        }
        let n_docs = corpus.len();
        let idf = kept.iter().map(|&(_, d)| smoothed_idf(n_docs, d)).collect();
        let vocab = Vocabulary::from_sorted(kept.into_iter().map(|(t, _)| t).collect());
        Ok(TfidfModel {
            spec,
            vocab,
            idf,
            n_docs,
        })
    }

    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    /// Raw counts times IDF, L2-normalized. Unknown terms are dropped.
    pub fn transform(&self, text: &str) -> SparseVector {
        let pairs = extract_ngrams(text, &self.spec)
            .into_iter()
            .filter_map(|(term, tf)| self.vocab.get(&term).map(|i| (i, tf as f64 * self.idf[i])))
            .collect();
        let mut v = SparseVector::from_pairs(self.dim(), pairs).expect("indices come from vocab");
        v.normalize();
        v
    }

    pub fn transform_all<S: AsRef<str>>(&self, texts: &[S]) -> Vec<SparseVector> {
        texts.iter().map(|t| self.transform(t.as_ref())).collect()
    }
}
