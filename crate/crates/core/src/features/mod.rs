//! Text features: tokenization, word/character n-grams and TF-IDF.

mod ngram;
pub(crate) mod sparse;
mod tfidf;

pub use ngram::{extract_ngrams, tokenize, NGramSpec, NGramUnit};
pub use sparse::SparseVector;
pub use tfidf::{fit_tfidf, TfidfModel, TfidfOptions, Vocabulary};
