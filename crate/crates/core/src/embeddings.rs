//! Pretrained word vectors: loading, sentence averaging and padded sequences.
//!
//! Out-of-vocabulary words map to the zero vector everywhere.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Default sequence cap for the recurrent model.
pub const DEFAULT_MAX_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    /// Lines whose word had already been seen (the later line wins).
    pub duplicates: usize,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
            duplicates: 0,
        }
    }

    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Dim {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if self.vectors.insert(word.into(), vector).is_some() {
            self.duplicates += 1;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }
}

/// Reads the whitespace-separated text format: a word followed by `dim`
/// decimal numbers per line. `dim` comes from the first line.
pub fn load_embeddings<R: BufRead>(reader: R) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next() else {
            continue;
        };
        let vector = fields
            .map(|f| {
                f.parse::<f64>().map_err(|e| Error::Format {
                    line: Some(lineno),
                    message: format!("bad number {f:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let table = match &mut table {
            Some(t) => t,
            None => {
                if vector.is_empty() {
                    return Err(Error::Format {
                        line: Some(lineno),
                        message: format!("word {word:?} has no vector"),
                    });
                }
                table.insert(EmbeddingTable::new(vector.len()))
            }
        };
        if vector.len() != table.dim {
            return Err(Error::Format {
                line: Some(lineno),
                message: format!("expected {} values, found {}", table.dim, vector.len()),
            });
        }
        table.insert(word, vector)?;
    }
    table.ok_or_else(|| Error::Format {
        line: None,
        message: "embedding file is empty".into(),
    })
}

/// Mean over all tokens; unknown tokens count as zero vectors.
pub fn average_embedding<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim];
    if tokens.is_empty() {
        return sum;
    }
    for tok in tokens {
        if let Some(v) = table.get(tok.as_ref()) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
    }
    let n = tokens.len() as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    sum
}

/// Fixed-length sequence of token vectors with a prefix mask.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedSequence {
    dim: usize,
    /// `max_len * dim`, row-major.
    rows: Vec<f64>,
    mask: Vec<bool>,
}

impl PaddedSequence {
    /// Wraps explicit rows (`len` real rows) padded out to `max_len`.
    pub fn from_rows(rows: &[Vec<f64>], dim: usize, max_len: usize) -> Self {
        let mut seq = PaddedSequence {
            dim,
            rows: vec![0.0; max_len * dim],
            mask: vec![false; max_len],
        };
        for (t, row) in rows.iter().take(max_len).enumerate() {
            assert_eq!(row.len(), dim, "row {t} has wrong width");
            seq.rows[t * dim..(t + 1) * dim].copy_from_slice(row);
            seq.mask[t] = true;
        }
        seq
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_len(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of unmasked (leading) positions.
    pub fn len(&self) -> usize {
        self.mask.iter().take_while(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t * self.dim..(t + 1) * self.dim]
    }
}

/// Token vectors in order, truncated to `max_len` from the tail and
/// zero-padded with a false mask after the last token.
pub fn sequence_embedding<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable, max_len: usize) -> PaddedSequence {
    assert!(max_len >= 1, "max_len must be at least 1");
    let zero = vec![0.0; table.dim];
    let rows: Vec<Vec<f64>> = tokens
        .iter()
        .take(max_len)
        .map(|t| table.get(t.as_ref()).map_or_else(|| zero.clone(), <[f64]>::to_vec))
        .collect();
    PaddedSequence::from_rows(&rows, table.dim, max_len)
}
