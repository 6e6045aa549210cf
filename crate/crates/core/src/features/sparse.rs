use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted `(index, value)` pairs over a fixed dimension. Zero values are
/// never stored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from arbitrary-order pairs; duplicates are summed and zeros dropped.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            if i >= dim {
                return Err(Error::Dim {
                    expected: dim,
                    found: i + 1,
                });
            }
            if indices.last() == Some(&i) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(i);
                values.push(v);
            }
        }
        let mut out = SparseVector { dim, indices, values };
        out.drop_zeros();
        Ok(out)
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .unzip();
        SparseVector {
            dim: dense.len(),
            indices,
            values,
        }
    }

    fn drop_zeros(&mut self) {
        let mut k = 0;
        for j in 0..self.indices.len() {
            if self.values[j] != 0.0 {
                self.indices[k] = self.indices[j];
                self.values[k] = self.values[j];
                k += 1;
            }
        }
        self.indices.truncate(k);
        self.values.truncate(k);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Value at `index`, zero when absent.
    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(k) => self.values[k],
            Err(_) => 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Scales to unit L2 norm; the zero vector is left alone.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for v in &mut self.values {
                *v /= n;
            }
        }
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    /// `dense += scale * self`
    pub fn add_to(&self, scale: f64, dense: &mut [f64]) {
        for (i, v) in self.iter() {
            dense[i] += scale * v;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.add_to(1.0, &mut out);
        out
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            return Err(Error::Dim {
                expected,
                found: self.dim,
            });
        }
        Ok(())
    }
}

/// Ensures every vector has the same dimension and returns it.
pub(crate) fn common_dim(xs: &[SparseVector]) -> Result<usize> {
    let dim = xs.first().map(SparseVector::dim).unwrap_or(0);
    for x in xs {
        x.check_dim(dim)?;
    }
    Ok(dim)
}
