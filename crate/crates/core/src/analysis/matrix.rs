use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{dissimilarity_with, DissimilarityOptions, SignalPair};

/// Symmetric, zero-diagonal table of pairwise dissimilarities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix<T>", bound(deserialize = "T: Scalar"))]
pub struct DissimilarityMatrix<T> {
    labels: Vec<String>,
    values: Vec<Vec<T>>,
}

#[derive(Deserialize)]
struct RawMatrix<T> {
    labels: Vec<String>,
    values: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<RawMatrix<T>> for DissimilarityMatrix<T> {
    type Error = Error;

    fn try_from(raw: RawMatrix<T>) -> Result<Self> {
        DissimilarityMatrix::new(raw.labels, raw.values)
    }
}

impl<T: Scalar> DissimilarityMatrix<T> {
    pub fn new(labels: Vec<String>, values: Vec<Vec<T>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("no labels".into()));
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix(format!("values must be {n}x{n}")));
        }
        for i in 0..n {
            if !values[i][i].is_zero() {
                return Err(Error::InvalidMatrix(format!("diagonal entry {} is not zero", labels[i])));
            }
            for j in 0..n {
                let v = values[i][j];
                if !v.is_finite() || v < T::zero() {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({}, {}) = {v} is not a finite non-negative value",
                        labels[i], labels[j]
                    )));
                }
                if v != values[j][i] {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({}, {}) differs from its mirror",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(DissimilarityMatrix { labels, values })
    }

    /// Builds the matrix from its strict upper triangle, row by row.
    pub fn from_upper(labels: Vec<String>, upper: &[T]) -> Result<Self> {
        let n = labels.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidMatrix(format!(
                "{} upper-triangle values do not fit {n} labels",
                upper.len()
            )));
        }
        let mut values = vec![vec![T::zero(); n]; n];
        let mut it = upper.iter();
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().expect("length checked");
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        DissimilarityMatrix::new(labels, values)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i][j]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Reorders rows and columns; `order[k]` is the old index of new row `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        let labels = order.iter().map(|&i| self.labels[i].clone()).collect();
        let values = order
            .iter()
            .map(|&i| order.iter().map(|&j| self.values[i][j]).collect())
            .collect();
        Ok(DissimilarityMatrix { labels, values })
    }
}

/// Evaluates every pair in parallel; the first failure in row order aborts.
pub fn build_matrix<T: Scalar>(
    pairs: &[SignalPair<T>],
    opts: &DissimilarityOptions,
) -> Result<DissimilarityMatrix<T>> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 motions, got {n}")));
    }
    let labels: Vec<String> = pairs.iter().map(|p| p.label().to_string()).collect();
    for (i, label) in labels.iter().enumerate() {
        if labels[..i].contains(label) {
            return Err(Error::InvalidArgument(format!("duplicate motion label `{label}`")));
        }
    }

    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results: Vec<Result<T>> = cells
        .par_iter()
        .map(|&(i, j)| dissimilarity_with(&pairs[i], &pairs[j], opts))
        .collect();

    let mut upper = Vec::with_capacity(cells.len());
    for (&(i, j), r) in cells.iter().zip(results) {
        upper.push(r.map_err(|e| Error::PairEvaluation {
            left: labels[i].clone(),
            right: labels[j].clone(),
            source: Box::new(e),
        })?);
    }
    DissimilarityMatrix::from_upper(labels, &upper)
}
