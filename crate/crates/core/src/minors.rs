//! Minors and compound (exterior-power) matrices.
//!
//! Index sets are 1-based and strictly increasing; the basis of the k-th
//! exterior power is ordered lexicographically on k-subsets.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par::Execution;
use crate::scalar::Scalar;

/// Strictly increasing 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Index("empty index set".into()));
        }
        if indices.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::Index(format!("{indices:?} not within [1, {n}]")));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Index(format!("{indices:?} is not strictly increasing")));
        }
        Ok(IndexSet(indices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn zero_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i - 1).collect()
    }

    /// All k-subsets of `[1, n]` in lexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<IndexSet> {
        (1..=n).combinations(k).map(IndexSet).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// Determinant of the submatrix on the given rows and columns.
pub fn minor<T: Scalar>(m: &Matrix<T>, rows: &IndexSet, cols: &IndexSet) -> Result<T> {
    if rows.len() != cols.len() {
        return Err(Error::Index(format!(
            "row set {rows} and column set {cols} differ in size"
        )));
    }
    if rows.as_slice().last().is_some_and(|&r| r > m.rows())
        || cols.as_slice().last().is_some_and(|&c| c > m.cols())
    {
        return Err(Error::Index(format!(
            "minor {rows}x{cols} outside a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(T::determinant(&m.submatrix(&rows.zero_based(), &cols.zero_based())))
}

/// Number of k-subsets of an n-set.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Matrix of `Λ^k M`: entry `(R, S)` is `minor(M, R, S)`.
pub fn compound<T: Scalar>(m: &Matrix<T>, k: usize) -> Result<Matrix<T>> {
    compound_with(m, k, Execution::default())
}

pub fn compound_with<T: Scalar>(m: &Matrix<T>, k: usize, exec: Execution) -> Result<Matrix<T>> {
    m.require_square("compound")?;
    let n = m.rows();
    if k == 0 || k > n {
        return Err(Error::Input(format!("compound order {k} outside [1, {n}]")));
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let rows: Vec<Vec<T>> = exec.map(subsets.clone(), |r| {
        subsets
            .iter()
            .map(|c| T::determinant(&m.submatrix(&r, c)))
            .collect()
    });
    Matrix::from_rows(rows)
}

/// Every minor of every order, grouped by order `k = 1..=n`; within an order
/// the minors are listed row-major over lexicographic subset pairs.
pub fn all_minors<T: Scalar>(m: &Matrix<T>, exec: Execution) -> Result<Vec<Vec<T>>> {
    m.require_square("minor enumeration")?;
    (1..=m.rows())
        .map(|k| compound_with(m, k, exec).map(|c| c.entries().to_vec()))
        .collect()
}
