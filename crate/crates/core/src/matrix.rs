//! Dense row-major matrices over a [`Scalar`] backend.

use std::fmt;
use std::ops::{Index, IndexMut};

use num::integer::Integer;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, Sign, Tolerance};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Gauss decomposition `M = L * diag(d) * U` without pivoting.
#[derive(Clone, Debug, PartialEq)]
pub struct Ldu<T> {
    pub lower: Matrix<T>,
    pub diag: Vec<T>,
    pub upper: Matrix<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)))
            .finish()
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|c| self.data[r * self.cols + c].to_string())
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Build from integer rows; handy for fixed examples.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let data: Vec<Vec<T>> = rows
            .iter()
            .map(|row| row.iter().map(|&v| T::from_i64(v)).collect())
            .collect();
        Matrix::from_rows(data).expect("rectangular literal")
    }

    pub fn from_fn<F: FnMut(usize, usize) -> T>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |r, c| if r == c { d[r].clone() } else { T::zero() })
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Shape("columns of unequal length".into()));
        }
        Ok(Matrix::from_fn(n, cols.len(), |r, c| cols[c][r].clone()))
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(r, k)].clone() * other[(k, c)].clone();
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (k, x) in v.iter().enumerate() {
                    acc = acc + self[(r, k)].clone() * x.clone();
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Matrix<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    fn zip_with<F: Fn(&T, &T) -> T>(&self, other: &Matrix<T>, f: F) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        self.require_square("pow")?;
        let mut out = Matrix::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    /// Largest entry magnitude, used as the scale of float thresholds.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let v = x.to_f64();
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])].clone())
    }

    pub(crate) fn require_square(&self, op: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{op} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn det(&self) -> Result<T> {
        self.require_square("det")?;
        Ok(T::determinant(self))
    }

    /// Rank with float pivots thresholded by `tol` relative to the largest entry.
    pub fn rank_with(&self, tol: &Tolerance) -> usize {
        let thr = tol.threshold(self.max_abs());
        let mut a = self.clone();
        let mut rank = 0;
        for c in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = pivot_row(&a, rank, c, thr) else {
                continue;
            };
            a.swap_rows(rank, p);
            eliminate_below(&mut a, rank, c);
            rank += 1;
        }
        rank
    }

    pub fn rank(&self) -> usize {
        self.rank_with(&Tolerance::default())
    }

    pub fn inverse_with(&self, tol: &Tolerance) -> Result<Self> {
        self.require_square("inverse")?;
        let n = self.rows;
        let thr = tol.threshold(self.max_abs());
        let mut a = self.clone();
        let mut inv = Matrix::<T>::identity(n);
        for c in 0..n {
            let p = pivot_row(&a, c, c, thr).ok_or(Error::Singular)?;
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            let piv = a[(c, c)].clone();
            for k in 0..n {
                a[(c, k)] = a[(c, k)].clone() / piv.clone();
                inv[(c, k)] = inv[(c, k)].clone() / piv.clone();
            }
            for r in 0..n {
                if r == c || a[(r, c)].exact_sign() == Sign::Zero {
                    continue;
                }
                let f = a[(r, c)].clone();
                for k in 0..n {
                    a[(r, k)] = a[(r, k)].clone() - f.clone() * a[(c, k)].clone();
                    inv[(r, k)] = inv[(r, k)].clone() - f.clone() * inv[(c, k)].clone();
                }
            }
        }
        Ok(inv)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(&Tolerance::default())
    }

    /// `(M^T)^{-1}`.
    pub fn transpose_inverse(&self) -> Result<Self> {
        Ok(self.inverse()?.transpose())
    }

    /// Basis of the right null space, one vector per free column.
    pub fn null_space_with(&self, tol: &Tolerance) -> Vec<Vec<T>> {
        let thr = tol.threshold(self.max_abs());
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = pivot_row(&a, r, c, thr) else {
                continue;
            };
            a.swap_rows(r, p);
            let piv = a[(r, c)].clone();
            for k in 0..a.cols {
                a[(r, k)] = a[(r, k)].clone() / piv.clone();
            }
            for rr in 0..a.rows {
                if rr != r && a[(rr, c)].exact_sign() != Sign::Zero {
                    let f = a[(rr, c)].clone();
                    for k in 0..a.cols {
                        a[(rr, k)] = a[(rr, k)].clone() - f.clone() * a[(r, k)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (0..a.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![T::zero(); a.cols];
                v[free] = T::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[(row, free)].clone();
                }
                v
            })
            .collect()
    }

    /// Gauss decomposition without pivoting. Fails when a leading principal
    /// minor vanishes (exactly, or below tolerance on the float backend).
    pub fn gauss_ldu_with(&self, tol: &Tolerance) -> Result<Ldu<T>> {
        self.require_square("Gauss decomposition")?;
        let n = self.rows;
        let thr = tol.threshold(self.max_abs());
        let mut a = self.clone();
        let mut lower = Matrix::identity(n);
        let mut diag = Vec::with_capacity(n);
        for k in 0..n {
            let piv = a[(k, k)].clone();
            if piv.sign_within(thr) == Sign::Zero {
                let msg = format!("leading principal minor of order {} vanishes", k + 1);
                return Err(if T::EXACT {
                    Error::Domain(msg)
                } else {
                    Error::Conditioning(msg)
                });
            }
            for r in k + 1..n {
                let f = a[(r, k)].clone() / piv.clone();
                lower[(r, k)] = f.clone();
                for c in k..n {
                    a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(k, c)].clone();
                }
            }
            diag.push(piv);
        }
        let upper = Matrix::from_fn(n, n, |r, c| {
            if c < r {
                T::zero()
            } else if c == r {
                T::one()
            } else {
                a[(r, c)].clone() / diag[r].clone()
            }
        });
        Ok(Ldu { lower, diag, upper })
    }

    pub fn gauss_ldu(&self) -> Result<Ldu<T>> {
        self.gauss_ldu_with(&Tolerance::default())
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| match c.cmp(&r) {
                    std::cmp::Ordering::Greater => self[(r, c)].exact_sign() == Sign::Zero,
                    std::cmp::Ordering::Equal => self[(r, c)] == T::one(),
                    std::cmp::Ordering::Less => true,
                })
            })
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        self.transpose().is_lower_unitriangular()
    }

    /// Order-reversing permutation matrix `J` with `J e_i = e_{n+1-i}`.
    pub fn reversal(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r + c + 1 == n { T::one() } else { T::zero() })
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<T: Scalar> std::ops::Mul for &Matrix<T> {
    type Output = Matrix<T>;

    /// Panics on a shape mismatch; use [`Matrix::matmul`] for a checked product.
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

/// Row index at or below `start` holding the largest entry of column `c`,
/// provided it exceeds `thr`. Exact scalars take any nonzero entry.
fn pivot_row<T: Scalar>(a: &Matrix<T>, start: usize, c: usize, thr: f64) -> Option<usize> {
    if T::EXACT {
        return (start..a.rows).find(|&r| a[(r, c)].exact_sign() != Sign::Zero);
    }
    let (best, mag) = (start..a.rows)
        .map(|r| (r, a[(r, c)].magnitude()))
        .fold((start, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    (mag > thr).then_some(best)
}

fn eliminate_below<T: Scalar>(a: &mut Matrix<T>, r: usize, c: usize) {
    let piv = a[(r, c)].clone();
    for rr in r + 1..a.rows {
        if a[(rr, c)].exact_sign() == Sign::Zero {
            continue;
        }
        let f = a[(rr, c)].clone() / piv.clone();
        for k in c..a.cols {
            a[(rr, k)] = a[(rr, k)].clone() - f.clone() * a[(r, k)].clone();
        }
    }
}

/// Partial-pivot elimination determinant.
pub(crate) fn det_by_elimination<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.rows;
    let mut a = m.clone();
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = pivot_row(&a, c, c, 0.0) else {
            return T::zero();
        };
        if p != c {
            a.swap_rows(c, p);
            det = -det;
        }
        det = det * a[(c, c)].clone();
        eliminate_below(&mut a, c, c);
    }
    det
}

/// Fraction-free determinant over rationals: clear row denominators, run
/// Bareiss elimination over the integers, then restore the scaling.
pub(crate) fn det_bareiss(m: &Matrix<Rational>) -> Rational {
    let n = m.rows;
    if n == 0 {
        return <Rational as Scalar>::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for r in 0..n {
        let lcm = m
            .row(r)
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        a.push(
            m.row(r)
                .iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect(),
        );
        scale *= lcm;
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return <Rational as Scalar>::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let mut det = a[n - 1][n - 1].clone();
    if negate {
        det = -det;
    }
    let out = Rational::new(det, scale);
    debug_assert!(!out.denom().is_negative());
    out
}
