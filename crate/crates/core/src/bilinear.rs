//! Totally positive bilinear forms and their canonical bases.
//!
//! A form is stored as its Gram grid, entry `(r, s) = ⟨e_r, e_s⟩`. The
//! associated matrix `A` has entry `(s, r) = (-1)^r ⟨e_{r*}, e_s⟩` with
//! `r* = n + 1 - r`, and the form is totally positive when `A` is.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par::Execution;
use crate::scalar::{Scalar, Sign, Tolerance};
use crate::spectra::{refine_eigenvector, spectrum_unchecked, SpectralOptions};
use crate::tp::is_totally_positive_with;

/// `r* = n + 1 - r`.
pub fn star(r: usize, n: usize) -> Result<usize> {
    if r == 0 || r > n {
        return Err(Error::Index(format!("index {r} outside [1, {n}]")));
    }
    Ok(n + 1 - r)
}

fn sign_pow<T: Scalar>(r: usize) -> T {
    if r.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm<T> {
    gram: Matrix<T>,
}

impl<T: Scalar> BilinearForm<T> {
    pub fn new(gram: Matrix<T>) -> Result<Self> {
        gram.require_square("bilinear form")?;
        Ok(BilinearForm { gram })
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    pub fn n(&self) -> usize {
        self.gram.rows()
    }

    /// `⟨u, v⟩ = uᵀ G v`.
    pub fn pair(&self, u: &[T], v: &[T]) -> Result<T> {
        let gv = self.gram.mul_vec(v)?;
        if u.len() != gv.len() {
            return Err(Error::Shape(format!("vector of length {} against n = {}", u.len(), gv.len())));
        }
        Ok(u.iter().zip(gv).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b))
    }

    /// Gram matrix in the basis given by the columns of `basis`.
    pub fn gram_in_basis(&self, basis: &Matrix<T>) -> Result<Matrix<T>> {
        basis.transpose().matmul(&self.gram)?.matmul(basis)
    }
}

/// The matrix `A`, entry `(s, r) = (-1)^r ⟨e_{r*}, e_s⟩` (1-based).
#[allow(non_snake_case)]
pub fn form_to_A<T: Scalar>(f: &BilinearForm<T>) -> Matrix<T> {
    let n = f.n();
    let g = f.gram();
    Matrix::from_fn(n, n, |s, r| sign_pow::<T>(r + 1) * g[(n - 1 - r, s)].clone())
}

/// Inverse of [`form_to_A`].
#[allow(non_snake_case)]
pub fn A_to_form<T: Scalar>(a: &Matrix<T>) -> Result<BilinearForm<T>> {
    a.require_square("form construction")?;
    let n = a.rows();
    BilinearForm::new(Matrix::from_fn(n, n, |rs, s| {
        let r = n - 1 - rs;
        sign_pow::<T>(r + 1) * a[(s, r)].clone()
    }))
}

pub fn is_totally_positive_form<T: Scalar>(f: &BilinearForm<T>) -> bool {
    is_totally_positive_with(&form_to_A(f), &Tolerance::default())
}

/// The defining family of determinants, enumerated directly: for all
/// `r_1 < … < r_k` and `s_1 < … < s_k`, the determinant of
/// `((-1)^{r_m} ⟨e_{r_m*}, e_{s_m'}⟩)_{m,m'}` must be positive.
pub fn is_totally_positive_form_direct<T: Scalar>(f: &BilinearForm<T>, exec: Execution) -> bool {
    let n = f.n();
    let g = f.gram();
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = (1..=n)
        .flat_map(|k| {
            (0..n)
                .combinations(k)
                .cartesian_product((0..n).combinations(k).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
        .collect();
    exec.all(pairs, |(rows, cols)| {
        let k = rows.len();
        let block = Matrix::from_fn(k, k, |m, mm| {
            let r = rows[m];
            sign_pow::<T>(r + 1) * g[(n - 1 - r, cols[mm])].clone()
        });
        T::determinant(&block).exact_sign() == Sign::Positive
    })
}

/// Anti-diagonal sign matrix whose column `r` is `(-1)^r e_{n+1-r}`.
pub fn c0_matrix<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |row, col| {
        if row + col + 1 == n {
            sign_pow::<T>(col + 1)
        } else {
            T::zero()
        }
    })
}

/// `C₀ · (Mᵀ)⁻¹ · C₀⁻¹`.
pub fn tilde<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    m.require_square("tilde")?;
    let n = m.rows();
    let c0 = c0_matrix::<T>(n);
    let c0_inv = c0.transpose();
    c0.matmul(&m.transpose_inverse()?)?.matmul(&c0_inv)
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicalBasis {
    /// Columns `v_1, …, v_n`, ordered by decreasing `c_r`.
    #[serde(serialize_with = "serialize_columns")]
    pub basis: Matrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub z: Vec<f64>,
    /// `⟨v_r, v_s⟩`.
    #[serde(serialize_with = "serialize_rows")]
    pub gram: Matrix<f64>,
    /// `z_r / z_{r*}`, strictly increasing in `r`.
    pub chain: Vec<f64>,
    /// Largest off-anti-diagonal Gram entry relative to the Frobenius norm.
    pub off_anti_diagonal: f64,
}

fn serialize_columns<S: serde::Serializer>(m: &Matrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.cols()))?;
    for c in 0..m.cols() {
        seq.serialize_element(&m.column(c))?;
    }
    seq.end()
}

fn serialize_rows<S: serde::Serializer>(m: &Matrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.rows()))?;
    for r in 0..m.rows() {
        seq.serialize_element(m.row(r))?;
    }
    seq.end()
}

/// `(-1)^{n+1} C Č` with `C = C₀ A⁻¹`, the matrix whose eigenvectors form
/// the canonical basis. For a totally positive form it is totally positive.
pub fn canonical_operator<T: Scalar>(f: &BilinearForm<T>) -> Result<Matrix<T>> {
    let n = f.n();
    let a = form_to_A(f);
    let c = c0_matrix::<T>(n).matmul(&a.inverse()?)?;
    let m = c.matmul(&c.transpose_inverse()?)?;
    Ok(if n % 2 == 1 { m } else { m.scale(&-T::one()) })
}

pub fn canonical_basis<T: Scalar>(f: &BilinearForm<T>) -> Result<CanonicalBasis> {
    canonical_basis_with(f, &SpectralOptions::default())
}

pub fn canonical_basis_with<T: Scalar>(f: &BilinearForm<T>, opts: &SpectralOptions) -> Result<CanonicalBasis> {
    let n = f.n();
    if !is_totally_positive_with(&form_to_A(f), &opts.tol) {
        return Err(Error::Domain("form is not totally positive".into()));
    }
    let m = canonical_operator(f)?;
    if !is_totally_positive_with(&m, &opts.tol) {
        return Err(Error::Consistency(
            "the canonical operator of a totally positive form is not totally positive".into(),
        ));
    }
    let spectrum = spectrum_unchecked(&m, opts)?;
    let refined: Vec<Vec<T>> = (0..n)
        .map(|k| refine_eigenvector(&m, &spectrum.eigenvectors.column(k), spectrum.refined[k], opts))
        .collect::<Result<_>>()?;
    let x = Matrix::from_columns(&refined)?;
    let norms: Vec<f64> = refined
        .iter()
        .map(|v| v.iter().map(|e| e.to_f64().powi(2)).sum::<f64>().sqrt())
        .collect();
    let basis = Matrix::from_fn(n, n, |r, c| x[(r, c)].to_f64() / norms[c]);
    let gx = x.transpose().matmul(f.gram())?.matmul(&x)?;
    let gram = Matrix::from_fn(n, n, |r, s| gx[(r, s)].to_f64() / (norms[r] * norms[s]));
    let z: Vec<f64> = (0..n)
        .map(|r| sign_pow::<f64>(r + 1) * gram[(r, n - 1 - r)])
        .collect();
    let scale = gram.frobenius_norm();
    let off_anti_diagonal = (0..n)
        .cartesian_product(0..n)
        .filter(|(r, s)| r + s + 1 != n)
        .map(|(r, s)| gram[(r, s)].abs())
        .fold(0.0, f64::max)
        / scale;
    if off_anti_diagonal > 1e-9 {
        return Err(Error::Consistency(format!(
            "Gram matrix in the eigenbasis is anti-diagonal only to {off_anti_diagonal:e}"
        )));
    }
    if z.contains(&0.0) {
        return Err(Error::Consistency("a z-value vanishes".into()));
    }
    let chain: Vec<f64> = (0..n).map(|r| z[r] / z[n - 1 - r]).collect();
    if !chain.windows(2).all(|w| w[0] < w[1]) || chain.iter().any(|x| *x <= 0.0) {
        return Err(Error::Consistency(format!("chain {chain:?} is not positive and increasing")));
    }
    Ok(CanonicalBasis {
        basis,
        eigenvalues: spectrum.eigenvalues,
        z,
        gram,
        chain,
        off_anti_diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::tp::is_totally_positive;
    use crate::whitney::gen_x;

    type Q = Matrix<Rational>;

    fn example_form() -> BilinearForm<Rational> {
        BilinearForm::new(Q::from_i64_rows(&[&[3, 7], &[-1, -2]])).unwrap()
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(1, 4).unwrap(), 4);
        assert_eq!(star(2, 3).unwrap(), 2);
        for r in 1..=5 {
            assert_eq!(star(star(r, 5).unwrap(), 5).unwrap(), r);
        }
        assert!(star(0, 3).is_err());
        assert!(star(4, 3).is_err());
    }

    #[test]
    fn form_to_a_examples() {
        let f = example_form();
        assert_eq!(form_to_A(&f), Q::from_i64_rows(&[&[1, 3], &[2, 7]]));
        assert_eq!(A_to_form(&form_to_A(&f)).unwrap(), f);
        let zero = BilinearForm::new(Q::zeros(3, 3)).unwrap();
        assert_eq!(form_to_A(&zero), Q::zeros(3, 3));
        assert!(!is_totally_positive_form(&zero));
    }

    #[test]
    fn tp_form_examples() {
        assert!(is_totally_positive_form(&example_form()));
        assert!(is_totally_positive_form_direct(&example_form(), Execution::Sequential));
        let symplectic = BilinearForm::new(Q::from_i64_rows(&[&[0, 1], &[-1, 0]])).unwrap();
        assert!(!is_totally_positive_form(&symplectic));
        assert!(!is_totally_positive_form_direct(&symplectic, Execution::Sequential));
        let id = BilinearForm::new(Q::identity(2)).unwrap();
        assert!(!is_totally_positive_form(&id));
    }

    #[test]
    fn c0_examples() {
        assert_eq!(c0_matrix::<Rational>(1), Q::from_i64_rows(&[&[-1]]));
        assert_eq!(c0_matrix::<Rational>(2), Q::from_i64_rows(&[&[0, 1], &[-1, 0]]));
        for n in 1..=5 {
            let c0 = c0_matrix::<Rational>(n);
            let check = c0.transpose_inverse().unwrap();
            let sign = if n % 2 == 1 { rat(1, 1) } else { rat(-1, 1) };
            assert_eq!(&check * &c0, Q::identity(n).scale(&sign));
        }
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(
            tilde(&gen_x(1, rat(2, 1), 3).unwrap()).unwrap(),
            gen_x(2, rat(2, 1), 3).unwrap()
        );
        let m = Q::from_i64_rows(&[&[1, 3], &[2, 7]]);
        assert_eq!(tilde(&tilde(&m).unwrap()).unwrap(), m);
        assert!(is_totally_positive(&tilde(&m).unwrap()));
        assert_eq!(tilde(&Q::from_i64_rows(&[&[1, 1], &[1, 1]])), Err(Error::Singular));
    }

    #[test]
    fn canonical_operator_example() {
        let m = canonical_operator(&example_form()).unwrap();
        assert_eq!(m, Q::from_i64_rows(&[&[7, 16], &[24, 55]]));
    }

    #[test]
    fn canonical_basis_example() {
        let cb = canonical_basis(&example_form()).unwrap();
        assert!(cb.off_anti_diagonal <= 1e-9);
        assert!(cb.chain[0] < cb.chain[1]);
        assert!((cb.chain[0] * cb.chain[1] - 1.0).abs() <= 1e-9);
        for r in 0..2 {
            assert!((cb.chain[r] - 1.0 / cb.eigenvalues[r]).abs() <= 1e-8 * cb.chain[r].abs());
        }
    }

    #[test]
    fn canonical_basis_one_dimensional() {
        let f = BilinearForm::new(Q::from_i64_rows(&[&[-3]])).unwrap();
        assert!(is_totally_positive_form(&f));
        let cb = canonical_basis(&f).unwrap();
        assert_eq!(cb.basis.column(0), vec![1.0]);
        assert_eq!(cb.chain, vec![1.0]);
    }
}
