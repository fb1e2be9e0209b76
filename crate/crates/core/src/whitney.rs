//! Chevalley generators, Whitney words, and the bijection between positive
//! parameters and totally positive matrices.
//!
//! Factorization runs a Gauss decomposition `M = L·diag(t)·U` and then peels
//! `L` and `U` into generators with Neville elimination (bottom-up row
//! elimination with adjacent rows). Plain Neville elimination of a lower
//! unitriangular matrix reads off parameters for the reversed word; the
//! standard word and the upper factor are reached through two exact
//! involutions that permute generators:
//!
//! * `tilde`, an automorphism with `x_i(a) ↦ x_{n-i}(a)`, which carries the
//!   reversed word to the standard word;
//! * `X ↦ D X⁻¹ D` with `D = diag((-1)^i)`, an anti-automorphism fixing
//!   every `x_i(a)`, which turns a factorization of `Uᵀ` against the reverse
//!   of a word into a factorization against the word itself.

use std::fmt;
use std::marker::PhantomData;

use serde::Serialize;

use crate::bilinear::tilde;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, Sign, Tolerance};
use crate::tp::{is_totally_nonnegative_with, require_invertible};

/// Parameters all `> 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Strict;

/// Parameters `>= 0` (the diagonal stays `> 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonNegative;

pub trait ParamState: Clone + Copy + fmt::Debug + PartialEq + Send + Sync + 'static {
    const STRICT: bool;
}

impl ParamState for Strict {
    const STRICT: bool = true;
}

impl ParamState for NonNegative {
    const STRICT: bool = false;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WordKind {
    /// `1, 2, …, n-1, 1, 2, …, n-2, …, 1, 2, 1`
    Standard,
    /// `n-1, n-2, …, 1, n-1, n-2, …, 2, …, n-1, n-2, n-1`
    Reversed,
}

/// A reduced word of the longest permutation, of length `n(n-1)/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhitneyWord {
    n: usize,
    kind: WordKind,
    indices: Vec<usize>,
}

impl WhitneyWord {
    pub fn new(n: usize, kind: WordKind) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("Whitney words need n >= 2, got {n}")));
        }
        let indices = match kind {
            WordKind::Standard => (1..n).rev().flat_map(|top| 1..=top).collect(),
            WordKind::Reversed => (1..n).flat_map(|low| (low..n).rev()).collect(),
        };
        Ok(WhitneyWord { n, kind, indices })
    }

    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, WordKind::Standard)
    }

    pub fn reversed(n: usize) -> Result<Self> {
        Self::new(n, WordKind::Reversed)
    }

    /// Recognize an explicit index list as one of the two supported words.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let len = indices.len();
        let n = (1..=64).find(|n| n * (n - 1) / 2 == len && *n >= 2).ok_or_else(|| {
            Error::Input(format!("word length {len} is not n(n-1)/2 for any n >= 2"))
        })?;
        for kind in [WordKind::Standard, WordKind::Reversed] {
            let w = Self::new(n, kind)?;
            if w.indices == indices {
                return Ok(w);
            }
        }
        Err(Error::Input(format!(
            "{indices:?} is neither the standard nor the reversed word for n = {n}"
        )))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> WordKind {
        self.kind
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn standard_word(n: usize) -> Result<WhitneyWord> {
    WhitneyWord::standard(n)
}

pub fn reversed_word(n: usize) -> Result<WhitneyWord> {
    WhitneyWord::reversed(n)
}

/// `x_i(a)`: identity plus `a` at 1-based position `(i+1, i)`.
pub fn gen_x<T: Scalar>(i: usize, a: T, n: usize) -> Result<Matrix<T>> {
    check_generator_index(i, n)?;
    let mut m = Matrix::identity(n);
    m[(i, i - 1)] = a;
    Ok(m)
}

/// `y_i(a)`: identity plus `a` at 1-based position `(i, i+1)`.
pub fn gen_y<T: Scalar>(i: usize, a: T, n: usize) -> Result<Matrix<T>> {
    check_generator_index(i, n)?;
    let mut m = Matrix::identity(n);
    m[(i - 1, i)] = a;
    Ok(m)
}

fn check_generator_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i >= n {
        return Err(Error::Index(format!("generator index {i} outside [1, {}]", n.saturating_sub(1))));
    }
    Ok(())
}

fn check_params<T: Scalar>(what: &str, values: &[T], strict: bool) -> Result<()> {
    for (s, v) in values.iter().enumerate() {
        let ok = match v.exact_sign() {
            Sign::Positive => true,
            Sign::Zero => !strict,
            Sign::Negative => false,
        };
        if !ok {
            let need = if strict { "> 0" } else { ">= 0" };
            return Err(Error::Domain(format!("{what}[{}] = {v} must be {need}", s + 1)));
        }
    }
    Ok(())
}

/// Whitney data `x_w(a) · diag(t) · y_w(b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TpParameters<T, S = Strict> {
    word: WhitneyWord,
    a: Vec<T>,
    t: Vec<T>,
    b: Vec<T>,
    _state: PhantomData<S>,
}

impl<T: Scalar, S: ParamState> TpParameters<T, S> {
    /// Validates lengths and signs for the state `S`; the diagonal `t`
    /// must be positive in both states.
    pub fn new(word: WhitneyWord, a: Vec<T>, t: Vec<T>, b: Vec<T>) -> Result<Self> {
        let (len, n) = (word.len(), word.n());
        if a.len() != len || b.len() != len || t.len() != n {
            return Err(Error::Input(format!(
                "expected {len} parameters a, {len} parameters b and {n} diagonal entries, got {}, {}, {}",
                a.len(),
                b.len(),
                t.len()
            )));
        }
        check_params("a", &a, S::STRICT)?;
        check_params("b", &b, S::STRICT)?;
        check_params("t", &t, true)?;
        Ok(TpParameters {
            word,
            a,
            t,
            b,
            _state: PhantomData,
        })
    }

    pub fn word(&self) -> &WhitneyWord {
        &self.word
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn t(&self) -> &[T] {
        &self.t
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.word.n()
    }

    /// The product `x_{i_1}(a_1)…x_{i_N}(a_N) · t · y_{i_1}(b_1)…y_{i_N}(b_N)`.
    pub fn synthesize(&self) -> Matrix<T> {
        let lower = word_product(&self.word, &self.a, Side::Lower);
        let upper = word_product(&self.word, &self.b, Side::Upper);
        &(&lower * &Matrix::diagonal(&self.t)) * &upper
    }
}

impl<T: Scalar> TpParameters<T, Strict> {
    pub fn relax(self) -> TpParameters<T, NonNegative> {
        TpParameters {
            word: self.word,
            a: self.a,
            t: self.t,
            b: self.b,
            _state: PhantomData,
        }
    }
}

/// Free function form of [`TpParameters::synthesize`].
pub fn synthesize<T: Scalar, S: ParamState>(p: &TpParameters<T, S>) -> Matrix<T> {
    p.synthesize()
}

fn word_product<T: Scalar>(word: &WhitneyWord, params: &[T], side: Side) -> Matrix<T> {
    let n = word.n();
    word.indices()
        .iter()
        .zip(params)
        .fold(Matrix::identity(n), |acc, (&i, a)| {
            let g = match side {
                Side::Lower => gen_x(i, a.clone(), n),
                Side::Upper => gen_y(i, a.clone(), n),
            }
            .expect("word indices are in range");
            &acc * &g
        })
}

/// Parameters of a unipotent factor `x_w(c)` (lower) or `y_w(c)` (upper).
#[derive(Clone, Debug, PartialEq)]
pub struct UniParams<T, S = Strict> {
    word: WhitneyWord,
    c: Vec<T>,
    side: Side,
    _state: PhantomData<S>,
}

impl<T: Scalar, S: ParamState> UniParams<T, S> {
    pub fn new(word: WhitneyWord, c: Vec<T>, side: Side) -> Result<Self> {
        if c.len() != word.len() {
            return Err(Error::Input(format!(
                "expected {} parameters, got {}",
                word.len(),
                c.len()
            )));
        }
        check_params("c", &c, S::STRICT)?;
        Ok(UniParams {
            word,
            c,
            side,
            _state: PhantomData,
        })
    }

    pub fn word(&self) -> &WhitneyWord {
        &self.word
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Smallest parameter as a float; the strictness margin of a membership.
    pub fn margin(&self) -> f64 {
        self.c.iter().map(Scalar::to_f64).fold(f64::INFINITY, f64::min)
    }

    pub fn synthesize(&self) -> Matrix<T> {
        word_product(&self.word, &self.c, self.side)
    }
}

pub fn synthesize_uni<T: Scalar, S: ParamState>(u: &UniParams<T, S>) -> Matrix<T> {
    u.synthesize()
}

fn pivot_failure<T: Scalar>(msg: String) -> Error {
    if T::EXACT {
        Error::Domain(msg)
    } else {
        Error::Conditioning(msg)
    }
}

/// Neville elimination of a lower unitriangular matrix: parameters `c`
/// with `L = x_w(c)` for the reversed word `w`. Parameters may have any
/// sign; elimination fails only on a zero pivot under a nonzero entry.
fn neville_reversed<T: Scalar>(l: &Matrix<T>, tol: &Tolerance) -> Result<Vec<T>> {
    let n = l.rows();
    let thr = if T::EXACT { 0.0 } else { tol.threshold(l.max_abs()) };
    let mut w = l.clone();
    let mut params = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n.saturating_sub(1) {
        for i in (j + 1..n).rev() {
            let entry = w[(i, j)].clone();
            if entry.sign_within(thr) == Sign::Zero {
                w[(i, j)] = T::zero();
                params.push(T::zero());
                continue;
            }
            let pivot = w[(i - 1, j)].clone();
            if pivot.sign_within(thr) == Sign::Zero {
                return Err(pivot_failure::<T>(format!(
                    "zero pivot at ({i}, {}) under a nonzero entry",
                    j + 1
                )));
            }
            let m = entry / pivot;
            for c in 0..=i {
                let v = w[(i, c)].clone() - m.clone() * w[(i - 1, c)].clone();
                w[(i, c)] = v;
            }
            params.push(m);
        }
    }
    Ok(params)
}

/// `X ↦ D X⁻¹ D`, `D = diag(-1, 1, -1, …)`. Exact on unitriangular input.
fn sign_conjugated_inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let inv = m.inverse()?;
    Ok(Matrix::from_fn(m.rows(), m.cols(), |r, c| {
        if (r + c) % 2 == 0 {
            inv[(r, c)].clone()
        } else {
            -inv[(r, c)].clone()
        }
    }))
}

/// Parameters `c` (any sign) with `M = x_w(c)` (lower) or `M = y_w(c)` (upper).
fn unipotent_params<T: Scalar>(m: &Matrix<T>, side: Side, kind: WordKind, tol: &Tolerance) -> Result<Vec<T>> {
    match side {
        Side::Lower => match kind {
            WordKind::Reversed => neville_reversed(m, tol),
            WordKind::Standard => neville_reversed(&tilde(m)?, tol),
        },
        Side::Upper => {
            let lowered = sign_conjugated_inverse(&m.transpose())?;
            unipotent_params(&lowered, Side::Lower, kind, tol)
        }
    }
}

fn check_unitriangular<T: Scalar>(m: &Matrix<T>, side: Side) -> Result<()> {
    let ok = match side {
        Side::Lower => m.is_lower_unitriangular(),
        Side::Upper => m.is_upper_unitriangular(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("matrix is not {side:?}-unitriangular").to_lowercase()))
    }
}

/// Strict parameters exhibiting `M ∈ U^±_{>0}` for the given word, or
/// `None` when `M` is unitriangular of the declared side but not in the
/// open positive part.
pub fn membership_uni<T: Scalar>(m: &Matrix<T>, side: Side, word: &WhitneyWord) -> Result<Option<UniParams<T>>> {
    membership_uni_with(m, side, word, &Tolerance::default())
}

pub fn membership_uni_with<T: Scalar>(
    m: &Matrix<T>,
    side: Side,
    word: &WhitneyWord,
    tol: &Tolerance,
) -> Result<Option<UniParams<T>>> {
    if m.rows() != word.n() {
        return Err(Error::Shape(format!(
            "{}x{} matrix against a word for n = {}",
            m.rows(),
            m.cols(),
            word.n()
        )));
    }
    check_unitriangular(m, side)?;
    let params = match unipotent_params(m, side, word.kind(), tol) {
        Ok(p) => p,
        Err(Error::Domain(_)) | Err(Error::Conditioning(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let thr = if T::EXACT { 0.0 } else { tol.threshold(1.0) };
    if params.iter().all(|p| p.sign_within(thr) == Sign::Positive) {
        Ok(Some(UniParams::new(word.clone(), params, side)?))
    } else {
        Ok(None)
    }
}

/// Membership in the closure of `U^±_{>0}`: unitriangular of the given
/// side and totally nonnegative.
pub fn in_uni_closure<T: Scalar>(m: &Matrix<T>, side: Side) -> bool {
    let unitriangular = match side {
        Side::Lower => m.is_lower_unitriangular(),
        Side::Upper => m.is_upper_unitriangular(),
    };
    unitriangular && is_totally_nonnegative_with(m, &Tolerance::default())
}

/// Inverse of [`synthesize`] against the standard word.
pub fn factorize<T: Scalar>(m: &Matrix<T>) -> Result<TpParameters<T>> {
    factorize_with(m, WordKind::Standard, &Tolerance::default())
}

/// Factorization against either supported word. Fails with a domain error
/// when `M` is not totally positive (on the float backend, with a
/// conditioning error when a pivot falls below tolerance).
pub fn factorize_with<T: Scalar>(m: &Matrix<T>, kind: WordKind, tol: &Tolerance) -> Result<TpParameters<T>> {
    m.require_square("factorize")?;
    let n = m.rows();
    if n == 1 {
        return Err(Error::Input("factorization needs n >= 2".into()));
    }
    let word = WhitneyWord::new(n, kind)?;
    let ldu = m.gauss_ldu_with(tol).map_err(|e| match e {
        Error::Domain(msg) => Error::Domain(format!("not totally positive: {msg}")),
        other => other,
    })?;
    let not_tp = |e: Error| match e {
        Error::Domain(msg) => Error::Domain(format!("not totally positive: {msg}")),
        other => other,
    };
    let a = unipotent_params(&ldu.lower, Side::Lower, kind, tol).map_err(not_tp)?;
    let b = unipotent_params(&ldu.upper, Side::Upper, kind, tol).map_err(not_tp)?;
    let thr = if T::EXACT { 0.0 } else { tol.threshold(1.0) };
    let positive = |v: &[T]| v.iter().all(|x| x.sign_within(thr) == Sign::Positive);
    if !(positive(&a) && positive(&b) && positive(&ldu.diag)) {
        return Err(Error::Domain(
            "not totally positive: a Whitney parameter is not positive".into(),
        ));
    }
    TpParameters::new(word, a, ldu.diag, b)
}

/// Membership in the monoid generated by nonnegative `x_i`, `y_i` and the
/// positive diagonal torus, decided as invertible + totally nonnegative.
pub fn monoid_generate_check<T: Scalar>(m: &Matrix<T>) -> Result<bool> {
    let tol = Tolerance::default();
    require_invertible(m, &tol)?;
    Ok(is_totally_nonnegative_with(m, &tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::tp::is_totally_positive;

    type Q = Matrix<Rational>;

    #[test]
    fn generator_examples() {
        assert_eq!(
            gen_x(1, rat(2, 1), 3).unwrap(),
            Q::from_i64_rows(&[&[1, 0, 0], &[2, 1, 0], &[0, 0, 1]])
        );
        assert_eq!(gen_y(1, rat(3, 1), 2).unwrap(), Q::from_i64_rows(&[&[1, 3], &[0, 1]]));
        assert_eq!(gen_x(2, rat(0, 1), 4).unwrap(), Q::identity(4));
        assert!(gen_x(0, rat(1, 1), 3).is_err());
        assert!(gen_y(3, rat(1, 1), 3).is_err());
    }

    #[test]
    fn one_parameter_subgroups() {
        for i in 1..4 {
            let x = &gen_x(i, rat(2, 3), 4).unwrap() * &gen_x(i, rat(5, 7), 4).unwrap();
            assert_eq!(x, gen_x(i, rat(2, 3) + rat(5, 7), 4).unwrap());
            let y = &gen_y(i, rat(-1, 2), 4).unwrap() * &gen_y(i, rat(3, 1), 4).unwrap();
            assert_eq!(y, gen_y(i, rat(5, 2), 4).unwrap());
        }
    }

    #[test]
    fn words() {
        assert_eq!(WhitneyWord::standard(3).unwrap().indices(), &[1, 2, 1]);
        assert_eq!(WhitneyWord::reversed(3).unwrap().indices(), &[2, 1, 2]);
        assert_eq!(WhitneyWord::standard(4).unwrap().len(), 6);
        assert_eq!(
            WhitneyWord::standard(4).unwrap().indices(),
            &[1, 2, 3, 1, 2, 1]
        );
        assert_eq!(
            WhitneyWord::reversed(4).unwrap().indices(),
            &[3, 2, 1, 3, 2, 3]
        );
        assert_eq!(
            WhitneyWord::from_indices(&[3, 2, 1, 3, 2, 3]).unwrap().kind(),
            WordKind::Reversed
        );
        assert!(WhitneyWord::from_indices(&[1, 1, 1]).is_err());
        assert!(WhitneyWord::standard(1).is_err());
    }

    #[test]
    fn synthesize_example() {
        let p = TpParameters::<Rational>::new(
            WhitneyWord::standard(2).unwrap(),
            vec![rat(2, 1)],
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(3, 1)],
        )
        .unwrap();
        assert_eq!(p.synthesize(), Q::from_i64_rows(&[&[1, 3], &[2, 7]]));
    }

    #[test]
    fn strict_state_rejects_zero() {
        let r = TpParameters::<Rational, Strict>::new(
            WhitneyWord::standard(2).unwrap(),
            vec![rat(0, 1)],
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(3, 1)],
        );
        assert!(matches!(r, Err(Error::Domain(_))));
        let ok = TpParameters::<Rational, NonNegative>::new(
            WhitneyWord::standard(2).unwrap(),
            vec![rat(0, 1)],
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(3, 1)],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn factorize_examples() {
        let p = factorize(&Q::from_i64_rows(&[&[1, 3], &[2, 7]])).unwrap();
        assert_eq!(p.a(), &[rat(2, 1)]);
        assert_eq!(p.t(), &[rat(1, 1), rat(1, 1)]);
        assert_eq!(p.b(), &[rat(3, 1)]);
        assert!(matches!(factorize(&Q::identity(2)), Err(Error::Domain(_))));
        assert!(matches!(
            factorize(&Q::from_i64_rows(&[&[1, 1], &[1, 1]])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn factorize_n3_both_words() {
        let a = vec![rat(1, 2), rat(3, 1), rat(2, 5)];
        let t = vec![rat(2, 1), rat(1, 3), rat(7, 4)];
        let b = vec![rat(5, 1), rat(1, 7), rat(4, 3)];
        for kind in [WordKind::Standard, WordKind::Reversed] {
            let p = TpParameters::<Rational>::new(
                WhitneyWord::new(3, kind).unwrap(),
                a.clone(),
                t.clone(),
                b.clone(),
            )
            .unwrap();
            let m = p.synthesize();
            assert!(is_totally_positive(&m));
            let back = factorize_with(&m, kind, &Tolerance::default()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn float_factorization_round_trip() {
        let p = TpParameters::<f64>::new(
            WhitneyWord::standard(3).unwrap(),
            vec![0.5, 2.0, 1.5],
            vec![1.0, 2.0, 3.0],
            vec![0.25, 1.0, 4.0],
        )
        .unwrap();
        let back = factorize(&p.synthesize()).unwrap();
        for (x, y) in back.a().iter().zip(p.a()) {
            assert!((x - y).abs() < 1e-10);
        }
        for (x, y) in back.b().iter().zip(p.b()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn membership_examples() {
        let m = Q::from_i64_rows(&[&[1, 0], &[2, 1]]);
        let u = membership_uni(&m, Side::Lower, &WhitneyWord::standard(2).unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(u.c(), &[rat(2, 1)]);
        assert_eq!(
            membership_uni(&Q::identity(3), Side::Lower, &WhitneyWord::standard(3).unwrap()).unwrap(),
            None
        );
        assert!(matches!(
            membership_uni(&m, Side::Upper, &WhitneyWord::standard(2).unwrap()),
            Err(Error::Domain(_))
        ));
        let up = Q::from_i64_rows(&[&[1, 2, 1], &[0, 1, 3], &[0, 0, 1]]);
        let got = membership_uni(&up, Side::Upper, &WhitneyWord::standard(3).unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(got.synthesize(), up);
    }

    #[test]
    fn monoid_examples() {
        assert!(monoid_generate_check(&gen_x(1, rat(5, 1), 3).unwrap()).unwrap());
        assert!(!monoid_generate_check(&Q::from_i64_rows(&[&[1, -1], &[0, 1]])).unwrap());
        assert_eq!(
            monoid_generate_check(&Q::from_i64_rows(&[&[1, 1], &[1, 1]])),
            Err(Error::Singular)
        );
    }
}
