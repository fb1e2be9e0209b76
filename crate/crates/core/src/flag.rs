//! Complete flags in `R^n`, the positive parts of the flag manifold, and
//! the stable flag pair of a totally positive element.
//!
//! A flag is the column flag of an invertible matrix: `F_k` is spanned by
//! the first `k` columns. The standard flag is that of the identity and the
//! opposite flag that of the reversal permutation. A flag lies in the
//! positive part when its lower unitriangular Gauss factor has strictly
//! positive parameters against the standard word; it lies in the primed
//! positive part when the inverse of that factor does.

use itertools::Itertools;
use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{DMatrix, Schur};
use serde::Serialize;

use crate::bilinear::{c0_matrix, tilde};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{rationalize, Rational, Scalar, Sign, Tolerance};
use crate::spectra::{gk_spectrum_with, to_dmatrix, SpectralOptions, Spectrum};
use crate::tp::is_totally_positive_with;
use crate::whitney::{membership_uni_with, Side, UniParams, WhitneyWord};

#[derive(Clone, Debug, PartialEq)]
pub struct Flag<T> {
    rep: Matrix<T>,
}

/// Column-echelon form: each column vanishes at the pivot rows of the
/// earlier columns, and its topmost remaining nonzero entry is 1.
fn canonical_form<T: Scalar>(g: &Matrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    let n = g.rows();
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut pivots: Vec<usize> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for (col, &p) in cols.iter().zip(&pivots) {
            let f = v[p].clone();
            if f.exact_sign() != Sign::Zero {
                for (x, y) in v.iter_mut().zip(col) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        for &p in &pivots {
            v[p] = T::zero();
        }
        let big = v.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let thr = if T::EXACT { 0.0 } else { tol.threshold(big).max(tol.abs) };
        let p = v
            .iter()
            .position(|x| x.sign_within(thr) != Sign::Zero)
            .ok_or(Error::Singular)?;
        let piv = v[p].clone();
        for (i, x) in v.iter_mut().enumerate() {
            *x = if i == p { T::one() } else if i < p { T::zero() } else { x.clone() / piv.clone() };
        }
        pivots.push(p);
        cols.push(v);
    }
    Matrix::from_columns(&cols)
}

impl<T: Scalar> Flag<T> {
    pub fn from_matrix(g: &Matrix<T>) -> Result<Self> {
        Self::from_matrix_with(g, &Tolerance::default())
    }

    pub fn from_matrix_with(g: &Matrix<T>, tol: &Tolerance) -> Result<Self> {
        g.require_square("flag")?;
        if g.rank_with(tol) < g.rows() {
            return Err(Error::Singular);
        }
        Ok(Flag {
            rep: canonical_form(g, tol)?,
        })
    }

    pub fn standard(n: usize) -> Self {
        Flag { rep: Matrix::identity(n) }
    }

    pub fn opposite(n: usize) -> Self {
        Flag {
            rep: Matrix::reversal(n),
        }
    }

    pub fn representative(&self) -> &Matrix<T> {
        &self.rep
    }

    pub fn n(&self) -> usize {
        self.rep.rows()
    }

    /// Basis of `F_k` as the first `k` columns of the representative.
    pub fn subspace(&self, k: usize) -> Matrix<T> {
        let n = self.n();
        self.rep.submatrix(&(0..n).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>())
    }

    /// The flag `h·F`.
    pub fn transform(&self, h: &Matrix<T>) -> Result<Self> {
        Flag::from_matrix(&h.matmul(&self.rep)?)
    }

    pub fn to_f64(&self) -> Flag<f64> {
        Flag { rep: self.rep.to_f64() }
    }
}

pub fn flag_from_matrix<T: Scalar>(g: &Matrix<T>) -> Result<Flag<T>> {
    Flag::from_matrix(g)
}

/// Transversality at every level: `[F_k | F'_{n-k}]` is invertible for
/// `k = 1..n-1`.
pub fn opposed<T: Scalar>(f: &Flag<T>, g: &Flag<T>) -> bool {
    opposed_with(f, g, &Tolerance::default())
}

pub fn opposed_with<T: Scalar>(f: &Flag<T>, g: &Flag<T>, tol: &Tolerance) -> bool {
    let n = f.n();
    if g.n() != n {
        return false;
    }
    (1..n).all(|k| {
        let cols: Vec<Vec<T>> = (0..k)
            .map(|c| f.rep.column(c))
            .chain((0..n - k).map(|c| g.rep.column(c)))
            .collect();
        let m = Matrix::from_columns(&cols).expect("n columns of length n");
        m.rank_with(tol) == n
    })
}

/// Lower unitriangular `u` with `F = u · (standard flag)`, when it exists.
fn lower_factor<T: Scalar>(f: &Flag<T>, tol: &Tolerance) -> Option<Matrix<T>> {
    f.rep.gauss_ldu_with(tol).ok().map(|ldu| ldu.lower)
}

pub fn in_b_pos<T: Scalar>(f: &Flag<T>) -> Option<UniParams<T>> {
    in_b_pos_with(f, &Tolerance::default())
}

pub fn in_b_pos_with<T: Scalar>(f: &Flag<T>, tol: &Tolerance) -> Option<UniParams<T>> {
    if f.n() < 2 {
        return None;
    }
    let u = lower_factor(f, tol)?;
    let word = WhitneyWord::standard(f.n()).ok()?;
    membership_uni_with(&u, Side::Lower, &word, tol).ok().flatten()
}

pub fn in_b_pos_prime<T: Scalar>(f: &Flag<T>) -> Option<UniParams<T>> {
    in_b_pos_prime_with(f, &Tolerance::default())
}

pub fn in_b_pos_prime_with<T: Scalar>(f: &Flag<T>, tol: &Tolerance) -> Option<UniParams<T>> {
    if f.n() < 2 {
        return None;
    }
    let u = lower_factor(f, tol)?;
    let inv = unitriangular_inverse(&u);
    let word = WhitneyWord::standard(f.n()).ok()?;
    membership_uni_with(&inv, Side::Lower, &word, tol).ok().flatten()
}

/// Inverse of a lower unitriangular matrix by forward substitution, keeping
/// the exact unitriangular shape on the float backend.
fn unitriangular_inverse<T: Scalar>(u: &Matrix<T>) -> Matrix<T> {
    let n = u.rows();
    let mut inv = Matrix::<T>::identity(n);
    for c in 0..n {
        for r in c + 1..n {
            let mut s = T::zero();
            for k in c..r {
                s = s + u[(r, k)].clone() * inv[(k, c)].clone();
            }
            inv[(r, c)] = -s;
        }
    }
    inv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    Identity,
    Tilde,
}

impl SigmaMode {
    fn apply<T: Scalar>(self, h: &Matrix<T>) -> Result<Matrix<T>> {
        match self {
            SigmaMode::Identity => Ok(h.clone()),
            SigmaMode::Tilde => tilde(h),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            SigmaMode::Identity => 1,
            SigmaMode::Tilde => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub moduli: Vec<f64>,
    /// `max ‖K^m − I‖` entry for the order `m` of `σ`; only meaningful for
    /// the block on `Lie(B ∩ B')`.
    pub order_defect: f64,
}

#[derive(Clone, Debug)]
pub struct StableFlagPair {
    pub mode: SigmaMode,
    /// Flag of the eigenvectors of `g'` by decreasing eigenvalue.
    pub b: Flag<Rational>,
    /// Flag of the eigenvectors of `g'` by increasing eigenvalue.
    pub b_prime: Flag<Rational>,
    /// Parameters of `b`'s Gauss factor and of the inverse factor of `b_prime`.
    pub b_params: UniParams<Rational>,
    pub b_prime_params: UniParams<Rational>,
    pub spectrum: Spectrum,
    pub dilation: BlockReport,
    pub contraction: BlockReport,
    pub finite_order: BlockReport,
    /// Largest strictly-lower entry of `V⁻¹ g σ(V)` relative to its norm,
    /// for `B` and `B'`.
    pub stability_defect: (f64, f64),
}

impl StableFlagPair {
    pub fn b_margin(&self) -> f64 {
        self.b_params.margin()
    }

    pub fn b_prime_margin(&self) -> f64 {
        self.b_prime_params.margin()
    }

    /// Eigenvectors of `g'` as columns, decreasing eigenvalue order.
    pub fn eigenvectors(&self) -> &Matrix<f64> {
        &self.spectrum.eigenvectors
    }
}

const RATIONAL_QUANTUM: f64 = 1e-12;

fn rationalize_matrix(m: &Matrix<f64>) -> Result<Matrix<Rational>> {
    let entries = m
        .entries()
        .iter()
        .map(|x| rationalize(*x, RATIONAL_QUANTUM))
        .collect::<Result<Vec<_>>>()?;
    Matrix::new(m.rows(), m.cols(), entries)
}

/// Exact flag of the columns of `v` taken in the given order, after
/// rationalizing at `1e-12`.
pub fn eigenflag(v: &Matrix<f64>, order: &[usize]) -> Result<Flag<Rational>> {
    let cols: Vec<Vec<f64>> = order.iter().map(|&c| v.column(c)).collect();
    Flag::from_matrix(&rationalize_matrix(&Matrix::from_columns(&cols)?)?)
}

fn reversed_columns(v: &Matrix<f64>) -> Matrix<f64> {
    let n = v.cols();
    Matrix::from_fn(v.rows(), n, |r, c| v[(r, n - 1 - c)])
}

fn strictly_lower_defect(w: &Matrix<f64>) -> f64 {
    let n = w.rows();
    let scale = w.max_abs().max(f64::MIN_POSITIVE);
    (0..n)
        .flat_map(|r| (0..r).map(move |c| (r, c)))
        .map(|(r, c)| w[(r, c)].abs())
        .fold(0.0, f64::max)
        / scale
}

/// Matrix of `X ↦ g · dσ(X) · g⁻¹` in the basis `V E_ij V⁻¹`, with basis
/// index `i * n + j`.
fn lie_matrix(g: &Matrix<f64>, v: &Matrix<f64>, mode: SigmaMode) -> Result<Matrix<f64>> {
    let n = g.rows();
    let v_inv = v.inverse_with(&Tolerance::uniform(1e-14)?)?;
    let g_inv = g.inverse_with(&Tolerance::uniform(1e-14)?)?;
    let c0 = c0_matrix::<f64>(n);
    let c0_inv = c0.transpose();
    let mut cols = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = Matrix::<f64>::zeros(n, n);
            e[(i, j)] = 1.0;
            let x = v.matmul(&e)?.matmul(&v_inv)?;
            let dx = match mode {
                SigmaMode::Identity => x,
                SigmaMode::Tilde => c0.matmul(&x.transpose())?.matmul(&c0_inv)?.scale(&-1.0),
            };
            let y = g.matmul(&dx)?.matmul(&g_inv)?;
            let coords = v_inv.matmul(&y)?.matmul(v)?;
            cols.push(coords.entries().to_vec());
        }
    }
    Matrix::from_columns(&cols)
}

fn block(k: &Matrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    to_dmatrix(&k.submatrix(idx, idx))
}

/// Eigenvalue moduli of a real matrix. The matrix is centred on its mean
/// diagonal entry and balanced, then reduced by a Schur decomposition with
/// bounded iterations, retrying on the transpose when the QR sweep stalls.
fn block_eigenvalues(b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let size = b.nrows();
    let mu = b.trace() / size as f64;
    let mut centred = b - DMatrix::<f64>::identity(size, size) * mu;
    balance_parlett_reinsch(&mut centred);
    let eps = 1e-13;
    let schur = Schur::try_new(centred.clone(), eps, SCHUR_CAP)
        .or_else(|| Schur::try_new(centred.transpose(), eps, SCHUR_CAP))
        .ok_or_else(|| Error::Convergence("Schur iteration on a Lie block did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().map(|z| (z + mu).norm()).collect())
}

const SCHUR_CAP: usize = 10_000;

fn block_report(k: &Matrix<f64>, idx: &[usize], order: u32) -> Result<BlockReport> {
    if idx.is_empty() {
        return Ok(BlockReport {
            moduli: Vec::new(),
            order_defect: 0.0,
        });
    }
    let b = block(k, idx);
    let mut moduli = block_eigenvalues(&b)?;
    moduli.sort_by(|a, b| b.total_cmp(a));
    let mut p = DMatrix::<f64>::identity(idx.len(), idx.len());
    for _ in 0..order {
        p = &p * &b;
    }
    let order_defect = (p - DMatrix::<f64>::identity(idx.len(), idx.len())).amax();
    Ok(BlockReport { moduli, order_defect })
}

/// `g` in identity mode, `g · tilde(g)` in tilde mode.
pub fn sigma_product<T: Scalar>(g: &Matrix<T>, mode: SigmaMode) -> Result<Matrix<T>> {
    match mode {
        SigmaMode::Identity => Ok(g.clone()),
        SigmaMode::Tilde => g.matmul(&tilde(g)?),
    }
}

pub fn stable_flags<T: Scalar>(g: &Matrix<T>, mode: SigmaMode) -> Result<StableFlagPair> {
    stable_flags_with(g, mode, &SpectralOptions::default())
}

pub fn stable_flags_with<T: Scalar>(g: &Matrix<T>, mode: SigmaMode, opts: &SpectralOptions) -> Result<StableFlagPair> {
    g.require_square("stable flags")?;
    let n = g.rows();
    if n < 2 {
        return Err(Error::Input("stable flags need n >= 2".into()));
    }
    let gp = sigma_product(g, mode)?;
    if !is_totally_positive_with(&gp, &opts.tol) {
        return Err(Error::Domain(match mode {
            SigmaMode::Identity => "g is not totally positive".into(),
            SigmaMode::Tilde => "g · tilde(g) is not totally positive".into(),
        }));
    }
    let spectrum = gk_spectrum_with(&gp, opts)?;
    let v = spectrum.eigenvectors.clone();
    let order: Vec<usize> = (0..n).collect();
    let b = eigenflag(&v, &order)?;
    let b_prime = eigenflag(&v, &order.iter().rev().copied().collect::<Vec<_>>())?;
    let b_params = in_b_pos(&b)
        .ok_or_else(|| Error::Consistency("eigenflag of decreasing eigenvalues is not positive".into()))?;
    let b_prime_params = in_b_pos_prime(&b_prime)
        .ok_or_else(|| Error::Consistency("eigenflag of increasing eigenvalues is not in the primed positive part".into()))?;
    if !opposed(&b, &b_prime) {
        return Err(Error::Consistency("stable flags are not opposed".into()));
    }

    let gf = g.to_f64();
    let stab = |basis: &Matrix<f64>| -> Result<f64> {
        let w = basis
            .inverse_with(&Tolerance::uniform(1e-14)?)?
            .matmul(&gf)?
            .matmul(&mode.apply(basis)?)?;
        Ok(strictly_lower_defect(&w))
    };
    let stability_defect = (stab(&v)?, stab(&reversed_columns(&v))?);
    let stab_tol = 1e-8;
    if stability_defect.0 > stab_tol || stability_defect.1 > stab_tol {
        return Err(Error::Consistency(format!(
            "flags are not stable under g·σ(·)·g⁻¹ (defects {:e}, {:e})",
            stability_defect.0, stability_defect.1
        )));
    }

    let k = lie_matrix(&gf, &v, mode)?;
    let upper: Vec<usize> = (0..n).cartesian_product(0..n).filter(|(i, j)| i < j).map(|(i, j)| i * n + j).collect();
    let lower: Vec<usize> = (0..n).cartesian_product(0..n).filter(|(i, j)| i > j).map(|(i, j)| i * n + j).collect();
    let diag: Vec<usize> = (0..n).map(|i| i * n + i).collect();
    let dilation = block_report(&k, &upper, mode.order())?;
    let contraction = block_report(&k, &lower, mode.order())?;
    let finite_order = block_report(&k, &diag, mode.order())?;
    if dilation.moduli.iter().any(|m| *m <= 1.0) || contraction.moduli.iter().any(|m| *m >= 1.0) {
        return Err(Error::Consistency(format!(
            "quotient blocks are not a dilation/contraction pair: {:?} / {:?}",
            dilation.moduli, contraction.moduli
        )));
    }
    Ok(StableFlagPair {
        mode,
        b,
        b_prime,
        b_params,
        b_prime_params,
        spectrum,
        dilation,
        contraction,
        finite_order,
        stability_defect,
    })
}

/// `V⁻¹ g V` is diagonal with positive entries, within tolerance.
pub fn identity_component_check<T: Scalar>(g: &Matrix<T>, pair: &StableFlagPair) -> bool {
    let v = pair.eigenvectors();
    let Ok(v_inv) = v.inverse_with(&Tolerance::uniform(1e-14).expect("positive")) else {
        return false;
    };
    let Ok(d) = v_inv.matmul(&g.to_f64()).and_then(|x| x.matmul(v)) else {
        return false;
    };
    let n = d.rows();
    let scale = d.max_abs();
    let off = (0..n)
        .cartesian_product(0..n)
        .filter(|(r, c)| r != c)
        .map(|(r, c)| d[(r, c)].abs())
        .fold(0.0, f64::max);
    off <= 1e-8 * scale && (0..n).all(|i| d[(i, i)] > off)
}

/// Orderings of the eigenvectors whose flag passes [`in_b_pos`].
pub fn positive_eigenflag_orderings(v: &Matrix<f64>) -> Result<Vec<Vec<usize>>> {
    let n = v.cols();
    let mut passing = Vec::new();
    for perm in (0..n).permutations(n) {
        if in_b_pos(&eigenflag(v, &perm)?).is_some() {
            passing.push(perm);
        }
    }
    Ok(passing)
}
