//! Total positivity and nonnegativity, sign variation, variation
//! diminishing and oscillatory exponents.
//!
//! Classification enumerates every minor of every order. On the exact
//! backend the verdicts are certain. On the float backend a minor whose
//! magnitude falls below the tolerance threshold (scaled by the Hadamard
//! bound of its submatrix) makes strict positivity indeterminate; the
//! boolean surface reports that as `false` and logs a warning.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par::Execution;
use crate::scalar::{Scalar, Sign, Tolerance};

/// Number of strict sign changes after deleting zeros.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SignVariation(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    /// Float backend only: some deciding quantity sits within tolerance of zero.
    Indeterminate,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Yes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TpKind {
    TotallyPositive,
    TotallyNonNegativeOnly,
    Neither,
}

/// Classification plus the smallest power found to be totally positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TpClass {
    pub kind: TpKind,
    pub oscillatory_exponent: Option<usize>,
}

/// Minor-sign summary of a square matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Positivity {
    pub nonnegative: Verdict,
    pub positive: Verdict,
    /// Minors within tolerance of zero (always 0 on the exact backend
    /// unless a minor is exactly zero).
    pub near_zero: usize,
    pub minors_checked: usize,
}

pub fn sign_variation<T: Scalar>(v: &[T]) -> SignVariation {
    sign_variation_with(v, &Tolerance::default())
}

pub fn sign_variation_with<T: Scalar>(v: &[T], tol: &Tolerance) -> SignVariation {
    let scale = v.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    let thr = tol.threshold(scale);
    let changes = v
        .iter()
        .map(|x| x.sign_within(thr))
        .filter(|s| *s != Sign::Zero)
        .tuple_windows()
        .filter(|(a, b)| a != b)
        .count();
    SignVariation(changes)
}

fn hadamard_bound<T: Scalar>(sub: &Matrix<T>) -> f64 {
    (0..sub.rows())
        .map(|r| sub.row(r).iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt())
        .product()
}

fn minor_signs_of_order<T: Scalar>(
    m: &Matrix<T>,
    k: usize,
    tol: &Tolerance,
    exec: Execution,
) -> Vec<Sign> {
    let n = m.rows();
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    exec.map(subsets.clone(), |r| {
        subsets
            .iter()
            .map(|c| {
                let sub = m.submatrix(&r, c);
                let thr = if T::EXACT {
                    0.0
                } else {
                    tol.threshold(hadamard_bound(&sub))
                };
                T::determinant(&sub).sign_within(thr)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Three-way verdicts for total nonnegativity and total positivity.
pub fn positivity<T: Scalar>(m: &Matrix<T>, tol: &Tolerance, exec: Execution) -> Result<Positivity> {
    m.require_square("total positivity test")?;
    let mut negative = false;
    let mut zero = 0usize;
    let mut checked = 0usize;
    for k in 1..=m.rows() {
        for s in minor_signs_of_order(m, k, tol, exec) {
            checked += 1;
            match s {
                Sign::Negative => negative = true,
                Sign::Zero => zero += 1,
                Sign::Positive => {}
            }
        }
    }
    let nonnegative = if negative { Verdict::No } else { Verdict::Yes };
    let positive = if negative {
        Verdict::No
    } else if zero == 0 {
        Verdict::Yes
    } else if T::EXACT {
        Verdict::No
    } else {
        Verdict::Indeterminate
    };
    if !T::EXACT && zero > 0 {
        log::warn!("{zero} of {checked} minors lie within tolerance of zero");
    }
    Ok(Positivity {
        nonnegative,
        positive,
        near_zero: if T::EXACT { 0 } else { zero },
        minors_checked: checked,
    })
}

/// Every minor `>= 0`. Non-square input is never totally nonnegative.
pub fn is_totally_nonnegative<T: Scalar>(m: &Matrix<T>) -> bool {
    is_totally_nonnegative_with(m, &Tolerance::default())
}

pub fn is_totally_nonnegative_with<T: Scalar>(m: &Matrix<T>, tol: &Tolerance) -> bool {
    positivity(m, tol, Execution::default()).is_ok_and(|p| p.nonnegative.holds())
}

/// Every minor `> 0`. Non-square input is never totally positive.
pub fn is_totally_positive<T: Scalar>(m: &Matrix<T>) -> bool {
    is_totally_positive_with(m, &Tolerance::default())
}

pub fn is_totally_positive_with<T: Scalar>(m: &Matrix<T>, tol: &Tolerance) -> bool {
    positivity(m, tol, Execution::default()).is_ok_and(|p| p.positive.holds())
}

pub(crate) fn require_invertible<T: Scalar>(m: &Matrix<T>, tol: &Tolerance) -> Result<()> {
    m.require_square("operation")?;
    if m.rank_with(tol) < m.rows() {
        return Err(Error::Singular);
    }
    Ok(())
}

/// No compound `Λ^k M` has two entries of strictly opposite signs.
pub fn is_variation_diminishing<T: Scalar>(m: &Matrix<T>) -> Result<bool> {
    is_variation_diminishing_with(m, &Tolerance::default())
}

pub fn is_variation_diminishing_with<T: Scalar>(m: &Matrix<T>, tol: &Tolerance) -> Result<bool> {
    require_invertible(m, tol)?;
    let exec = Execution::default();
    Ok((1..=m.rows()).all(|k| {
        let signs = minor_signs_of_order(m, k, tol, exec);
        let pos = signs.contains(&Sign::Positive);
        let neg = signs.contains(&Sign::Negative);
        !(pos && neg)
    }))
}

/// `sign_variation(M v) <= sign_variation(v)`.
pub fn variation_diminishes_on<T: Scalar>(m: &Matrix<T>, v: &[T]) -> Result<bool> {
    let image = m.mul_vec(v)?;
    Ok(sign_variation(&image) <= sign_variation(v))
}

/// Default search bound for the oscillatory exponent: `n - 1`, at least 1.
pub fn default_oscillatory_bound(n: usize) -> usize {
    n.saturating_sub(1).max(1)
}

/// Smallest `m` in `[1, m_max]` with `M^m` totally positive, provided `M`
/// itself is totally nonnegative.
pub fn is_oscillatory<T: Scalar>(m: &Matrix<T>, m_max: usize) -> Option<usize> {
    is_oscillatory_with(m, m_max, &Tolerance::default())
}

pub fn is_oscillatory_with<T: Scalar>(m: &Matrix<T>, m_max: usize, tol: &Tolerance) -> Option<usize> {
    if !is_totally_nonnegative_with(m, tol) {
        return None;
    }
    let mut power = m.clone();
    for e in 1..=m_max {
        if is_totally_positive_with(&power, tol) {
            return Some(e);
        }
        power = power.matmul(m).ok()?;
    }
    None
}

pub fn classify<T: Scalar>(m: &Matrix<T>, m_max: Option<usize>) -> Result<TpClass> {
    classify_with(m, m_max, &Tolerance::default())
}

pub fn classify_with<T: Scalar>(m: &Matrix<T>, m_max: Option<usize>, tol: &Tolerance) -> Result<TpClass> {
    let p = positivity(m, tol, Execution::default())?;
    let kind = match (p.nonnegative, p.positive) {
        (_, Verdict::Yes) => TpKind::TotallyPositive,
        (Verdict::Yes, _) => TpKind::TotallyNonNegativeOnly,
        _ => TpKind::Neither,
    };
    let oscillatory_exponent = match kind {
        TpKind::TotallyPositive => Some(1),
        TpKind::TotallyNonNegativeOnly => {
            let bound = m_max.unwrap_or_else(|| default_oscillatory_bound(m.rows()));
            is_oscillatory_with(m, bound, tol)
        }
        TpKind::Neither => None,
    };
    Ok(TpClass {
        kind,
        oscillatory_exponent,
    })
}
