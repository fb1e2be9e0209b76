//! Gantmacher–Krein spectra of totally positive matrices.
//!
//! Eigenvalues come from Perron roots of compound matrices,
//! `c_k = ρ_k / ρ_{k-1}` with `ρ_k` the Perron root of `Λ^k M`. Each Perron
//! root is found by power iteration and then polished by shifted inverse
//! iteration. Eigenvectors come from shifted inverse iteration on `M`, or on
//! `M⁻¹` when that gives the better relative accuracy for a small
//! eigenvalue. The Rayleigh quotients of those eigenvectors are an
//! independent estimate of the spectrum used for cross-checks.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::minors::compound_with;
use crate::par::Execution;
use crate::scalar::{Rational, Scalar, Tolerance};
use crate::tp::is_totally_positive_with;

#[derive(Clone, Copy, Debug)]
pub struct SpectralOptions {
    pub tol: Tolerance,
    /// Relative gap `c_r - c_{r+1} > gap · c_r` required between eigenvalues.
    pub gap: f64,
    pub power_cap: usize,
    pub inverse_cap: usize,
    pub exec: Execution,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: Tolerance::default(),
            gap: 1e-8,
            power_cap: 10_000,
            inverse_cap: 100,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    /// `c_1 > c_2 > … > c_n > 0`.
    pub eigenvalues: Vec<f64>,
    /// Column `r` is a unit eigenvector for `c_r`, first nonzero coordinate positive.
    #[serde(serialize_with = "serialize_columns")]
    pub eigenvectors: Matrix<f64>,
    /// `‖M v_r − c_r v_r‖`.
    pub residuals: Vec<f64>,
    /// `ρ_k`, the Perron root of the k-th compound, `k = 1..=n`.
    pub perron_roots: Vec<f64>,
    /// Rayleigh quotients of the eigenvectors.
    pub refined: Vec<f64>,
}

fn serialize_columns<S: serde::Serializer>(m: &Matrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.cols()))?;
    for c in 0..m.cols() {
        seq.serialize_element(&m.column(c))?;
    }
    seq.end()
}

pub(crate) fn to_dmatrix(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.entries())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn apply(m: &Matrix<f64>, v: &[f64]) -> Vec<f64> {
    m.mul_vec(v).expect("dimensions agree")
}

/// Scale to unit norm with the first coordinate of non-negligible size positive.
pub fn normalize_sign(v: &mut [f64]) {
    let nrm = norm(v);
    if nrm == 0.0 {
        return;
    }
    let big = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let lead = v.iter().find(|x| x.abs() > 1e-12 * big).copied().unwrap_or(1.0);
    let s = lead.signum() / nrm;
    v.iter_mut().for_each(|x| *x *= s);
}

/// Inverse iteration with a fixed shift. Returns a unit vector and its
/// Rayleigh quotient.
fn inverse_iteration(a: &Matrix<f64>, shift: f64, cap: usize) -> Result<(Vec<f64>, f64)> {
    let n = a.rows();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut sigma = shift;
    let lu = loop {
        let mut shifted = to_dmatrix(a);
        for i in 0..n {
            shifted[(i, i)] -= sigma;
        }
        let lu = shifted.lu();
        if lu.is_invertible() {
            break lu;
        }
        sigma += 1e-14 * scale.max(shift.abs());
    };
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) / (n as f64 + 1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = dot(&v, &apply(a, &v));
    for _ in 0..cap {
        let rhs = nalgebra::DVector::from_column_slice(&v);
        let Some(w) = lu.solve(&rhs) else {
            break;
        };
        let mut w: Vec<f64> = w.iter().copied().collect();
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            break;
        }
        w.iter_mut().for_each(|x| *x /= nw);
        if dot(&w, &v) < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
        let change = w.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        v = w;
        let av = apply(a, &v);
        lambda = dot(&v, &av);
        let residual = norm(&av.iter().zip(&v).map(|(x, y)| x - lambda * y).collect::<Vec<_>>());
        if change <= 4.0 * f64::EPSILON || residual <= 4.0 * f64::EPSILON * scale {
            return Ok((v, lambda));
        }
    }
    let av = apply(a, &v);
    let residual = norm(&av.iter().zip(&v).map(|(x, y)| x - lambda * y).collect::<Vec<_>>());
    if residual <= 1e-10 * scale {
        Ok((v, lambda))
    } else {
        Err(Error::Convergence(format!(
            "inverse iteration near {shift} did not converge in {cap} steps (residual {residual:e})"
        )))
    }
}

/// Dominant eigenvalue and positive eigenvector (unit sum) of a matrix with
/// strictly positive entries.
pub fn perron(m: &Matrix<f64>) -> Result<(f64, Vec<f64>)> {
    perron_with(m, &SpectralOptions::default())
}

pub fn perron_with(m: &Matrix<f64>, opts: &SpectralOptions) -> Result<(f64, Vec<f64>)> {
    m.require_square("Perron iteration")?;
    if let Some(bad) = m.entries().iter().find(|x| (**x).partial_cmp(&0.0) != Some(Ordering::Greater)) {
        return Err(Error::Domain(format!("Perron iteration needs positive entries, found {bad}")));
    }
    let n = m.rows();
    if n == 1 {
        return Ok((m[(0, 0)], vec![1.0]));
    }
    let mut v = vec![1.0 / n as f64; n];
    let mut rq_prev = f64::NAN;
    let mut converged = false;
    for _ in 0..opts.power_cap {
        let w = apply(m, &v);
        let rq = dot(&v, &w) / dot(&v, &v);
        let s: f64 = w.iter().sum();
        v = w.into_iter().map(|x| x / s).collect();
        if (rq - rq_prev).abs() <= 1e-15 * rq.abs() {
            converged = true;
            break;
        }
        rq_prev = rq;
    }
    let estimate = dot(&v, &apply(m, &v)) / dot(&v, &v);
    let polished = inverse_iteration(m, estimate, opts.inverse_cap);
    let (w, root) = match polished {
        Ok(p) => p,
        Err(e) if converged => {
            log::debug!("Perron polish failed after converged power iteration: {e}");
            (v.clone(), estimate)
        }
        Err(_) => {
            return Err(Error::Convergence(format!(
                "power iteration did not converge in {} steps",
                opts.power_cap
            )))
        }
    };
    let s: f64 = w.iter().sum();
    let vec: Vec<f64> = w.iter().map(|x| x / s).collect();
    if vec.iter().any(|x| *x <= 0.0) || !root.is_finite() {
        return Err(Error::Convergence("Perron vector lost positivity".into()));
    }
    let av = apply(m, &vec);
    let root_from_sum = av.iter().sum::<f64>();
    let rel = (root_from_sum - root).abs() / root.abs();
    if rel > 1e-8 {
        return Err(Error::Convergence(format!(
            "Perron root estimates disagree by {rel:e}"
        )));
    }
    Ok((root, vec))
}

/// Eigenvalues, eigenvectors and compound Perron roots of a totally
/// positive matrix.
pub fn gk_spectrum<T: Scalar>(m: &Matrix<T>) -> Result<Spectrum> {
    gk_spectrum_with(m, &SpectralOptions::default())
}

pub fn gk_spectrum_with<T: Scalar>(m: &Matrix<T>, opts: &SpectralOptions) -> Result<Spectrum> {
    m.require_square("spectrum")?;
    if !is_totally_positive_with(m, &opts.tol) {
        return Err(Error::Domain("matrix is not totally positive".into()));
    }
    spectrum_unchecked(m, opts)
}

/// The spectral construction without the total positivity precondition;
/// callers that have already established it use this directly.
/// One inverse-iteration step in the scalar type of `m`, shifted by the
/// float eigenvalue estimate.
pub(crate) fn refine_eigenvector<T: Scalar>(m: &Matrix<T>, v: &[f64], lambda: f64, opts: &SpectralOptions) -> Result<Vec<T>> {
    let n = m.rows();
    let shift = T::from_rational(&Rational::from_float(lambda).ok_or_else(|| {
        Error::Convergence(format!("eigenvalue estimate {lambda} is not finite"))
    })?);
    let shifted = Matrix::from_fn(n, n, |r, c| {
        if r == c {
            m[(r, c)].clone() - shift.clone()
        } else {
            m[(r, c)].clone()
        }
    });
    let start: Vec<T> = v
        .iter()
        .map(|x| Rational::from_float(*x).map(|q| T::from_rational(&q)).unwrap_or_else(T::zero))
        .collect();
    let Ok(inv) = shifted.inverse_with(&opts.tol) else {
        return Ok(start);
    };
    let mut x = inv.mul_vec(&start)?;
    let pivot = x
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.magnitude().total_cmp(&b.1.magnitude()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if (x[pivot].to_f64() < 0.0) != (v[pivot] < 0.0) {
        x = x.into_iter().map(|e| -e).collect();
    }
    Ok(x)
}

pub(crate) fn spectrum_unchecked<T: Scalar>(m: &Matrix<T>, opts: &SpectralOptions) -> Result<Spectrum> {
    let n = m.rows();
    let compounds: Vec<Matrix<f64>> = (1..=n)
        .map(|k| compound_with(m, k, opts.exec).map(|c| c.to_f64()))
        .collect::<Result<_>>()?;
    let roots: Vec<f64> = opts
        .exec
        .map(compounds, |c| perron_with(&c, opts).map(|(r, _)| r))
        .into_iter()
        .collect::<Result<_>>()?;
    let eigenvalues: Vec<f64> = (0..n)
        .map(|k| if k == 0 { roots[0] } else { roots[k] / roots[k - 1] })
        .collect();
    for (r, w) in eigenvalues.windows(2).enumerate() {
        let separated = (w[0] - w[1]).partial_cmp(&(opts.gap * w[0])) == Some(Ordering::Greater);
        if !separated || w[1].partial_cmp(&0.0) != Some(Ordering::Greater) {
            return Err(Error::Convergence(format!(
                "eigenvalues c_{} = {} and c_{} = {} are not separated",
                r + 1,
                w[0],
                r + 2,
                w[1]
            )));
        }
    }

    let mf = m.to_f64();
    let inv = if n > 1 { Some(m.inverse_with(&opts.tol)?.to_f64()) } else { None };
    let norm_m = mf.frobenius_norm();
    let norm_inv = inv.as_ref().map_or(0.0, Matrix::frobenius_norm);
    let mut vectors = Vec::with_capacity(n);
    let mut refined = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &c in &eigenvalues {
        let (mut v, lambda) = match &inv {
            Some(inv) if norm_inv * c < norm_m / c => {
                let (v, mu) = inverse_iteration(inv, 1.0 / c, opts.inverse_cap)?;
                (v, 1.0 / mu)
            }
            _ => inverse_iteration(&mf, c, opts.inverse_cap)?,
        };
        let x = refine_eigenvector(m, &v, lambda, opts)?;
        if x.iter().all(|e| e.to_f64().is_finite()) {
            v = x.iter().map(Scalar::to_f64).collect();
        }
        normalize_sign(&mut v);
        let av = apply(&mf, &v);
        residuals.push(norm(&av.iter().zip(&v).map(|(x, y)| x - c * y).collect::<Vec<_>>()));
        refined.push(lambda);
        vectors.push(v);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Matrix::from_columns(&vectors)?,
        residuals,
        perron_roots: roots,
        refined,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GkReport {
    pub passed: bool,
    pub eigenvalues: Vec<f64>,
    pub positive: bool,
    /// Every residual is within tolerance of zero relative to `‖M‖`.
    pub real: bool,
    pub distinct: bool,
    /// Largest relative discrepancy between `ρ_k` and the product of the
    /// first `k` Rayleigh-refined eigenvalues.
    pub perron_identity_error: f64,
    /// Relative discrepancy between `∏ c_r` and `det M`.
    pub determinant_error: f64,
    pub failures: Vec<String>,
}

/// Run the spectral construction and check its conclusions. Failed checks
/// are reported; only a violated precondition is an error.
pub fn verify_gk<T: Scalar>(m: &Matrix<T>) -> Result<GkReport> {
    verify_gk_with(m, &SpectralOptions::default())
}

pub fn verify_gk_with<T: Scalar>(m: &Matrix<T>, opts: &SpectralOptions) -> Result<GkReport> {
    m.require_square("spectrum")?;
    if !is_totally_positive_with(m, &opts.tol) {
        return Err(Error::Domain("matrix is not totally positive".into()));
    }
    let spectrum = match spectrum_unchecked(m, opts) {
        Ok(s) => s,
        Err(e @ Error::Convergence(_)) => {
            return Ok(GkReport {
                passed: false,
                eigenvalues: Vec::new(),
                positive: false,
                real: false,
                distinct: false,
                perron_identity_error: f64::NAN,
                determinant_error: f64::NAN,
                failures: vec![e.to_string()],
            })
        }
        Err(e) => return Err(e),
    };
    let c = &spectrum.eigenvalues;
    let mut failures = Vec::new();
    let positive = c.iter().all(|x| *x > 0.0);
    if !positive {
        failures.push("an eigenvalue is not positive".to_string());
    }
    let scale = m.to_f64().frobenius_norm();
    let real = spectrum.residuals.iter().all(|r| *r <= 1e-8 * scale);
    if !real {
        failures.push(format!("residuals {:?} exceed 1e-8 relative", spectrum.residuals));
    }
    let distinct = c.windows(2).all(|w| w[0] - w[1] > opts.gap * w[0]);
    if !distinct {
        failures.push("eigenvalue gap below tolerance".to_string());
    }
    let mut product = 1.0;
    let mut perron_identity_error: f64 = 0.0;
    for (rho, lambda) in spectrum.perron_roots.iter().zip(&spectrum.refined) {
        product *= lambda;
        perron_identity_error = perron_identity_error.max((rho - product).abs() / rho.abs());
    }
    if perron_identity_error > 1e-7 {
        failures.push(format!("compound Perron identity off by {perron_identity_error:e}"));
    }
    let det = m.det()?.to_f64();
    let determinant_error = (c.iter().product::<f64>() - det).abs() / det.abs();
    if determinant_error > 1e-9 {
        failures.push(format!("product of eigenvalues off det by {determinant_error:e}"));
    }
    Ok(GkReport {
        passed: failures.is_empty(),
        eigenvalues: c.clone(),
        positive,
        real,
        distinct,
        perron_identity_error,
        determinant_error,
        failures,
    })
}
