//! Scalar backends: exact rationals and tolerance-policed floats.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::Sign as BigSign;
use num::{BigInt, BigRational, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Arbitrary-precision fraction, always in lowest terms with positive
/// denominator.
pub type Rational = BigRational;

/// Default absolute tolerance of the float backend.
pub const DEFAULT_ABS_TOL: f64 = 1e-9;
/// Default relative tolerance of the float backend.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Tolerance policy for float decisions. Ignored by the exact backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: DEFAULT_ABS_TOL,
            rel: DEFAULT_REL_TOL,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs > 0.0 && abs.is_finite() && rel > 0.0 && rel.is_finite()) {
            return Err(Error::Input(format!(
                "tolerances must be positive and finite, got abs={abs}, rel={rel}"
            )));
        }
        Ok(Tolerance { abs, rel })
    }

    /// Same value for both components.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol)
    }

    /// Threshold below which a quantity of natural size `scale` counts as zero.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }
}

/// Three-way sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn is_opposite(self, other: Sign) -> bool {
        matches!(
            (self, other),
            (Sign::Negative, Sign::Positive) | (Sign::Positive, Sign::Negative)
        )
    }
}

/// Field operations shared by both backends.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and sign decisions are certain.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    /// Sign, reporting values of magnitude `<= threshold` as zero on the
    /// float backend. The exact backend ignores `threshold`.
    fn sign_within(&self, threshold: f64) -> Sign;

    /// Parse one entry in the scalar lexical forms: integer, `p/q`, decimal.
    fn parse_lexeme(s: &str) -> Result<Self>;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn exact_sign(&self) -> Sign {
        self.sign_within(0.0)
    }

    /// Determinant of a square matrix. The default is Gaussian elimination
    /// with partial pivoting; the exact backend overrides it with a
    /// fraction-free elimination.
    fn determinant(m: &Matrix<Self>) -> Self {
        crate::matrix::det_by_elimination(m)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn sign_within(&self, _threshold: f64) -> Sign {
        bigint_sign(self.numer())
    }

    fn parse_lexeme(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        crate::matrix::det_bareiss(m)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign_within(&self, threshold: f64) -> Sign {
        if self.abs() <= threshold {
            Sign::Zero
        } else if *self > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn parse_lexeme(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("bad numerator in {t:?}")))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("bad denominator in {t:?}")))?;
            if q == 0.0 {
                return Err(Error::Input(format!("zero denominator in {t:?}")));
            }
            return Ok(p / q);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Input(format!("cannot parse {t:?} as a number")))?;
        if !v.is_finite() {
            return Err(Error::Input(format!("non-finite entry {t:?}")));
        }
        Ok(v)
    }
}

/// Correctly scaled conversion that survives numerators and denominators
/// beyond the f64 range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    // Bring the quotient to about 2^60 before dividing.
    let scaled = if shift > 60 {
        r / Rational::from_integer(BigInt::one() << (shift - 60) as usize)
    } else {
        r * Rational::from_integer(BigInt::one() << (60 - shift) as usize)
    };
    let q = scaled.numer() / scaled.denom();
    q.to_f64().unwrap_or(0.0) * 2f64.powi((shift - 60) as i32)
}

/// Parse an integer, a fraction `p/q`, or a decimal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Input("empty scalar".into()));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad numerator in {t:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad denominator in {t:?}")))?;
        if q.is_zero() {
            return Err(Error::Input(format!("zero denominator in {t:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..]
                .parse()
                .map_err(|_| Error::Input(format!("bad exponent in {t:?}")))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Input(format!("cannot parse {t:?} as a number")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().expect("digits only")
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num::pow(ten, (-scale) as usize))
    })
}

/// Round `x` to the nearest multiple of `quantum` and return it exactly.
pub fn rationalize(x: f64, quantum: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Input(format!("cannot rationalize {x}")));
    }
    let steps = (x / quantum).round();
    let numer = BigInt::from_f64(steps).ok_or_else(|| Error::Input(format!("cannot rationalize {x}")))?;
    let denom_steps = (1.0 / quantum).round();
    let denom = BigInt::from_f64(denom_steps).unwrap_or_else(BigInt::one);
    Ok(Rational::new(numer, denom))
}

/// Shorthand for building exact rationals in code and tests.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub(crate) fn bigint_sign(b: &BigInt) -> Sign {
    match b.sign() {
        BigSign::Minus => Sign::Negative,
        BigSign::NoSign => Sign::Zero,
        BigSign::Plus => Sign::Positive,
    }
}
