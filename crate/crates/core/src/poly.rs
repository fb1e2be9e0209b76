//! Univariate polynomials over the rationals and Sturm real-root counting.

use num::{Signed, Zero};

use crate::scalar::Rational;

/// Coefficients from the constant term upward, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().expect("nonzero").clone();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let f = rem.last().expect("nonempty").clone() / lead.clone();
            for (k, c) in d.0.iter().enumerate() {
                rem[shift + k] = rem[shift + k].clone() - f.clone() * c;
            }
            quot[shift] = f;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => Poly::new(self.0.iter().map(|c| c / l).collect()),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&g).0
    }

    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone()];
        let mut next = self.derivative();
        while !next.is_zero() {
            let (_, r) = seq.last().expect("nonempty").div_rem(&next);
            seq.push(next);
            next = Poly::new(r.0.into_iter().map(|c| -c).collect());
        }
        seq
    }

    /// Number of distinct real roots; zero for constant polynomials.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = self.squarefree().sturm_sequence();
        let at_pos: Vec<i8> = seq.iter().map(|p| sign(p.leading().expect("nonzero"))).collect();
        let at_neg: Vec<i8> = seq
            .iter()
            .map(|p| {
                let s = sign(p.leading().expect("nonzero"));
                if p.degree().unwrap_or(0) % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        changes(&at_neg) - changes(&at_pos)
    }
}

fn sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn changes(signs: &[i8]) -> usize {
    let nz: Vec<i8> = signs.iter().copied().filter(|s| *s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

impl From<&[Rational]> for Poly {
    fn from(c: &[Rational]) -> Self {
        Poly::new(c.to_vec())
    }
}

impl std::ops::Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a * b;
            }
        }
        Poly::new(out)
    }
}
