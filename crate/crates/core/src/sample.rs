//! Seeded random generators for parameters, matrices, forms and flags.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bilinear::{A_to_form, BilinearForm};
use crate::matrix::Matrix;
use crate::scalar::{rat, Rational};
use crate::whitney::{NonNegative, Side, Strict, TpParameters, UniParams, WhitneyWord, WordKind};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ranges for random positive rationals `p/q`.
#[derive(Clone, Copy, Debug)]
pub struct RationalRange {
    pub max_numerator: i64,
    pub max_denominator: i64,
}

impl Default for RationalRange {
    fn default() -> Self {
        RationalRange {
            max_numerator: 8,
            max_denominator: 4,
        }
    }
}

pub fn positive_rational<R: Rng>(rng: &mut R, range: RationalRange) -> Rational {
    let p = rng.random_range(1..=range.max_numerator);
    let q = rng.random_range(1..=range.max_denominator);
    rat(p, q)
}

fn positive_vec<R: Rng>(rng: &mut R, len: usize, range: RationalRange) -> Vec<Rational> {
    (0..len).map(|_| positive_rational(rng, range)).collect()
}

pub fn tp_parameters<R: Rng>(rng: &mut R, n: usize, kind: WordKind, range: RationalRange) -> TpParameters<Rational> {
    let word = WhitneyWord::new(n, kind).expect("n >= 2");
    let len = word.len();
    let a = positive_vec(rng, len, range);
    let t = positive_vec(rng, n, range);
    let b = positive_vec(rng, len, range);
    TpParameters::new(word, a, t, b).expect("positive parameters")
}

/// Random totally positive matrix, synthesized from strict parameters.
pub fn tp_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    if n == 1 {
        return Matrix::diagonal(&[positive_rational(rng, RationalRange::default())]);
    }
    tp_parameters(rng, n, WordKind::Standard, RationalRange::default()).synthesize()
}

/// Nonnegative parameters where each `a`, `b` entry is zero with
/// probability `zero_probability`.
pub fn tn_parameters<R: Rng>(rng: &mut R, n: usize, zero_probability: f64) -> TpParameters<Rational, NonNegative> {
    let word = WhitneyWord::standard(n).expect("n >= 2");
    let len = word.len();
    let range = RationalRange::default();
    let mixed = |rng: &mut R| -> Vec<Rational> {
        (0..len)
            .map(|_| {
                if rng.random_bool(zero_probability) {
                    rat(0, 1)
                } else {
                    positive_rational(rng, range)
                }
            })
            .collect()
    };
    let a = mixed(rng);
    let b = mixed(rng);
    let t = positive_vec(rng, n, range);
    TpParameters::new(word, a, t, b).expect("nonnegative parameters")
}

pub fn tn_matrix<R: Rng>(rng: &mut R, n: usize, zero_probability: f64) -> Matrix<Rational> {
    tn_parameters(rng, n, zero_probability).synthesize()
}

pub fn integer_vector<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.random_range(-bound..=bound), 1)).collect()
}

/// Strict parameters for the lower unipotent part against the standard word.
pub fn lower_uni<R: Rng>(rng: &mut R, n: usize) -> UniParams<Rational, Strict> {
    let word = WhitneyWord::standard(n).expect("n >= 2");
    let c = positive_vec(rng, word.len(), RationalRange::default());
    UniParams::new(word, c, Side::Lower).expect("positive parameters")
}

/// Totally positive form, pulled back from a random totally positive matrix.
pub fn tp_form<R: Rng>(rng: &mut R, n: usize) -> BilinearForm<Rational> {
    A_to_form(&tp_matrix(rng, n)).expect("square")
}

/// Random invertible rational matrix with small integer entries.
pub fn invertible_matrix<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| rat(rng.random_range(-4..=4), 1));
        if m.rank() == n {
            return m;
        }
    }
}

/// Random invertible upper triangular rational matrix.
pub fn upper_triangular<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    Matrix::from_fn(n, n, |r, c| match c.cmp(&r) {
        std::cmp::Ordering::Less => rat(0, 1),
        std::cmp::Ordering::Equal => {
            let v = rng.random_range(1..=4);
            rat(if rng.random_bool(0.5) { v } else { -v }, 1)
        }
        std::cmp::Ordering::Greater => rat(rng.random_range(-4..=4), rng.random_range(1..=3)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tp::{is_totally_nonnegative, is_totally_positive};

    #[test]
    fn seeded_generators_are_deterministic() {
        let a = tp_matrix(&mut rng(7), 4);
        let b = tp_matrix(&mut rng(7), 4);
        assert_eq!(a, b);
        assert!(is_totally_positive(&a));
    }

    #[test]
    fn tn_samples_are_tn() {
        let mut r = rng(3);
        for _ in 0..10 {
            assert!(is_totally_nonnegative(&tn_matrix(&mut r, 4, 0.5)));
        }
    }
}
