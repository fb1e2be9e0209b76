//! Dihedral orders on four circle points, positive flag quadruples, the
//! osculating flags of the rational normal curve, and hyperplane sections
//! of the moment curve.
//!
//! The circle is the real projective line: a point is an exact rational
//! parameter, the point at infinity, or an angle. Finite parameters and
//! infinity run around the circle in the order `0 → +∞ = ∞ = −∞ → 0`.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use num::{Signed, Zero};
use rand::seq::index::sample;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag::{in_b_pos_with, in_b_pos_prime_with, opposed_with, Flag};
use crate::matrix::Matrix;
use crate::minors::binomial;
use crate::par::Execution;
use crate::poly::Poly;
use crate::sample::rng;
use crate::scalar::{rat, Rational, Scalar, Tolerance};

#[derive(Clone, Debug, PartialEq)]
pub enum CirclePoint {
    Finite(Rational),
    Infinity,
    /// Angle in degrees.
    Angle(f64),
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CirclePoint::Finite(t) => write!(f, "{t}"),
            CirclePoint::Infinity => write!(f, "inf"),
            CirclePoint::Angle(a) => write!(f, "{a}deg"),
        }
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl CirclePoint {
    pub fn finite(p: i64, q: i64) -> Self {
        CirclePoint::Finite(rat(p, q))
    }

    /// Position on the circle in degrees, in `[0, 360)`.
    pub fn degrees(&self) -> f64 {
        match self {
            CirclePoint::Finite(t) => (2.0 * t.to_f64().atan()).to_degrees().rem_euclid(360.0),
            CirclePoint::Infinity => 180.0,
            CirclePoint::Angle(a) => a.rem_euclid(360.0),
        }
    }

    fn exact_key(&self) -> Option<(u8, &Rational)> {
        match self {
            CirclePoint::Finite(t) if !t.is_negative() => Some((0, t)),
            CirclePoint::Infinity => None,
            CirclePoint::Finite(t) => Some((2, t)),
            CirclePoint::Angle(_) => None,
        }
    }

    /// Counterclockwise order starting from parameter `0` (angle `0`).
    pub fn cyclic_cmp(&self, other: &CirclePoint) -> Ordering {
        use CirclePoint::*;
        match (self, other) {
            (Angle(_), _) | (_, Angle(_)) => self.degrees().total_cmp(&other.degrees()),
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, p) => match p.exact_key() {
                Some((0, _)) => Ordering::Greater,
                _ => Ordering::Less,
            },
            (_, Infinity) => other.cyclic_cmp(self).reverse(),
            _ => {
                let (a, b) = (self.exact_key().expect("finite"), other.exact_key().expect("finite"));
                a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1))
            }
        }
    }

    pub fn same_point(&self, other: &CirclePoint) -> bool {
        self.cyclic_cmp(other) == Ordering::Equal
    }
}

/// Four circle points and the partition into the two pairs whose chords
/// cross.
#[derive(Clone, Debug, Serialize)]
pub struct DihedralQuadruple {
    pub points: [CirclePoint; 4],
    /// Input indices in cyclic order; the pairs are `{order[0], order[2]}`
    /// and `{order[1], order[3]}`.
    pub order: [usize; 4],
}

impl DihedralQuadruple {
    pub fn pairs(&self) -> [[usize; 2]; 2] {
        let o = self.order;
        [[o[0], o[2]], [o[1], o[3]]]
    }

    /// The points of each pair.
    pub fn partition(&self) -> [[CirclePoint; 2]; 2] {
        self.pairs()
            .map(|pair| pair.map(|i| self.points[i].clone()))
    }
}

pub fn dihedral_partition(points: [CirclePoint; 4]) -> Result<DihedralQuadruple> {
    for (i, j) in (0..4).tuple_combinations() {
        if points[i].same_point(&points[j]) {
            return Err(Error::Input(format!(
                "points {} and {} coincide",
                points[i], points[j]
            )));
        }
    }
    let mut order = [0, 1, 2, 3];
    order.sort_by(|&a, &b| points[a].cyclic_cmp(&points[b]));
    Ok(DihedralQuadruple { points, order })
}

/// `h` with `h·F1` the standard flag and `h·F3` the opposite flag; the
/// columns of `h⁻¹` are the lines `F1_k ∩ F3_{n+1-k}`.
pub fn opposed_frame<T: Scalar>(f1: &Flag<T>, f3: &Flag<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    let n = f1.n();
    if f3.n() != n || !opposed_with(f1, f3, tol) {
        return Err(Error::Domain("the reference flags are not opposed".into()));
    }
    let mut frame = Vec::with_capacity(n);
    for k in 1..=n {
        let a = f1.subspace(k);
        let b = f3.subspace(n + 1 - k);
        let cols: Vec<Vec<T>> = (0..k)
            .map(|c| a.column(c))
            .chain((0..n + 1 - k).map(|c| b.column(c).into_iter().map(|x| -x).collect()))
            .collect();
        let null = Matrix::from_columns(&cols)?.null_space_with(tol);
        let x = null
            .first()
            .ok_or_else(|| Error::Consistency("empty intersection of opposed subspaces".into()))?;
        frame.push(a.mul_vec(&x[..k])?);
    }
    Matrix::from_columns(&frame)?.inverse_with(tol)
}

/// Positivity of flags numbered so that the dihedral order is
/// `{F1, F3}, {F2, F4}`.
pub fn is_positive_numbered<T: Scalar>(flags: [&Flag<T>; 4], tol: &Tolerance) -> Result<bool> {
    let [f1, f2, f3, f4] = flags;
    let n = f1.n();
    if [f2, f3, f4].iter().any(|f| f.n() != n) {
        return Err(Error::Shape("flags of different dimensions".into()));
    }
    let h = opposed_frame(f1, f3, tol)?;
    let r2 = h.matmul(f2.representative())?;
    let r4 = h.matmul(f4.representative())?;
    for signs in (0..n).map(|_| [T::one(), -T::one()]).multi_cartesian_product() {
        let d = Matrix::diagonal(&signs);
        let g2 = Flag::from_matrix_with(&d.matmul(&r2)?, tol)?;
        if in_b_pos_with(&g2, tol).is_none() {
            continue;
        }
        let g4 = Flag::from_matrix_with(&d.matmul(&r4)?, tol)?;
        if in_b_pos_prime_with(&g4, tol).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Positivity of the flags at the four points of `q`, in input order.
pub fn is_positive_quadruple<T: Scalar>(flags: [&Flag<T>; 4], q: &DihedralQuadruple) -> Result<bool> {
    is_positive_quadruple_with(flags, q, &Tolerance::default())
}

pub fn is_positive_quadruple_with<T: Scalar>(
    flags: [&Flag<T>; 4],
    q: &DihedralQuadruple,
    tol: &Tolerance,
) -> Result<bool> {
    let o = q.order;
    is_positive_numbered([flags[o[0]], flags[o[1]], flags[o[2]], flags[o[3]]], tol)
}

/// `t ↦ (1, t, …, t^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MomentCurve {
    m: usize,
}

impl MomentCurve {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("the moment curve needs degree m >= 1".into()));
        }
        Ok(MomentCurve { m })
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Homogeneous coordinates of the curve point.
    pub fn point(&self, t: &CirclePoint) -> Result<Vec<Rational>> {
        let m = self.m;
        match t {
            CirclePoint::Finite(t) => Ok((0..=m).map(|i| num::pow(t.clone(), i)).collect()),
            CirclePoint::Infinity => Ok((0..=m).map(|i| rat(i64::from(i == m), 1)).collect()),
            CirclePoint::Angle(_) => Err(Error::Input("the moment curve takes exact parameters".into())),
        }
    }
}

/// Flag spanned by the curve point and its successive derivatives.
pub fn osculating_flag(mc: &MomentCurve, t: &CirclePoint) -> Result<Flag<Rational>> {
    let n = mc.degree() + 1;
    match t {
        CirclePoint::Finite(t) => Flag::from_matrix(&Matrix::from_fn(n, n, |i, j| {
            if i < j {
                rat(0, 1)
            } else {
                rat(binomial(i, j) as i64, 1) * num::pow(t.clone(), i - j)
            }
        })),
        CirclePoint::Infinity => Ok(Flag::opposite(n)),
        CirclePoint::Angle(_) => Err(Error::Input("osculating flags take exact parameters".into())),
    }
}

/// A curve in the flag manifold, known at finitely many points or by rule.
#[derive(Clone, Debug)]
pub enum FlagCurve {
    Osculating(MomentCurve),
    Table(Vec<(CirclePoint, Flag<Rational>)>),
}

impl FlagCurve {
    pub fn flag_at(&self, t: &CirclePoint) -> Result<Flag<Rational>> {
        match self {
            FlagCurve::Osculating(mc) => osculating_flag(mc, t),
            FlagCurve::Table(rows) => rows
                .iter()
                .find(|(p, _)| p.same_point(t))
                .map(|(_, f)| f.clone())
                .ok_or_else(|| Error::Input(format!("no flag recorded at {t}"))),
        }
    }

    /// Default sample points: the table's points, or infinity followed by
    /// integers centred on zero.
    pub fn sample_points(&self, count: usize) -> Vec<CirclePoint> {
        match self {
            FlagCurve::Table(rows) => rows.iter().map(|(p, _)| p.clone()).take(count).collect(),
            FlagCurve::Osculating(_) => {
                let finite = count.saturating_sub(1) as i64;
                std::iter::once(CirclePoint::Infinity)
                    .chain((0..finite).map(|i| CirclePoint::finite(i - finite / 2, 1)))
                    .take(count)
                    .collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    Exhaustive,
    Random { quadruples: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    /// The four points in cyclic order.
    pub points: Vec<CirclePoint>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub samples: usize,
    pub tested: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_counterexample: Option<Counterexample>,
}

impl CurveReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn is_positive_curve_sampled(fc: &FlagCurve, samples: usize, mode: SampleMode, exec: Execution) -> Result<CurveReport> {
    if samples < 4 {
        return Err(Error::Input(format!("need at least 4 samples, got {samples}")));
    }
    let points = fc.sample_points(samples);
    if points.len() < 4 {
        return Err(Error::Input(format!("curve has only {} sample points", points.len())));
    }
    check_points(fc, &points, mode, exec)
}

/// Test the quadruples drawn from explicit sample points.
pub fn check_points(fc: &FlagCurve, points: &[CirclePoint], mode: SampleMode, exec: Execution) -> Result<CurveReport> {
    let flags: Vec<Flag<Rational>> = points.iter().map(|p| fc.flag_at(p)).collect::<Result<_>>()?;
    let quads: Vec<[usize; 4]> = match mode {
        SampleMode::Exhaustive => (0..points.len())
            .combinations(4)
            .map(|c| [c[0], c[1], c[2], c[3]])
            .collect(),
        SampleMode::Random { quadruples, seed } => {
            let mut r = rng(seed);
            (0..quadruples)
                .map(|_| {
                    let mut c = sample(&mut r, points.len(), 4).into_vec();
                    c.sort_unstable();
                    [c[0], c[1], c[2], c[3]]
                })
                .collect()
        }
    };
    let tol = Tolerance::default();
    let outcomes: Vec<Result<(bool, DihedralQuadruple)>> = exec.map(quads, |idx| {
        let q = dihedral_partition(idx.map(|i| points[i].clone()))?;
        let f = idx.map(|i| &flags[i]);
        Ok((is_positive_quadruple_with(f, &q, &tol)?, q))
    });
    let mut report = CurveReport {
        samples: points.len(),
        tested: outcomes.len(),
        passed: 0,
        failed: 0,
        first_counterexample: None,
    };
    for outcome in outcomes {
        let (ok, reason, q) = match outcome {
            Ok((ok, q)) => (ok, "no sign class places the flags positively".to_string(), Some(q)),
            Err(e) => (false, e.to_string(), None),
        };
        if ok {
            report.passed += 1;
        } else {
            report.failed += 1;
            if report.first_counterexample.is_none() {
                report.first_counterexample = Some(Counterexample {
                    points: q.map(|q| q.order.iter().map(|&i| q.points[i].clone()).collect()).unwrap_or_default(),
                    reason,
                });
            }
        }
    }
    Ok(report)
}

/// Number of distinct points of the moment curve on the hyperplane
/// `Σ H_j x_j = 0`, counting the point at infinity when `H_m = 0`.
pub fn hyperplane_intersection_count(mc: &MomentCurve, h: &[Rational]) -> Result<usize> {
    let m = mc.degree();
    if h.len() != m + 1 {
        return Err(Error::Input(format!(
            "hyperplane needs {} coefficients, got {}",
            m + 1,
            h.len()
        )));
    }
    if h.iter().all(Zero::is_zero) {
        return Err(Error::Input("zero hyperplane".into()));
    }
    let at_infinity = usize::from(h[m].is_zero());
    Ok(Poly::from(h).count_real_roots() + at_infinity)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexReport {
    pub degree: usize,
    pub trials: usize,
    pub max_count: usize,
    pub violations: usize,
    pub seed: u64,
}

impl ConvexReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Random integer hyperplanes with coefficients in `[-5, 5]`.
pub fn convex_curve_check(mc: &MomentCurve, trials: usize, seed: u64, exec: Execution) -> Result<ConvexReport> {
    use rand::Rng;
    if trials == 0 {
        return Err(Error::Input("need at least one trial".into()));
    }
    let m = mc.degree();
    let mut r = rng(seed);
    let hyperplanes: Vec<Vec<Rational>> = (0..trials)
        .map(|_| loop {
            let h: Vec<i64> = (0..=m).map(|_| r.random_range(-5..=5)).collect();
            if h.iter().any(|x| *x != 0) {
                break h.into_iter().map(|x| rat(x, 1)).collect();
            }
        })
        .collect();
    let counts: Vec<usize> = exec
        .map(hyperplanes, |h| hyperplane_intersection_count(mc, &h))
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(ConvexReport {
        degree: m,
        trials,
        max_count: counts.iter().copied().max().unwrap_or(0),
        violations: counts.iter().filter(|c| **c > m).count(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(a: f64) -> CirclePoint {
        CirclePoint::Angle(a)
    }

    fn line(a: i64, b: i64) -> Flag<Rational> {
        Flag::from_matrix(&Matrix::from_i64_rows(&[&[a, 0], &[b, 1]])).unwrap()
    }

    fn partition_degrees(q: &DihedralQuadruple) -> Vec<Vec<f64>> {
        let mut parts: Vec<Vec<f64>> = q
            .partition()
            .iter()
            .map(|p| {
                let mut v: Vec<f64> = p.iter().map(CirclePoint::degrees).collect();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect();
        parts.sort_by(|a, b| a[0].total_cmp(&b[0]));
        parts
    }

    #[test]
    fn partition_examples() {
        let q = dihedral_partition([deg(0.0), deg(90.0), deg(180.0), deg(270.0)]).unwrap();
        assert_eq!(partition_degrees(&q), vec![vec![0.0, 180.0], vec![90.0, 270.0]]);
        let q = dihedral_partition([deg(0.0), deg(10.0), deg(20.0), deg(30.0)]).unwrap();
        assert_eq!(partition_degrees(&q), vec![vec![0.0, 20.0], vec![10.0, 30.0]]);
        let q = dihedral_partition([deg(30.0), deg(0.0), deg(20.0), deg(10.0)]).unwrap();
        assert_eq!(q.pairs(), [[1, 2], [3, 0]]);
        assert!(dihedral_partition([deg(0.0), deg(360.0), deg(20.0), deg(30.0)]).is_err());
    }

    #[test]
    fn exact_cyclic_order() {
        let pts = [
            CirclePoint::finite(-1, 1),
            CirclePoint::Infinity,
            CirclePoint::finite(0, 1),
            CirclePoint::finite(5, 2),
        ];
        let q = dihedral_partition(pts).unwrap();
        assert_eq!(q.order, [2, 3, 1, 0]);
    }

    #[test]
    fn quadruple_examples() {
        let f1 = line(1, 0);
        let f3 = Flag::from_matrix(&Matrix::from_i64_rows(&[&[0, 1], &[1, 0]])).unwrap();
        let ok = is_positive_numbered([&f1, &line(1, 1), &f3, &line(1, -1)], &Tolerance::default()).unwrap();
        assert!(ok);
        let bad = is_positive_numbered([&f1, &line(1, 1), &f3, &line(1, 2)], &Tolerance::default()).unwrap();
        assert!(!bad);
        assert!(matches!(
            is_positive_numbered([&f1, &line(1, 1), &f1, &line(1, -1)], &Tolerance::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn osculating_examples() {
        let mc = MomentCurve::new(2).unwrap();
        assert_eq!(
            osculating_flag(&mc, &CirclePoint::finite(0, 1)).unwrap(),
            Flag::standard(3)
        );
        let f = osculating_flag(&mc, &CirclePoint::finite(1, 1)).unwrap();
        assert_eq!(f.representative().column(0), vec![rat(1, 1); 3]);
    }

    #[test]
    fn osculating_quadruple_is_positive() {
        for m in 1..=4 {
            let mc = MomentCurve::new(m).unwrap();
            let pts = [
                CirclePoint::finite(-2, 1),
                CirclePoint::finite(-1, 3),
                CirclePoint::finite(1, 2),
                CirclePoint::finite(3, 1),
            ];
            let flags: Vec<_> = pts.iter().map(|t| osculating_flag(&mc, t).unwrap()).collect();
            let q = dihedral_partition(pts).unwrap();
            assert!(is_positive_quadruple([&flags[0], &flags[1], &flags[2], &flags[3]], &q).unwrap());
        }
    }

    #[test]
    fn sampled_curve() {
        let fc = FlagCurve::Osculating(MomentCurve::new(2).unwrap());
        let r = is_positive_curve_sampled(&fc, 8, SampleMode::Exhaustive, Execution::default()).unwrap();
        assert_eq!((r.tested, r.passed), (70, 70));
        let r = is_positive_curve_sampled(&fc, 4, SampleMode::Exhaustive, Execution::default()).unwrap();
        assert_eq!(r.tested, 1);
        assert!(is_positive_curve_sampled(&fc, 3, SampleMode::Exhaustive, Execution::default()).is_err());
    }

    #[test]
    fn hyperplane_examples() {
        let h = |c: &[i64]| c.iter().map(|x| rat(*x, 1)).collect::<Vec<_>>();
        let m2 = MomentCurve::new(2).unwrap();
        assert_eq!(hyperplane_intersection_count(&m2, &h(&[-1, 0, 1])).unwrap(), 2);
        let m3 = MomentCurve::new(3).unwrap();
        // t = 0 and the point at infinity
        assert_eq!(hyperplane_intersection_count(&m3, &h(&[0, 1, 0, 0])).unwrap(), 2);
        assert!(hyperplane_intersection_count(&m3, &h(&[0, 0, 0, 0])).is_err());
        assert!(hyperplane_intersection_count(&m3, &h(&[1, 0])).is_err());
        let m1 = MomentCurve::new(1).unwrap();
        assert_eq!(hyperplane_intersection_count(&m1, &h(&[1, 0])).unwrap(), 1);
    }

    #[test]
    fn convex_check_is_deterministic() {
        let mc = MomentCurve::new(2).unwrap();
        let a = convex_curve_check(&mc, 200, 9, Execution::Parallel).unwrap();
        let b = convex_curve_check(&mc, 200, 9, Execution::Sequential).unwrap();
        assert_eq!((a.max_count, a.violations), (b.max_count, b.violations));
        assert!(a.passed() && a.max_count <= 2);
    }
}
