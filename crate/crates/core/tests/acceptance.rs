//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use totpos::bilinear::{canonical_basis, is_totally_positive_form, is_totally_positive_form_direct, tilde, BilinearForm};
use totpos::curves::{
    check_points, convex_curve_check, is_positive_curve_sampled, is_positive_numbered, opposed_frame,
    CirclePoint, FlagCurve, MomentCurve, SampleMode,
};
use totpos::flag::{identity_component_check, opposed, positive_eigenflag_orderings, stable_flags, Flag, SigmaMode};
use totpos::matrix::Matrix;
use totpos::par::Execution;
use totpos::sample::{self, RationalRange};
use totpos::scalar::{rat, Rational, Tolerance};
use totpos::spectra::verify_gk;
use totpos::tp::{is_totally_positive, sign_variation};
use totpos::whitney::{factorize, gen_x, WordKind};

type Q = Matrix<Rational>;
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    samples: usize,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            samples: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn whitney_round_trip() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(101);
    for n in 2..=5 {
        for _ in 0..200 {
            let p = sample::tp_parameters(&mut r, n, WordKind::Standard, RationalRange::default());
            let m = p.synthesize();
            let tp = is_totally_positive(&m);
            let back = factorize(&m);
            out.check(tp && back.as_ref() == Ok(&p), || format!("n={n}: round trip failed for {m:?}"));
        }
    }
    out
}

fn schoenberg() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(202);
    for s in 0..200 {
        let n = 2 + s % 4;
        let m = sample::tn_matrix(&mut r, n, 0.4);
        for _ in 0..50 {
            let v = sample::integer_vector(&mut r, n, 5);
            let mv = m.mul_vec(&v).expect("square");
            let (a, b) = (sign_variation(&mv), sign_variation(&v));
            out.check(a <= b, || format!("var(Mv) = {} > var(v) = {} for {m:?}, v = {v:?}", a.0, b.0));
        }
    }
    out
}

fn gantmacher_krein() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(303);
    for n in 2..=6 {
        for _ in 0..100 {
            let m = sample::tp_matrix(&mut r, n);
            match verify_gk(&m) {
                Ok(rep) => out.check(
                    rep.passed && rep.perron_identity_error <= 1e-7 && rep.determinant_error <= 1e-9,
                    || format!("n={n}: {:?}", rep.failures),
                ),
                Err(e) => out.check(false, || format!("n={n}: {e}")),
            }
        }
    }
    out
}

fn canonical_form() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(404);
    for n in 2..=5 {
        for _ in 0..100 {
            let f = sample::tp_form(&mut r, n);
            let cb = match canonical_basis(&f) {
                Ok(cb) => cb,
                Err(e) => {
                    out.check(false, || format!("n={n}: {e}"));
                    continue;
                }
            };
            let increasing = cb.chain.windows(2).all(|w| w[0] < w[1]);
            let symmetric = (0..n).all(|i| (cb.chain[i] * cb.chain[n - 1 - i] - 1.0).abs() <= 1e-9);
            let linked = (0..n).all(|i| {
                let want = 1.0 / cb.eigenvalues[i];
                (cb.chain[i] - want).abs() <= 1e-8 * want
            });
            out.check(
                cb.off_anti_diagonal <= 1e-9 && increasing && symmetric && linked,
                || format!("n={n}: off={:e} chain={:?} c={:?}", cb.off_anti_diagonal, cb.chain, cb.eigenvalues),
            );
        }
    }
    out
}

fn tilde_involution() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(505);
    for s in 0..100 {
        let n = 2 + s % 4;
        let m = sample::tp_matrix(&mut r, n);
        let t = tilde(&m).expect("invertible");
        let tt = tilde(&t).expect("invertible");
        out.check(is_totally_positive(&t) && tt == m, || format!("tilde failed on {m:?}"));
    }
    for n in 2..=5 {
        for i in 1..n {
            let a = sample::positive_rational(&mut r, RationalRange::default());
            let got = tilde(&gen_x(i, a.clone(), n).unwrap()).unwrap();
            out.check(got == gen_x(n - i, a, n).unwrap(), || format!("generator identity fails at n={n}, i={i}"));
        }
    }
    out
}

fn opposition() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(606);
    for s in 0..500 {
        let n = 2 + s % 4;
        let u = sample::lower_uni(&mut r, n).synthesize();
        let u_prime = sample::lower_uni(&mut r, n).synthesize().inverse().expect("unitriangular");
        let b = Flag::from_matrix(&u).unwrap();
        let b_prime = Flag::from_matrix(&u_prime).unwrap();
        out.check(opposed(&b, &b_prime), || format!("not opposed: {u:?} / {u_prime:?}"));
    }
    out
}

fn stable_pairs() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(707);
    for n in 2..=5 {
        for _ in 0..100 {
            let g = sample::tp_matrix(&mut r, n);
            let pair = match stable_flags(&g, SigmaMode::Identity) {
                Ok(p) => p,
                Err(e) => {
                    out.check(false, || format!("n={n}: {e}"));
                    continue;
                }
            };
            let dil = pair.dilation.moduli.iter().all(|m| *m > 1.0 + 1e-6);
            let con = pair.contraction.moduli.iter().all(|m| *m < 1.0 - 1e-6);
            let opp = opposed(&pair.b, &pair.b_prime);
            let ident = identity_component_check(&g, &pair);
            let unique = n > 4
                || positive_eigenflag_orderings(pair.eigenvectors())
                    .map(|v| v == vec![(0..n).collect::<Vec<_>>()])
                    .unwrap_or(false);
            out.check(dil && con && opp && ident && unique, || {
                format!("n={n}: dilation {dil} contraction {con} opposed {opp} identity {ident} unique {unique}")
            });
        }
    }
    out
}

fn tilde_mode() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(808);
    for s in 0..50 {
        let n = 2 + s % 3;
        let g = sample::tp_matrix(&mut r, n);
        match stable_flags(&g, SigmaMode::Tilde) {
            Ok(pair) => {
                let dil = pair.dilation.moduli.iter().all(|m| *m > 1.0);
                let con = pair.contraction.moduli.iter().all(|m| *m < 1.0);
                let fin = pair.finite_order.moduli.iter().all(|m| (m - 1.0).abs() <= 1e-6)
                    && pair.finite_order.order_defect <= 1e-6;
                out.check(dil && con && fin, || {
                    format!("n={n}: moduli {:?} / {:?} / {:?}, order defect {:e}", pair.dilation.moduli, pair.contraction.moduli, pair.finite_order.moduli, pair.finite_order.order_defect)
                });
            }
            Err(e) => out.check(false, || format!("n={n}: {e}")),
        }
    }
    out
}

/// The flag `h⁻¹ D h F` with `D = diag(1, -1, 1, …)`, which moves `F` to the
/// other side of the frame `h`.
fn sign_flipped(h: &Q, f: &Flag<Rational>) -> Flag<Rational> {
    let n = h.rows();
    let d = Q::diagonal(&(0..n).map(|i| rat(if i % 2 == 0 { 1 } else { -1 }, 1)).collect::<Vec<_>>());
    let g = h.inverse().unwrap().matmul(&d).unwrap().matmul(h).unwrap();
    f.transform(&g).unwrap()
}

fn positive_curves() -> Outcome {
    let mut out = Outcome::new();
    let tol = Tolerance::default();
    let mut r = sample::rng(909);
    for m in [2, 3] {
        let mc = MomentCurve::new(m).unwrap();
        let fc = FlagCurve::Osculating(mc);
        let rep = is_positive_curve_sampled(&fc, 8, SampleMode::Exhaustive, Execution::default()).unwrap();
        out.check(rep.tested == 70 && rep.passed == 70, || format!("m={m}: {rep:?}"));

        let pts = fc.sample_points(8);
        let flags: Vec<Flag<Rational>> = pts.iter().map(|p| fc.flag_at(p).unwrap()).collect();
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| pts[a].cyclic_cmp(&pts[b]));
        for k in 0..20 {
            let mut idx = rand::seq::index::sample(&mut r, 8, 4).into_vec();
            idx.sort_by_key(|i| order.iter().position(|o| o == i).unwrap());
            let [a, b, c, d] = [idx[0], idx[1], idx[2], idx[3]].map(|i| &flags[i]);
            let rejected = if k % 2 == 0 {
                // adjacent points paired instead of crossing chords
                !is_positive_numbered([a, c, b, d], &tol).unwrap()
            } else {
                let h = opposed_frame(a, c, &tol).unwrap();
                let flipped = sign_flipped(&h, b);
                !is_positive_numbered([a, &flipped, c, d], &tol).unwrap()
            };
            out.check(rejected, || format!("m={m}: corrupted quadruple {idx:?} accepted (kind {})", k % 2));
        }

        let conv = convex_curve_check(&mc, 1000, 1000 + m as u64, Execution::default()).unwrap();
        out.check(conv.max_count <= m && conv.passed(), || format!("m={m}: {conv:?}"));
    }
    let fc = FlagCurve::Osculating(MomentCurve::new(2).unwrap());
    let pts: Vec<CirclePoint> = (0..6).map(|_| CirclePoint::finite(r.random_range(-50..50), r.random_range(1..7))).collect();
    let mut distinct: Vec<CirclePoint> = Vec::new();
    for p in pts {
        if !distinct.iter().any(|q| q.same_point(&p)) {
            distinct.push(p);
        }
    }
    if distinct.len() >= 4 {
        let rep = check_points(&fc, &distinct, SampleMode::Exhaustive, Execution::default()).unwrap();
        out.check(rep.all_passed(), || format!("random parameters: {rep:?}"));
    }
    out
}

fn form_oracle() -> Outcome {
    let mut out = Outcome::new();
    let mut r = sample::rng(1010);
    for s in 0..100 {
        let n = 1 + s % 4;
        let f = if s % 2 == 0 && n >= 2 {
            sample::tp_form(&mut r, n)
        } else {
            BilinearForm::new(Q::from_fn(n, n, |_, _| rat(r.random_range(-3..=3), 1))).unwrap()
        };
        let a = is_totally_positive_form(&f);
        let b = is_totally_positive_form_direct(&f, Execution::default());
        out.check(a == b, || format!("oracles disagree on {:?}", f.gram()));
    }
    out
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 Whitney round-trip", whitney_round_trip),
        ("2 Schoenberg variation diminishing", schoenberg),
        ("3 Gantmacher-Krein spectra", gantmacher_krein),
        ("4 canonical basis of TP forms", canonical_form),
        ("5 tilde involution", tilde_involution),
        ("6 opposition of positive flags", opposition),
        ("7 stable flags, identity mode", stable_pairs),
        ("8 stable flags, tilde mode", tilde_mode),
        ("9 positive and convex curves", positive_curves),
        ("10 form oracle agreement", form_oracle),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        if outcome.failures.is_empty() {
            println!("criterion {name}: PASS ({} checks, {secs:.1}s)", outcome.samples);
        } else {
            failed += 1;
            println!(
                "criterion {name}: FAIL ({} of {} checks failed, {secs:.1}s)",
                outcome.failures.len(),
                outcome.samples
            );
            for f in outcome.failures.iter().take(5) {
                println!("    {f}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
