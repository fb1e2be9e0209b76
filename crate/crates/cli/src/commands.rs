//! One adapter per subcommand: parse, call the library, format.

use std::fmt::Write as _;

use serde_json::{json, Value};
use totpos::bilinear::{canonical_basis_with, BilinearForm};
use totpos::curves::{
    check_points, convex_curve_check, dihedral_partition, hyperplane_intersection_count, is_positive_numbered,
    is_positive_quadruple_with, CirclePoint, FlagCurve, MomentCurve, SampleMode,
};
use totpos::flag::{in_b_pos_prime_with, in_b_pos_with, opposed_with, stable_flags_with, Flag, SigmaMode};
use totpos::io::{
    flag_to_value, matrix_to_value, params_to_value, parse_circle_point, parse_curve_table, parse_flag, parse_matrix,
    parse_params, parse_vector,
};
use totpos::matrix::Matrix;
use totpos::spectra::{verify_gk_with, SpectralOptions};
use totpos::tp::{classify_with, default_oscillatory_bound, TpKind};
use totpos::whitney::{factorize_with, TpParameters, UniParams, WhitneyWord, WordKind};
use totpos::{Execution, Rational, Scalar};

use crate::input::Source;
use crate::{Backend, CliError, Mode, Report, RunConfig, Word};

type Outcome = Result<Report, CliError>;

/// Runs `$body` with `$t` bound to the scalar type of the configured backend.
macro_rules! with_backend {
    ($cfg:expr, $t:ident => $body:expr) => {
        match $cfg.backend {
            Backend::Exact => {
                type $t = Rational;
                $body
            }
            Backend::Float => {
                type $t = f64;
                $body
            }
        }
    };
}

fn word_kind(w: Word) -> WordKind {
    match w {
        Word::Standard => WordKind::Standard,
        Word::Reversed => WordKind::Reversed,
    }
}

fn spectral_options(cfg: &RunConfig) -> SpectralOptions {
    SpectralOptions {
        tol: cfg.tol,
        ..SpectralOptions::default()
    }
}

fn joined<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// `[[1,3],[2,7]]`.
fn bracketed<T: Scalar>(m: &Matrix<T>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| format!("[{}]", m.row(r).iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

fn uni_value<T: Scalar>(p: &Option<UniParams<T>>) -> Value {
    match p {
        Some(p) => json!({"member": true, "params": p.c().iter().map(ToString::to_string).collect::<Vec<_>>()}),
        None => json!({"member": false}),
    }
}

fn uni_line<T: Scalar>(label: &str, p: &Option<UniParams<T>>) -> String {
    match p {
        Some(p) => format!("{label}: yes, params {}\n", joined(p.c())),
        None => format!("{label}: no\n"),
    }
}

pub fn classify(cfg: &RunConfig, src: &Source, max_power: Option<usize>) -> Outcome {
    with_backend!(cfg, T => {
        let m: Matrix<T> = parse_matrix(&src.text)?;
        let class = classify_with(&m, max_power, &cfg.tol)?;
        let human = match (class.kind, class.oscillatory_exponent) {
            (kind, Some(e)) => format!("{kind:?}, oscillatory m={e}\n"),
            (TpKind::TotallyNonNegativeOnly, None) => format!(
                "TotallyNonNegativeOnly, not oscillatory up to m={}\n",
                max_power.unwrap_or_else(|| default_oscillatory_bound(m.rows()))
            ),
            (kind, None) => format!("{kind:?}\n"),
        };
        Ok(Report {
            human,
            result: serde_json::to_value(class).expect("serializable"),
            ok: true,
        })
    })
}

pub fn factor(cfg: &RunConfig, src: &Source, word: Word) -> Outcome {
    with_backend!(cfg, T => {
        let m: Matrix<T> = parse_matrix(&src.text)?;
        let p = factorize_with(&m, word_kind(word), &cfg.tol)?;
        let human = format!(
            "word: {}\na: {}\nt: {}\nb: {}\n",
            joined(p.word().indices()),
            joined(p.a()),
            joined(p.t()),
            joined(p.b())
        );
        Ok(Report {
            human,
            result: params_to_value(&p),
            ok: true,
        })
    })
}

/// Parameter JSON assembled from `--a`, `--t`, `--b` lists.
pub fn params_source(a: &str, t: &str, b: &str, word: Word) -> Result<Source, CliError> {
    let list = |s: &str| -> Result<Vec<String>, CliError> {
        Ok(parse_vector::<Rational>(s)
            .map_err(CliError::from)?
            .iter()
            .map(ToString::to_string)
            .collect())
    };
    let t_list = list(t)?;
    let w = WhitneyWord::new(t_list.len(), word_kind(word)).map_err(CliError::from)?;
    let text = json!({"word": w.indices(), "a": list(a)?, "t": t_list, "b": list(b)?}).to_string();
    Ok(Source::from_options("--a/--t/--b", text))
}

pub fn synth(cfg: &RunConfig, src: &Source) -> Outcome {
    with_backend!(cfg, T => {
        let p: TpParameters<T> = parse_params(&src.text)?;
        let m = p.synthesize();
        Ok(Report {
            human: format!("{}\n", bracketed(&m)),
            result: matrix_to_value(&m),
            ok: true,
        })
    })
}

pub fn spectrum(cfg: &RunConfig, src: &Source) -> Outcome {
    with_backend!(cfg, T => {
        let m: Matrix<T> = parse_matrix(&src.text)?;
        let rep = verify_gk_with(&m, &spectral_options(cfg))?;
        let mut human = format!("eigenvalues: {}\n", joined(&rep.eigenvalues));
        let _ = writeln!(
            human,
            "positive {} real {} distinct {}\nperron identity error {:e}\ndeterminant error {:e}",
            rep.positive, rep.real, rep.distinct, rep.perron_identity_error, rep.determinant_error
        );
        for f in &rep.failures {
            let _ = writeln!(human, "failure: {f}");
        }
        let _ = writeln!(human, "{}", if rep.passed { "PASS" } else { "FAIL" });
        Ok(Report {
            human,
            ok: rep.passed,
            result: serde_json::to_value(rep).expect("serializable"),
        })
    })
}

pub fn canonical_form(cfg: &RunConfig, src: &Source) -> Outcome {
    with_backend!(cfg, T => {
        let g: Matrix<T> = parse_matrix(&src.text)?;
        let cb = canonical_basis_with(&BilinearForm::new(g)?, &spectral_options(cfg))?;
        let mut human = String::new();
        let _ = writeln!(human, "eigenvalues: {}", joined(&cb.eigenvalues));
        let _ = writeln!(human, "z: {}", joined(&cb.z));
        let _ = writeln!(human, "chain: {}", joined(&cb.chain));
        let _ = writeln!(human, "off-anti-diagonal: {:e}", cb.off_anti_diagonal);
        let _ = writeln!(human, "basis (columns):\n{}", cb.basis.transpose());
        Ok(Report {
            human,
            result: serde_json::to_value(cb).expect("serializable"),
            ok: true,
        })
    })
}

pub fn flag_pos(cfg: &RunConfig, src: &Source) -> Outcome {
    with_backend!(cfg, T => {
        let f: Flag<T> = parse_flag(&src.text)?;
        let pos = in_b_pos_with(&f, &cfg.tol);
        let prime = in_b_pos_prime_with(&f, &cfg.tol);
        Ok(Report {
            human: format!("{}{}", uni_line("positive", &pos), uni_line("primed positive", &prime)),
            result: json!({"positive": uni_value(&pos), "primed_positive": uni_value(&prime)}),
            ok: true,
        })
    })
}

pub fn opposed(cfg: &RunConfig, srcs: &[Source]) -> Outcome {
    with_backend!(cfg, T => {
        let f: Flag<T> = parse_flag(&srcs[0].text)?;
        let g: Flag<T> = parse_flag(&srcs[1].text)?;
        if f.n() != g.n() {
            return Err(CliError::Input(format!("flags live in dimensions {} and {}", f.n(), g.n())));
        }
        let o = opposed_with(&f, &g, &cfg.tol);
        Ok(Report {
            human: format!("{}\n", if o { "opposed" } else { "not opposed" }),
            result: json!({"opposed": o}),
            ok: true,
        })
    })
}

pub fn stable_flags(cfg: &RunConfig, src: &Source, mode: Mode) -> Outcome {
    let mode = match mode {
        Mode::Identity => SigmaMode::Identity,
        Mode::Tilde => SigmaMode::Tilde,
    };
    with_backend!(cfg, T => {
        let g: Matrix<T> = parse_matrix(&src.text)?;
        let pair = stable_flags_with(&g, mode, &spectral_options(cfg))?;
        let mut human = String::new();
        let _ = writeln!(human, "eigenvalues: {}", joined(&pair.spectrum.eigenvalues));
        let _ = writeln!(human, "B:\n{}", pair.b.to_f64().representative());
        let _ = writeln!(human, "B':\n{}", pair.b_prime.to_f64().representative());
        let _ = writeln!(human, "dilation moduli: {}", joined(&pair.dilation.moduli));
        let _ = writeln!(human, "contraction moduli: {}", joined(&pair.contraction.moduli));
        let _ = writeln!(human, "finite-order moduli: {}", joined(&pair.finite_order.moduli));
        let _ = writeln!(
            human,
            "stability defects: {:e} {:e}",
            pair.stability_defect.0, pair.stability_defect.1
        );
        let result = json!({
            "mode": pair.mode,
            "b": flag_to_value(&pair.b),
            "b_prime": flag_to_value(&pair.b_prime),
            "b_margin": pair.b_margin(),
            "b_prime_margin": pair.b_prime_margin(),
            "spectrum": pair.spectrum,
            "dilation": pair.dilation,
            "contraction": pair.contraction,
            "finite_order": pair.finite_order,
            "stability_defect": [pair.stability_defect.0, pair.stability_defect.1],
        });
        Ok(Report { human, result, ok: true })
    })
}

pub fn quadruple(cfg: &RunConfig, srcs: &[Source], points: Option<&[String]>) -> Outcome {
    with_backend!(cfg, T => {
        let flags = srcs.iter().map(|s| parse_flag::<T>(&s.text)).collect::<totpos::Result<Vec<_>>>()?;
        if flags.iter().any(|f| f.n() != flags[0].n()) {
            return Err(CliError::Input("flags live in different dimensions".into()));
        }
        let refs = [&flags[0], &flags[1], &flags[2], &flags[3]];
        let (positive, partition) = match points {
            Some(pts) => {
                let pts = pts.iter().map(|p| parse_circle_point(p)).collect::<totpos::Result<Vec<CirclePoint>>>()?;
                let q = dihedral_partition([pts[0].clone(), pts[1].clone(), pts[2].clone(), pts[3].clone()])?;
                let positive = is_positive_quadruple_with(refs, &q, &cfg.tol)?;
                (positive, Some(q))
            }
            None => (is_positive_numbered(refs, &cfg.tol)?, None),
        };
        let mut human = format!("{}\n", if positive { "positive" } else { "not positive" });
        if let Some(q) = &partition {
            let [[a, b], [c, d]] = q.partition();
            let _ = writeln!(human, "partition: {{{a}, {b}}} {{{c}, {d}}}");
        }
        Ok(Report {
            human,
            result: json!({"positive": positive, "partition": partition}),
            ok: true,
        })
    })
}

pub fn curve_check(
    cfg: &RunConfig,
    src: &Source,
    from_table: bool,
    moment: Option<usize>,
    samples: usize,
    quadruples: Option<usize>,
) -> Outcome {
    cfg.require_exact("curve-check")?;
    let mode = match quadruples {
        Some(q) => SampleMode::Random {
            quadruples: q,
            seed: cfg.require_seed()?,
        },
        None => SampleMode::Exhaustive,
    };
    let (curve, points) = if from_table {
        let curve = parse_curve_table(&src.text)?;
        let FlagCurve::Table(rows) = &curve else {
            unreachable!("tables parse to tables")
        };
        let pts: Vec<CirclePoint> = rows.iter().map(|(t, _)| t.clone()).collect();
        (curve, pts)
    } else {
        let mc = MomentCurve::new(moment.expect("moment given"))?;
        let curve = FlagCurve::Osculating(mc);
        let pts = curve.sample_points(samples);
        (curve, pts)
    };
    let rep = check_points(&curve, &points, mode, Execution::default())?;
    let mut human = format!("tested {} quadruples on {} samples: {} passed, {} failed\n", rep.tested, rep.samples, rep.passed, rep.failed);
    if let Some(c) = &rep.first_counterexample {
        let _ = writeln!(human, "counterexample at {}: {}", joined(&c.points), c.reason);
    }
    Ok(Report {
        human,
        ok: rep.all_passed(),
        result: serde_json::to_value(rep).expect("serializable"),
    })
}

pub fn convex_check(cfg: &RunConfig, moment: usize, trials: usize, hyperplane: Option<&str>) -> Outcome {
    cfg.require_exact("convex-check")?;
    let mc = MomentCurve::new(moment)?;
    if let Some(h) = hyperplane {
        let coeffs: Vec<Rational> = parse_vector(h)?;
        if coeffs.len() != moment + 1 {
            return Err(CliError::Input(format!("a hyperplane needs {} coefficients", moment + 1)));
        }
        let count = hyperplane_intersection_count(&mc, &coeffs)?;
        return Ok(Report {
            human: format!("intersections: {count}\n"),
            result: json!({"degree": moment, "count": count}),
            ok: count <= moment,
        });
    }
    let rep = convex_curve_check(&mc, trials, cfg.require_seed()?, Execution::default())?;
    Ok(Report {
        human: format!(
            "{} hyperplanes, max intersections {} (bound {}), violations {}\n",
            rep.trials, rep.max_count, rep.degree, rep.violations
        ),
        ok: rep.passed(),
        result: serde_json::to_value(rep).expect("serializable"),
    })
}
