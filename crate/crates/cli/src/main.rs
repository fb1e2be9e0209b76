//! `totpos`: command-line front end for the totpos library.
//!
//! Exit status is 0 on success, 1 when a well-formed input fails a
//! mathematical precondition or a verification, and 2 on malformed input
//! or usage errors.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use totpos::{Error, Tolerance};

use crate::input::Source;

#[derive(Parser)]
#[command(name = "totpos", version, about = "Total positivity for GL(n)")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Scalar backend for matrix inputs.
    #[arg(long, value_enum, default_value_t = Backend::Exact, global = true)]
    backend: Backend,
    /// Absolute and relative tolerance for float decisions.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for random sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit a structured JSON report.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Word {
    Standard,
    Reversed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Identity,
    Tilde,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a square matrix as TP, TN only, or neither.
    Classify {
        input: String,
        /// Largest power tried when searching for an oscillatory exponent.
        #[arg(long)]
        max_power: Option<usize>,
    },
    /// Whitney factorization of a TP matrix.
    Factor {
        input: String,
        #[arg(long, value_enum, default_value_t = Word::Standard)]
        word: Word,
    },
    /// Build the matrix of a parameter set.
    Synth {
        /// JSON parameter file; alternatively give --a, --t and --b.
        input: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, value_enum, default_value_t = Word::Standard)]
        word: Word,
    },
    /// Verify the spectral properties of a TP matrix.
    Spectrum { input: String },
    /// Canonical basis of a TP bilinear form given by its Gram matrix.
    CanonicalForm { input: String },
    /// Test a flag for membership in the positive parts.
    FlagPos { input: String },
    /// Test two flags for opposition.
    Opposed { first: String, second: String },
    /// Stable flag pair of a TP element.
    StableFlags {
        input: String,
        #[arg(long, value_enum, default_value_t = Mode::Identity)]
        mode: Mode,
    },
    /// Test four flags for positivity.
    Quadruple {
        #[arg(num_args = 4, required = true)]
        flags: Vec<String>,
        /// Circle parameters of the four flags; the numbering then follows
        /// their crossing-chords partition.
        #[arg(long, num_args = 4, allow_hyphen_values = true)]
        points: Option<Vec<String>>,
    },
    /// Sampled positivity of a flag curve.
    CurveCheck {
        /// Curve table file; omit to use the osculating curve of --moment.
        #[arg(long, conflicts_with = "moment")]
        table: Option<String>,
        #[arg(long)]
        moment: Option<usize>,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Test this many random quadruples instead of all of them.
        #[arg(long)]
        quadruples: Option<usize>,
    },
    /// Hyperplane intersection counts for the moment curve.
    ConvexCheck {
        #[arg(long)]
        moment: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Count a single hyperplane instead of sampling.
        #[arg(long, allow_hyphen_values = true)]
        hyperplane: Option<String>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Domain(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

/// Settings shared by every subcommand.
pub struct RunConfig {
    pub backend: Backend,
    pub tol: Tolerance,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Input("random sampling needs --seed".into()))
    }

    pub fn require_exact(&self, what: &str) -> Result<(), CliError> {
        match self.backend {
            Backend::Exact => Ok(()),
            Backend::Float => Err(CliError::Input(format!("{what} runs on the exact backend only"))),
        }
    }
}

/// Human text, structured payload, and whether the verification passed.
pub struct Report {
    pub human: String,
    pub result: Value,
    pub ok: bool,
}

fn run(cli: Cli) -> Result<(String, Vec<Source>, Report), CliError> {
    let tol = match cli.global.tol {
        Some(t) => Tolerance::uniform(t).map_err(CliError::from)?,
        None => Tolerance::default(),
    };
    let cfg = RunConfig {
        backend: cli.global.backend,
        tol,
        seed: cli.global.seed,
    };
    let read = |s: &str| Source::read(s);
    let (name, sources, report) = match cli.command {
        Command::Classify { input, max_power } => {
            let src = read(&input)?;
            let r = commands::classify(&cfg, &src, max_power)?;
            ("classify", vec![src], r)
        }
        Command::Factor { input, word } => {
            let src = read(&input)?;
            let r = commands::factor(&cfg, &src, word)?;
            ("factor", vec![src], r)
        }
        Command::Synth { input, a, t, b, word } => {
            let src = match (input, a, t, b) {
                (Some(path), None, None, None) => read(&path)?,
                (None, Some(a), Some(t), Some(b)) => commands::params_source(&a, &t, &b, word)?,
                _ => return Err(CliError::Input("give either a parameter file or all of --a, --t, --b".into())),
            };
            let r = commands::synth(&cfg, &src)?;
            ("synth", vec![src], r)
        }
        Command::Spectrum { input } => {
            let src = read(&input)?;
            let r = commands::spectrum(&cfg, &src)?;
            ("spectrum", vec![src], r)
        }
        Command::CanonicalForm { input } => {
            let src = read(&input)?;
            let r = commands::canonical_form(&cfg, &src)?;
            ("canonical-form", vec![src], r)
        }
        Command::FlagPos { input } => {
            let src = read(&input)?;
            let r = commands::flag_pos(&cfg, &src)?;
            ("flag-pos", vec![src], r)
        }
        Command::Opposed { first, second } => {
            let srcs = vec![read(&first)?, read(&second)?];
            let r = commands::opposed(&cfg, &srcs)?;
            ("opposed", srcs, r)
        }
        Command::StableFlags { input, mode } => {
            let src = read(&input)?;
            let r = commands::stable_flags(&cfg, &src, mode)?;
            ("stable-flags", vec![src], r)
        }
        Command::Quadruple { flags, points } => {
            let srcs = flags.iter().map(|f| read(f)).collect::<Result<Vec<_>, _>>()?;
            let r = commands::quadruple(&cfg, &srcs, points.as_deref())?;
            ("quadruple", srcs, r)
        }
        Command::CurveCheck {
            table,
            moment,
            samples,
            quadruples,
        } => {
            let src = match (&table, moment) {
                (Some(path), None) => read(path)?,
                (None, Some(m)) => Source::from_options("--moment", format!("moment {m}")),
                _ => return Err(CliError::Input("give exactly one of --table or --moment".into())),
            };
            let r = commands::curve_check(&cfg, &src, table.is_some(), moment, samples, quadruples)?;
            ("curve-check", vec![src], r)
        }
        Command::ConvexCheck {
            moment,
            trials,
            hyperplane,
        } => {
            let src = Source::from_options(
                "--moment/--hyperplane",
                format!("moment {moment} hyperplane {}", hyperplane.as_deref().unwrap_or("-")),
            );
            let r = commands::convex_check(&cfg, moment, trials, hyperplane.as_deref())?;
            ("convex-check", vec![src], r)
        }
    };
    Ok((name.to_string(), sources, report))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json_mode = cli.global.json;
    let backend = cli.global.backend;
    match run(cli) {
        Ok((name, sources, report)) => {
            if json_mode {
                let out = json!({
                    "command": name,
                    "backend": format!("{backend:?}").to_lowercase(),
                    "inputs": sources.iter().map(Source::provenance).collect::<Vec<_>>(),
                    "ok": report.ok,
                    "result": report.result,
                });
                println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            } else {
                for s in &sources {
                    println!("input {} sha256:{}", s.label, s.sha256());
                }
                print!("{}", report.human);
                if !report.human.ends_with('\n') {
                    println!();
                }
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            if json_mode {
                println!("{}", json!({"ok": false, "error": msg}));
            }
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
