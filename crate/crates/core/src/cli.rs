//! The `ri` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error,
//! 3 counterexample found, 4 internal check failure.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num::FromPrimitive;
use serde_json::{json, Value};

use crate::engine::{
    refined_inertia_exact, refined_inertia_numeric, char_poly, MatrixInput, NumericTolerance, QMatrix,
    RefinedInertia,
};
use crate::hn::{
    falsify_requires_with, hn_set, run_lemma_suite, witness_suite, FalsifyOptions, LemmaSuiteReport,
    Verdict,
};
use crate::json::to_canonical_string;
use crate::pattern::{family_pattern, Family, SignPattern};
use crate::realization::RealizationConfig;
use crate::{Error, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "ri", version, about = "Refined inertia of matrices and sign patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the sign pattern A_i of order n.
    Family {
        #[arg(short = 'i', value_parser = clap::value_parser!(u8).range(1..=3))]
        index: u8,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Refined inertia of a matrix read from a JSON file.
    Inertia {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, conflicts_with = "numeric")]
        exact: bool,
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = NumericTolerance::DEFAULT_EPS)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Certified witnesses for every member of H_n.
    Witness {
        #[arg(short = 'i', value_parser = clap::value_parser!(u8).range(1..=3))]
        index: u8,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a pattern class and look for refined inertias outside H_n.
    Falsify {
        /// Pattern in text form (one row per line) or JSON.
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        budget: u64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = NumericTolerance::DEFAULT_EPS)]
        tol: f64,
        /// Report the counterexample as sampled.
        #[arg(long)]
        no_minimize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the histogram as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the arrow-form identities on random members of Q(A_i).
    Lemmas {
        #[arg(short = 'i', value_parser = clap::value_parser!(u8).range(1..=3))]
        index: u8,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        samples: u64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
    /// Falsification plus witnesses for each order in a range.
    Analyze {
        #[arg(short = 'i', value_parser = clap::value_parser!(u8).range(1..=3))]
        index: u8,
        /// Inclusive range `A..B`.
        #[arg(long, value_parser = parse_range)]
        n_range: (usize, usize),
        #[arg(long)]
        budget: u64,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, env = "RI_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Json(_)
            | Error::EmptyInput
            | Error::NotSquare { .. }
            | Error::IllegalToken { .. }
            | Error::DimensionMismatch { .. } => EXIT_IO,
            Error::CheckFailed(_) | Error::EigenSolverFailed | Error::SearchExhausted { .. } | Error::ZeroPolynomial => {
                EXIT_CHECK
            }
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

fn parse_json(text: &str, path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

fn tolerance(tol: f64) -> Result<NumericTolerance, Failure> {
    Ok(NumericTolerance::new(tol)?)
}

/// Run the CLI on `argv` (program name first) and return the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Family { index, n, json } => {
            let p = family_pattern(Family::from_index(index)?, n)?;
            if json {
                write!(out, "{}", to_canonical_string(&p.to_json()))?;
            } else {
                write!(out, "{}", p.render())?;
            }
            Ok(EXIT_OK)
        }
        Command::Inertia {
            matrix,
            exact,
            numeric,
            tol,
            json,
        } => {
            let tol = tolerance(tol)?;
            let input = MatrixInput::from_json(&parse_json(&read(&matrix)?, &matrix)?)?;
            let use_exact = exact || (!numeric && matches!(input, MatrixInput::Exact(_)));
            let ri = if use_exact {
                refined_inertia_exact(&char_poly(&exact_matrix(&input)?))?
            } else {
                refined_inertia_numeric(&input.to_f64(), tol)?
            };
            if json {
                let v = json!({
                    "inertia": ri.to_json(),
                    "method": if use_exact { "exact" } else { "numeric" },
                });
                write!(out, "{}", to_canonical_string(&v))?;
            } else {
                writeln!(out, "{ri}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Witness { index, n, out: path } => {
            let suite = witness_suite(Family::from_index(index)?, n)?;
            let text = to_canonical_string(&suite.to_json());
            match path {
                Some(p) => write_file(&p, &text)?,
                None => write!(out, "{text}")?,
            }
            Ok(EXIT_OK)
        }
        Command::Falsify {
            pattern,
            budget,
            run,
            tol,
            no_minimize,
            out: path,
            csv,
        } => {
            let p = read_pattern(&pattern)?;
            let opts = FalsifyOptions {
                budget,
                realization: RealizationConfig::default().with_seed(run.seed),
                tolerance: tolerance(tol)?,
                jobs: run.jobs as usize,
                minimize: !no_minimize,
            };
            let report = falsify_requires_with(&p, &opts)?;
            let text = to_canonical_string(&report.to_json());
            match path {
                Some(f) => write_file(&f, &text)?,
                None => write!(out, "{text}")?,
            }
            if let Some(f) = csv {
                write_file(&f, &report.to_csv())?;
            }
            Ok(match report.verdict {
                Verdict::CounterexampleFound => EXIT_COUNTEREXAMPLE,
                _ => EXIT_OK,
            })
        }
        Command::Lemmas {
            index,
            n,
            samples,
            run,
            json,
        } => {
            let cfg = RealizationConfig::default().with_seed(run.seed);
            let report = run_lemma_suite(Family::from_index(index)?, n, samples, &cfg, run.jobs as usize)?;
            if json {
                write!(out, "{}", to_canonical_string(&report.to_json()))?;
            } else {
                write_lemma_table(&report, out)?;
            }
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_CHECK })
        }
        Command::Analyze {
            index,
            n_range: (lo, hi),
            budget,
            run,
            json,
        } => analyze(Family::from_index(index)?, lo, hi, budget, &run, json, out),
    }
}

/// An exact copy of the input; floats are dyadic rationals and convert exactly.
fn exact_matrix(input: &MatrixInput) -> Result<QMatrix, Failure> {
    match input {
        MatrixInput::Exact(q) => Ok(q.clone()),
        MatrixInput::Real(m) => {
            let n = m.nrows();
            let mut q = QMatrix::zeros(n);
            for r in 0..n {
                for c in 0..n {
                    let x = Rational::from_f64(m[(r, c)]).ok_or_else(|| Failure {
                        code: EXIT_IO,
                        message: format!("entry ({}, {}) is not finite", r + 1, c + 1),
                    })?;
                    q.set(r, c, x);
                }
            }
            Ok(q)
        }
    }
}

fn read_pattern(path: &Path) -> Result<SignPattern, Failure> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        Ok(SignPattern::from_json(&parse_json(&text, path)?)?)
    } else {
        Ok(SignPattern::parse(&text)?)
    }
}

fn write_lemma_table(report: &LemmaSuiteReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        out,
        "family A{}, n = {}, {} samples, seed {}",
        report.family.index(),
        report.n,
        report.samples,
        report.seed
    )?;
    for (id, (pass, fail, skipped)) in &report.tally {
        writeln!(out, "{:<8} pass {pass:>6}  fail {fail:>4}  skipped {skipped:>4}", id.label())?;
    }
    for (k, id, detail) in &report.failures {
        writeln!(out, "sample {k}: {id} failed: {detail}")?;
    }
    writeln!(out, "{}", if report.all_passed() { "all checks passed" } else { "CHECK FAILURES" })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze(
    family: Family,
    lo: usize,
    hi: usize,
    budget: u64,
    run: &RunArgs,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut rows = Vec::new();
    let mut code = EXIT_OK;
    if !json {
        writeln!(out, "family A{}, budget {budget}, seed {}", family.index(), run.seed)?;
    }
    for n in lo..=hi {
        let p = family_pattern(family, n)?;
        let hn = hn_set(n)?;
        let mut opts = FalsifyOptions::new(budget, RealizationConfig::default().with_seed(run.seed));
        opts.jobs = run.jobs as usize;
        let report = falsify_requires_with(&p, &opts)?;
        let suite = witness_suite(family, n)?;

        let inside = report.histogram.keys().all(|ri| hn.contains(ri));
        let observed: BTreeSet<RefinedInertia> =
            report.histogram.keys().chain(suite.witnesses.keys()).copied().collect();
        let all_observed = hn.members().iter().all(|m| observed.contains(m));
        if report.verdict == Verdict::CounterexampleFound {
            code = EXIT_COUNTEREXAMPLE;
        }
        if json {
            rows.push(json!({
                "n": n,
                "report": report.to_json(),
                "witnesses": suite.to_json(),
                "inside_hn": inside,
                "all_observed": all_observed,
            }));
        } else {
            let hist: Vec<String> = report.histogram.iter().map(|(ri, c)| format!("{ri}×{c}")).collect();
            writeln!(
                out,
                "n = {n:>2} | {} | exact checks {:>5} | ⊆ H_n: {}, all 3 observed: {}",
                hist.join(" "),
                report.exact_checks,
                yes_no(inside),
                yes_no(all_observed)
            )?;
        }
    }
    if json {
        let v = json!({
            "family": family.index(),
            "budget": budget,
            "seed": run.seed,
            "orders": rows,
        });
        write!(out, "{}", to_canonical_string(&v))?;
    }
    Ok(code)
}
