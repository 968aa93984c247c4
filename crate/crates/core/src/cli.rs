//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage, 2 class not closed under the operation,
//! 3 unreadable or invalid automaton file, 4 violated precondition
//! (including non-isolated cut-points and refuted margins).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::automaton::WeightedAutomaton;
use crate::closure::{
    closure_table, compose, determinize_last, determinize_liminf_with, AutomatonClass, Limits, Mode, Operator,
};
use crate::cutpoint::{extract_dbw_limavg, extract_nbw_disc, limavg_isolation_check};
use crate::dot::to_dot;
use crate::error::Error;
use crate::eval::eval;
use crate::fixtures::{fixture, FIXTURES};
use crate::format;
use crate::rational::Rational;
use crate::robustness::booleanize_limavg;
use crate::suite::{run_suite, SuiteKind};
use crate::valuefn::Tag;
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CLOSED: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "quantlang",
    version,
    about = "Exact weighted automata on finite and lasso words"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exact value of a word and a run attaining it.
    Eval {
        automaton: PathBuf,
        /// Symbols separated by spaces; `u | v` denotes u·v^ω.
        #[arg(long)]
        word: String,
    },
    /// Combine two automata with max, min or sum.
    Compose {
        #[arg(long)]
        op: Operator,
        first: PathBuf,
        second: PathBuf,
        /// Treat the inputs as nondeterministic even if they are not.
        #[arg(long)]
        nondet: bool,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Build an automaton for 1 − L.
    Complement {
        automaton: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Build an automaton for c + L.
    Shift {
        automaton: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        by: Rational,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Build an automaton for c·L, c ≥ 0.
    Scale {
        automaton: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        by: Rational,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Determinize a LimInf or Last automaton.
    Determinize {
        automaton: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Reduce a LimAvg automaton with weights in [0, 1] to weights in {0, 1}.
    Booleanize {
        automaton: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Extract a Büchi automaton for the cut-point language L ≥ η.
    Cutpoint {
        automaton: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eta: Rational,
        /// Isolation margin, required for Disc automata.
        #[arg(long)]
        epsilon: Option<Rational>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Decide membership of a lasso word in a Büchi automaton.
    Member {
        automaton: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Run a seeded property suite.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a Graphviz rendering.
    Dot { automaton: PathBuf },
    /// Report totality, determinism and reachability.
    Validate { automaton: PathBuf },
    /// Print a shipped fixture, or list them.
    Fixture {
        name: Option<String>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Print the closure verdict of every class and operator.
    Table,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ClosedUnderOpViolation { .. } => EXIT_NOT_CLOSED,
            Error::Parse { .. } => EXIT_PARSE,
            _ => EXIT_PRECONDITION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    }
}

fn load(path: &Path) -> std::result::Result<WeightedAutomaton, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    format::parse(&text).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(
    aut: &WeightedAutomaton,
    output: Option<&Path>,
    note: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let text = format::serialize(aut);
    match output {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| io_failure(p, e))?;
            if !note.is_empty() {
                let _ = writeln!(out, "{note}");
            }
            let _ = writeln!(out, "wrote {} ({} states)", p.display(), aut.num_states());
        }
        None => {
            let _ = out.write_all(text.as_bytes());
            if !note.is_empty() {
                let _ = writeln!(err, "{note}");
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Eval { automaton, word } => {
            let a = load(&automaton)?;
            let w = Word::parse(&word)?;
            let r = eval(&a, &w)?;
            let _ = writeln!(out, "{}", r.value);
            let _ = writeln!(out, "witness: {}", r.witness);
        }
        Command::Compose {
            op,
            first,
            second,
            nondet,
            output,
        } => {
            if !op.is_binary() {
                return Err(Failure {
                    code: EXIT_USAGE,
                    message: "compose takes max, min or sum; use `complement`".into(),
                });
            }
            let (a, b) = (load(&first)?, load(&second)?);
            let mode = if nondet { Mode::Nondeterministic } else { Mode::Auto };
            let c = compose(op, &a, Some(&b), mode)?;
            let note = format!(
                "{}: {} ({}, cost {})",
                c.class, c.verdict.construction, c.verdict.citation, c.verdict.cost
            );
            emit(&c.automaton, output.as_deref(), &note, out, err)?;
        }
        Command::Complement { automaton, output } => {
            let a = load(&automaton)?;
            let c = compose(Operator::Complement, &a, None, Mode::Auto)?;
            let note = format!(
                "{}: {} ({}, cost {})",
                c.class, c.verdict.construction, c.verdict.citation, c.verdict.cost
            );
            emit(&c.automaton, output.as_deref(), &note, out, err)?;
        }
        Command::Shift { automaton, by, output } => {
            let a = load(&automaton)?;
            emit(&a.shift(&by)?, output.as_deref(), &format!("shift by {by}"), out, err)?;
        }
        Command::Scale { automaton, by, output } => {
            let a = load(&automaton)?;
            emit(&a.scale(&by)?, output.as_deref(), &format!("scale by {by}"), out, err)?;
        }
        Command::Determinize { automaton, output } => {
            let a = load(&automaton)?;
            let limits = Limits::default();
            let d = match a.tag() {
                Tag::LimInf => determinize_liminf_with(&a, &limits)?,
                Tag::Last => determinize_last(&a, &limits)?,
                _ => {
                    return Err(Error::WrongSemantics {
                        operation: "determinization",
                        expected: "LimInf or Last",
                        found: a.valuefn().to_string(),
                    }
                    .into())
                }
            };
            emit(&d, output.as_deref(), "breakpoint determinization", out, err)?;
        }
        Command::Booleanize { automaton, output } => {
            let a = load(&automaton)?;
            let (b, cert) = booleanize_limavg(&a)?;
            emit(
                &b,
                output.as_deref(),
                &format!("remainder construction, n_A = {}", cert.n_a),
                out,
                err,
            )?;
        }
        Command::Cutpoint {
            automaton,
            eta,
            epsilon,
            output,
        } => {
            let a = load(&automaton)?;
            let (buchi, note) = match (a.tag(), epsilon) {
                (Tag::LimAvg, None) => {
                    let iso = limavg_isolation_check(&a, &eta)?;
                    let b = extract_dbw_limavg(&a, &eta)?;
                    let margin = iso.margin.map(|m| m.to_string()).unwrap_or_default();
                    (b, format!("deterministic Büchi automaton, isolation margin {margin}"))
                }
                (Tag::Disc, Some(eps)) => {
                    let x = extract_nbw_disc(&a, &eta, &eps)?;
                    (x.buchi, format!("unfolding depth {}, tail bound {}", x.depth, x.tail))
                }
                (Tag::Disc, None) => return Err(Error::precondition("Disc cut-points need --epsilon").into()),
                (Tag::LimAvg, Some(_)) => {
                    return Err(Error::precondition("LimAvg isolation is computed; drop --epsilon").into())
                }
                _ => {
                    return Err(Error::WrongSemantics {
                        operation: "cut-point extraction",
                        expected: "deterministic LimAvg or Disc",
                        found: a.valuefn().to_string(),
                    }
                    .into())
                }
            };
            emit(buchi.automaton(), output.as_deref(), &note, out, err)?;
        }
        Command::Member { automaton, word } => {
            let a = load(&automaton)?;
            let b = crate::closure::BuchiAutomaton::new(a)?;
            let Word::Lasso(w) = Word::parse(&word)? else {
                return Err(Error::precondition("membership needs a lasso word `u | v`").into());
            };
            let _ = writeln!(out, "{}", b.accepts(&w)?);
        }
        Command::Check { suite, trials, seed } => {
            let kind: SuiteKind = suite.parse().map_err(|m| Failure {
                code: EXIT_USAGE,
                message: m,
            })?;
            let report = run_suite(kind, trials, seed);
            let _ = writeln!(out, "{report}");
            if !report.passed() {
                return Err(Failure {
                    code: EXIT_PRECONDITION,
                    message: format!("{} of {} trials failed", report.failures().count(), trials),
                });
            }
        }
        Command::Dot { automaton } => {
            let a = load(&automaton)?;
            let _ = write!(out, "{}", to_dot(&a));
        }
        Command::Validate { automaton } => {
            let text = std::fs::read_to_string(&automaton).map_err(|e| io_failure(&automaton, e))?;
            let a = format::parse_unchecked(&text)?;
            let report = a.validate();
            let _ = write!(out, "{report}");
            if !report.is_valid() {
                return Err(Failure {
                    code: EXIT_PARSE,
                    message: format!("{} is not a valid automaton", automaton.display()),
                });
            }
        }
        Command::Fixture { name, output } => match name {
            None => {
                for f in FIXTURES {
                    let _ = writeln!(out, "{:<18} {}", f.name, f.note);
                }
            }
            Some(n) => {
                let f = fixture(&n)?;
                emit(&f.automaton(), output.as_deref(), "", out, err)?;
            }
        },
        Command::Table => {
            for class in AutomatonClass::all() {
                for op in Operator::ALL {
                    let v = closure_table(class, op);
                    let mark = if v.closed { "closed" } else { "not closed" };
                    let _ = writeln!(
                        out,
                        "{class:<28} {op:<10} {mark:<10} {} ({})",
                        v.citation, v.construction
                    );
                }
            }
        }
    }
    Ok(())
}
