use crate::closure::{AutomatonClass, Operator};
use crate::rational::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),

    #[error("{operation} needs {expected}, got {found}")]
    WrongSemantics {
        operation: &'static str,
        expected: &'static str,
        found: String,
    },

    #[error("{class} is not closed under {op} ({citation})")]
    ClosedUnderOpViolation {
        class: AutomatonClass,
        op: Operator,
        citation: &'static str,
    },

    #[error("cut-point {eta} is not isolated: it lies in the SCC interval [{low}, {high}]")]
    NotIsolated {
        eta: Rational,
        low: Rational,
        high: Rational,
    },

    #[error(
        "isolation margin violated: finite path `{}` has discounted value {value} inside ({low}, {high})",
        path.join(" ")
    )]
    IsolationViolated {
        path: Vec<String>,
        value: Rational,
        low: Rational,
        high: Rational,
    },

    #[error("size cap exceeded: {what} ({size} > {limit})")]
    CapExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("incompatible inputs: {0}")]
    Mismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
