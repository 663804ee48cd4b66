use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("overflow evaluating {0}")]
    Overflow(String),

    #[error("inadmissible parameters: {0}")]
    Admissibility(String),

    #[error("s = {s} outside the Mellin strip ({lo}, {hi}) of {subtree}")]
    StripViolation { subtree: String, s: f64, lo: f64, hi: f64 },

    #[error("empty Mellin strip: {0}")]
    EmptyStrip(String),

    #[error("size-bias order {t} infeasible for {subtree}")]
    InfeasibleOrder { subtree: String, t: f64 },

    #[error("inverse-CDF tabulation did not reach accuracy {target:e} (achieved {achieved:e} with {nodes} nodes)")]
    Tabulation { target: f64, achieved: f64, nodes: usize },

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("monotone inversion failed inside bracket [{lo}, {hi}]")]
    Bisection { lo: f64, hi: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o: {message}")]
    Io { kind: std::io::ErrorKind, message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
