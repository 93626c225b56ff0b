use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Variants up to `Parse` are caller mistakes (bad input); the CLI maps them to
/// exit code 2. `Numerical` and `Io` are internal failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad group specification: {0}")]
    BadSpec(String),
    #[error("Coxeter matrix does not define a finite group (smallest Gram eigenvalue {0:.3e})")]
    InfiniteGroup(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("bad path: {0}")]
    BadPath(String),
    #[error("word is not reduced: {0:?}")]
    NotReduced(Vec<usize>),
    #[error("word is not a reduced decomposition of the longest element: {0:?}")]
    NotLongest(Vec<usize>),
    #[error("generator index {0} out of range")]
    BadGenerator(usize),
    #[error("path is not dominant (margin {0:.3e})")]
    NotDominant(f64),
    #[error("point is not in the string polytope: {0}")]
    NotInPolytope(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("cosine bound violated: rho = {rho} < cos(pi/{n}) = {bound}")]
    BadCosineBound { rho: f64, n: usize, bound: f64 },
    #[error("not implemented for this input: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by invalid input rather than by a bug or the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numerical(_) | Error::Io(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
