use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index ({i}, {j}) out of range for dimension {p}")]
    IndexOutOfRange { i: usize, j: usize, p: usize },

    #[error(
        "pre-asymptotic regime: n = {n} does not exceed 64·γ²·log(ep) = {threshold:.3}; \
         set the spectral radius U manually"
    )]
    PreAsymptotic { n: usize, threshold: f64 },

    #[error(
        "pd-soft solver did not converge in {iterations} iterations \
         (primal residual {primal:e}, dual residual {dual:e})"
    )]
    NotConverged { iterations: usize, primal: f64, dual: f64 },

    #[error("low-rank solver did not converge in {iterations} iterations")]
    LowRankNotConverged { iterations: usize, objective_trace: Vec<f64> },

    #[error("inverse generator produced a non-finite value at probe ({i}, {j})")]
    GeneratorDomain { i: usize, j: usize },

    #[error("degenerate split: n = {n} gives training size {n1} and validation size {n2}")]
    DegenerateSplit { n: usize, n1: usize, n2: usize },

    #[error("covariance model: {0}")]
    Model(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input")]
    Empty,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::PreAsymptotic { .. } => "pre_asymptotic",
            Error::NotConverged { .. } => "not_converged",
            Error::LowRankNotConverged { .. } => "lowrank_not_converged",
            Error::GeneratorDomain { .. } => "generator_domain",
            Error::DegenerateSplit { .. } => "degenerate_split",
            Error::Model(_) => "model",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Empty => "empty",
            Error::Io(_) => "io",
        }
    }

    /// Wraps an I/O error with the path it concerns.
    pub fn io_at(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
        move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }
}
