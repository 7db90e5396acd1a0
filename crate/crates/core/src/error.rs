use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} lies outside the domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("evaluation grid of {grid} points aliases {modes} modes")]
    GridTooSmall { grid: usize, modes: usize },

    #[error("singular value decomposition did not converge ({rows}x{cols})")]
    SvdNotConverged { rows: usize, cols: usize },

    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimate error {err:e})")]
    QuadratureNotConverged { tol: f64, err: f64 },

    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical kernels rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SvdNotConverged { .. } | Error::QuadratureNotConverged { .. }
        )
    }
}
