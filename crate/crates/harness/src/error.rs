use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] frame_gridding::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("regression: {0}")]
    Regression(String),
}

impl HarnessError {
    /// 2 for anything the caller can fix by changing inputs, 3 when a solver
    /// or quadrature gave up, 1 for regression mismatches.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(e) if e.is_numerical() => 3,
            HarnessError::Regression(_) => 1,
            _ => 2,
        }
    }
}
