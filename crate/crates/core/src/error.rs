use thiserror::Error;

#[derive(Debug, Error)]
pub enum QilabError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid subsystem index {index} for layout with {n_factors} factors")]
    InvalidSubsystem { index: usize, n_factors: usize },
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("operator is not Hermitian (relative drift {0:.3e})")]
    NotHermitian(f64),
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("singular operator: {0}")]
    Singular(String),
    #[error("infeasible problem: {0}")]
    Infeasible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, QilabError>;
