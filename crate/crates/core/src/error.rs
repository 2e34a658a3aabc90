use thiserror::Error;

pub type Result<T, E = SwdftError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SwdftError {
    #[error("window extent {0} is not a power of two")]
    InvalidWindow(usize),

    #[error("window {window:?} does not fit inside an array of shape {dims:?}")]
    WindowTooLarge {
        window: Vec<usize>,
        dims: Vec<usize>,
    },

    #[error("expected a {expected}-dimensional array, got {found} dimensions")]
    RankMismatch { expected: usize, found: usize },

    #[error("memory budget exceeded: {required} bytes required, budget is {budget} bytes")]
    BudgetExceeded { required: u64, budget: u64 },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("level {level} is outside the valid range: {reason}")]
    Level { level: u32, reason: String },

    #[error("state error: {0}")]
    State(String),

    #[error("invalid normalization: {0}")]
    Normalization(String),

    #[error("non-finite value at element {0}")]
    NonFinite(usize),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
