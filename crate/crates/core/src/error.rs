use thiserror::Error;

/// Errors surfaced by the solver and its supporting modules.
#[derive(Debug, Error)]
pub enum MhdError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("positivity violation at cell {cell:?}, t = {time}: rho = {rho:e}, p = {pressure:e}")]
    Positivity {
        cell: [usize; 3],
        time: f64,
        rho: f64,
        pressure: f64,
    },

    #[error("non-finite value at cell {cell:?}, t = {time}")]
    NonFinite { cell: [usize; 3], time: f64 },

    #[error("static state: zero signal speed everywhere")]
    ZeroSignalSpeed,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MhdError {
    /// Stamps the simulation time on positivity and non-finite errors.
    pub fn at_time(self, t: f64) -> Self {
        match self {
            MhdError::Positivity { cell, rho, pressure, .. } => MhdError::Positivity {
                cell,
                time: t,
                rho,
                pressure,
            },
            MhdError::NonFinite { cell, .. } => MhdError::NonFinite { cell, time: t },
            e => e,
        }
    }

    /// Whether the error reports a loss of positivity or a non-finite value.
    pub fn is_breakdown(&self) -> bool {
        matches!(self, MhdError::Positivity { .. } | MhdError::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, MhdError>;
