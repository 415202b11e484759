use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("failed to parse config: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    /// A quadratic-transform log argument left the positive half-line.
    #[error("non-positive log argument {value:e} at subcarrier {subcarrier}, user {user}")]
    Domain {
        subcarrier: usize,
        user: usize,
        value: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("radar SINR floor unreachable: best achievable SINR is {max_sinr_db:.3} dB")]
    Infeasible { max_sinr: f64, max_sinr_db: f64 },

    #[error("starting point violates the power constraints (max relative violation {violation:e})")]
    InfeasibleStart { violation: f64 },

    #[error("projection did not converge after {sweeps} sweeps (residual {residual:e})")]
    ProjectionDiverged { sweeps: usize, residual: f64 },

    #[error("oracle search space of {evaluations:e} evaluations exceeds budget {budget:e}")]
    BudgetExceeded { evaluations: f64, budget: f64 },

    #[error("oracle grid contains no point meeting the radar SINR floor")]
    OracleInfeasible,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn infeasible(max_sinr: f64) -> Self {
        Error::Infeasible {
            max_sinr,
            max_sinr_db: crate::scenario::linear_to_db(max_sinr),
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::OracleInfeasible)
    }
}
