use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("periodic grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear step not solvable at order {order}: {reason}")]
    NotSolvable { order: usize, reason: String },
    #[error("symbolic self-check failed at order {order}: {what}")]
    ResidualNonzero { order: usize, what: String },
    #[error("root finder failed to converge in [{lo}, {hi}]")]
    RootNotConverged { lo: f64, hi: f64 },
    #[error("point is not an equilibrium (residual {0:e})")]
    NotEquilibrium(f64),
    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
