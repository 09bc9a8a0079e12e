use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// One eigen-velocity of the group-velocity matrix vanishes (double-Λ limit).
    #[error("degenerate group velocity at rho = {rho}: v_min = {v_min:e}")]
    DegenerateVelocity { rho: f64, v_min: f64 },

    #[error("Rabi matrix is singular at rho = {rho}: |det| = {det_abs:e}")]
    SingularRabi { rho: f64, det_abs: f64 },

    #[error("exact elimination is ill-conditioned (condition number {condition:e})")]
    SingularElimination { condition: f64 },

    #[error("no detuning solves the swap condition: {0}")]
    NoSolution(String),

    #[error("two-photon detuning {0:?} is only supported by the exact oracle")]
    UnsupportedDetuning([f64; 2]),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
