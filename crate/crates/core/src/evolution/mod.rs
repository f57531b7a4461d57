//! Similarity-coordinate evolution of the d = 9 perturbation system,
//! linearized or with the full nonlinearity, plus the blowup-time search.

pub mod blowup;
pub mod flow;
pub mod grid;

pub use blowup::{
    find_blowup_time, initial_data_u, random_smooth_state, BlowupTimeOptions, BlowupTimeReport,
    Bump, ModeProjector, NoPerturbation, Perturbation, RandomSmooth, ShiftedBlowup,
};
pub use flow::{fit_log_slope, Evolution, FieldState, IntegrateOptions, Mode, RunReport};
pub use grid::Grid;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvolutionError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("solution norm {norm:.3e} exceeded the abort threshold at tau = {tau}")]
    Diverged { tau: f64, norm: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
}
