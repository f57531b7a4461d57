//! Linear stability of the self-similar profile: the coefficient
//! recurrence and its quasi-solution bounds, the exact `δ₇` certificate,
//! Frobenius data at the singular points, and a shooting determinant whose
//! zeros are the eigenvalues.

pub mod delta7;
pub mod frobenius;
pub mod recurrence;
pub mod search;
pub mod shooting;

use num_complex::Complex64;
use serde::Serialize;

pub use delta7::{certify_delta7, delta7_float};
pub use recurrence::{
    classify_limit, recurrence, sample_half_plane, verify_bounds, Arithmetic, LimitClass,
    SpectralSequence,
};
pub use search::{
    eigenfunction, eigenvalue_search, winding_on_circle, Eigenvalue, Region, SearchOptions,
    SearchReport,
};
pub use shooting::{determinant, Operator};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

/// Regular singular points with a known indicial equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularPoint {
    /// Eigenvalue equation at `ρ = 0`.
    EigenAtZero,
    /// Eigenvalue equation at the light cone `ρ = 1`.
    EigenAtOne,
    /// Heun form in `x = ρ²` at `x = 0`.
    HeunAtZero,
    SusyAtZero,
    SusyAtOne,
}

/// Frobenius indices, larger real part first, except that the pair at
/// `ρ = 1` is returned as `(0, 4 − λ)`.
pub fn frobenius_indices(
    point: SingularPoint,
    lambda: Complex64,
) -> Result<(Complex64, Complex64), SpectralError> {
    use shooting::{eigen_ode, heun_ode, susy_ode};
    let form = match point {
        SingularPoint::EigenAtZero => eigen_ode(lambda).euler_at_zero()?,
        SingularPoint::EigenAtOne => eigen_ode(lambda).euler_at_one()?,
        SingularPoint::HeunAtZero => heun_ode(lambda).euler_at_zero()?,
        SingularPoint::SusyAtZero => susy_ode(lambda).euler_at_zero()?,
        SingularPoint::SusyAtOne => susy_ode(lambda).euler_at_one()?,
    };
    Ok(match point {
        SingularPoint::EigenAtOne | SingularPoint::SusyAtOne => (
            Complex64::new(0.0, 0.0),
            1.0 - form.b.coeff(0) / form.a.coeff(0),
        ),
        _ => form.indices(),
    })
}
