//! Theta constants on the Siegel upper half-space.

mod checks;
mod series;
mod siegel;

use thiserror::Error;

use crate::f2::F2Error;

pub use checks::{
    block_diag_split_check, random_int_symplectic, random_level2, random_siegel, transform_modulus_check,
    ModulusReport, SplitReport,
};
pub use series::{radius_for, tail_bound, theta_constant, theta_with_radius, ThetaValue, MAX_TERMS};
pub use siegel::{
    char_act_int, siegel_act, siegel_act_detailed, ActedMatrix, IntSymplectic, SiegelMatrix, MAX_CONDITION,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("expected a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("matrix has non-finite entries")]
    NotFinite,
    #[error("imaginary part is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("CZ+D is ill-conditioned (condition {0:e})")]
    IllConditioned(f64),
    #[error("eps must be a positive finite number, got {0}")]
    BadEpsilon(f64),
    #[error("truncation radius {0} exceeds the resource cap")]
    ResourceCap(f64),
    #[error("certificate {achieved:e} cannot reach requested eps {requested:e}")]
    PrecisionFloor { requested: f64, achieved: f64 },
    #[error(transparent)]
    F2(#[from] F2Error),
}
