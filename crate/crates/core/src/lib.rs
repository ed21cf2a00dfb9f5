//! Jacobi-polynomial spectral data, linearization coefficients and traced
//! bifurcation branches of
//!
//! ```text
//! (1 - t^2) u'' + (beta - alpha - (alpha + beta + 2) t) u' - lambda (u - u^q) = 0
//! ```
//!
//! on `[-1, 1]`, the reduced form of `-Δu + λu = λu^q` for functions
//! invariant under an isoparametric foliation of the sphere.

pub mod continuation;
pub mod error;
pub mod geometry;
pub mod jacobi;
pub mod linearization;
pub mod verify;

pub use continuation::{
    bifurcation_points, boundary_residual, branch_switch, continue_branch, count_critical_points,
    count_crossings, detect_fold, find_degenerate, jacobian, lambda_prime_zero, residual, Branch,
    BranchPoint, ContinuationSettings, FoldRecord, ProblemSpec, SpectralFunction,
};
pub use error::{Error, Result};
pub use geometry::{params_from_sphere, SphereContext};
pub use jacobi::JacobiParams;
