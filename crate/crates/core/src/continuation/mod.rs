//! Spectral Galerkin discretisation of the reduced equation and
//! continuation of its nontrivial branches.

pub mod branch;
pub mod export;
pub mod fold;
pub mod galerkin;
pub mod problem;
pub mod slope;
pub mod topology;

pub use branch::{
    bifurcation_points, branch_switch, branch_switch_with, continue_branch, lambda_k,
    lambda_prime_zero, refine_point, Branch, BranchOrigin, BranchPoint, ContinuationSettings,
    Termination,
};
pub use export::{branch_csv, branch_json, write_branch_csv, BranchDocument};
pub use fold::{detect_fold, find_degenerate, is_degenerate, trace_to_fold, FoldRecord};
pub use galerkin::{
    boundary_residual, jacobian, quadrature_convergence, residual, singular_values,
};
pub use problem::{default_quadrature, ProblemSpec, SpectralFunction, DEFAULT_MODES};
pub use slope::{estimate_lambda_prime, fit_quadratic, QuadraticFit, SlopeEstimate};
pub use topology::{
    count_critical_points, count_crossings, critical_points, crossing_points, endpoint_extrema,
    CriticalPoint, Extremum,
};
