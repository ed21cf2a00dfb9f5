//! Fold points of traced branches: states where `D_u F` has a kernel.

use nalgebra::{DMatrix, DVector};

use super::branch::{
    branch_switch_with, continue_branch, lambda_prime_zero, make_point, tangent,
    Branch, BranchPoint, ContinuationSettings,
};
use super::problem::{ProblemSpec, SpectralFunction};
use super::topology::{critical_points, endpoint_extrema, CriticalPoint, Extremum};
use crate::error::{Error, Result};

/// A located degenerate solution.
#[derive(Clone, Debug)]
pub struct FoldRecord {
    pub point: BranchPoint,
    pub lambda_star: f64,
    /// Unit kernel vector of `D_u F(u_*, lambda_*)` in the weighted norm,
    /// signed so that `v(1) > 0`.
    pub null_direction: SpectralFunction,
    pub moore_spence_residual: f64,
    pub iterations: usize,
    pub critical: Vec<CriticalPoint>,
    /// Nature of `t = -1` and `t = 1`.
    pub endpoints: (Extremum, Extremum),
    /// Index of the bracketing pair `(i, i + 1)` in the branch.
    pub bracket: usize,
}

const MS_TOL: f64 = 1e-11;
const MS_MAX_ITER: usize = 30;

/// Localises the first sign change of `dlambda/ds` on `branch` by Newton on
/// `{F = 0, J v = 0, (|v|_w^2 - 1)/2 = 0}`.
pub fn detect_fold(branch: &Branch, spec: &ProblemSpec) -> Result<FoldRecord> {
    let bracket = *branch.fold_brackets.first().ok_or(Error::NoFoldBracket)?;
    let (a, b) = (&branch.points[bracket], &branch.points[bracket + 1]);
    let theta = a.dlambda_ds / (a.dlambda_ds - b.dlambda_ds);
    let xa = a.state();
    let x0 = &xa + (b.state() - &xa) * theta;
    let n = spec.n_modes();
    let v0 = kernel_seed(spec, &x0)?;

    let (z, residual, iterations) = moore_spence(spec, x0, v0)?;
    let x = z.rows(0, n + 1).into_owned();
    let mut v: Vec<f64> = z.rows(n + 1, n).iter().copied().collect();
    let mut null = SpectralFunction::new(v.clone(), spec.params());
    if null.eval(1.0) < 0.0 {
        v.iter_mut().for_each(|c| *c = -*c);
        null = SpectralFunction::new(v, spec.params());
    }

    let f = spec.residual_vec(&x.as_slice()[..n], x[n])?;
    let s = a.s + theta * (b.s - a.s);
    let reference = DVector::from_column_slice(&a.tangent);
    let tau = tangent(spec, &x, &reference)?;
    let point = make_point(spec, &x, spec.weighted_norm(f.as_slice()), s, &tau, branch.origin)?;
    let critical = critical_points(&point.u).unwrap_or_default();
    let endpoints = endpoint_extrema(&point.u);
    Ok(FoldRecord {
        lambda_star: point.lambda,
        point,
        null_direction: null,
        moore_spence_residual: residual,
        iterations,
        critical,
        endpoints,
        bracket,
    })
}

/// Eigenvector of the symmetrised Jacobian with eigenvalue of least
/// modulus, mapped back to coefficients and normalised.
fn kernel_seed(spec: &ProblemSpec, x: &DVector<f64>) -> Result<DVector<f64>> {
    let n = spec.n_modes();
    let j = spec.jacobian_mat(&x.as_slice()[..n], x[n])?;
    let eig = spec.symmetrized(&j).symmetric_eigen();
    let idx = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|p, q| p.1.abs().total_cmp(&q.1.abs()))
        .map(|(i, _)| i)
        .expect("nonempty");
    let h = &spec.basis.norms;
    let v = DVector::from_iterator(n, (0..n).map(|i| eig.eigenvectors[(i, idx)] / h[i].sqrt()));
    let norm = spec.weighted_norm(v.as_slice());
    Ok(v / norm)
}

fn ms_residual(spec: &ProblemSpec, z: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let n = spec.n_modes();
    let c = &z.as_slice()[..n];
    let lambda = z[n];
    let v = z.rows(n + 1, n).into_owned();
    let f = spec.residual_vec(c, lambda)?;
    let jv = spec.jacobian_mat(c, lambda)? * &v;
    let e3 = 0.5 * (spec.weighted_norm(v.as_slice()).powi(2) - 1.0);
    let norm = (spec.weighted_norm(f.as_slice()).powi(2)
        + spec.weighted_norm(jv.as_slice()).powi(2)
        + e3 * e3)
        .sqrt();
    let mut r = DVector::zeros(2 * n + 1);
    r.rows_mut(0, n).copy_from(&f);
    r[n] = e3;
    r.rows_mut(n + 1, n).copy_from(&jv);
    Ok((r, norm))
}

/// Unknowns `(c, lambda, v)`; equations ordered `(F, E3, J v)`.
fn moore_spence(
    spec: &ProblemSpec,
    x0: DVector<f64>,
    v0: DVector<f64>,
) -> Result<(DVector<f64>, f64, usize)> {
    let n = spec.n_modes();
    let q = spec.q();
    let h = &spec.basis.norms;
    let mut z = DVector::zeros(2 * n + 1);
    z.rows_mut(0, n + 1).copy_from(&x0);
    z.rows_mut(n + 1, n).copy_from(&v0);

    let mut best: Option<(DVector<f64>, f64, usize)> = None;
    let mut last = f64::INFINITY;
    for it in 0..=MS_MAX_ITER {
        let (r, norm) = ms_residual(spec, &z)?;
        last = norm;
        if !norm.is_finite() {
            break;
        }
        if norm < MS_TOL {
            match best {
                Some(prev) => return Ok(if norm <= prev.1 { (z, norm, it) } else { prev }),
                None => best = Some((z.clone(), norm, it)),
            }
        } else if let Some(prev) = best {
            return Ok(prev);
        }
        if it == MS_MAX_ITER {
            break;
        }

        let c = &z.as_slice()[..n];
        let lambda = z[n];
        let v = z.rows(n + 1, n).into_owned();
        let u = spec.positive_nodal(c)?;
        let bv = &spec.basis.values * &v;
        let j = spec.jacobian_mat(c, lambda)?;
        let fl = spec.lambda_column(c)?;
        let curv = u.zip_map(&bv, |x, y| lambda * q * (q - 1.0) * x.powf(q - 2.0) * y);
        let mut k = spec.gram(&curv);
        for i in 0..n {
            k.row_mut(i).scale_mut(1.0 / h[i]);
        }
        let jv_lambda = -spec.project(&u.zip_map(&bv, |x, y| (1.0 - q * x.powf(q - 1.0)) * y));

        let dim = 2 * n + 1;
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        a.view_mut((0, 0), (n, n)).copy_from(&j);
        a.view_mut((0, n), (n, 1)).copy_from(&fl);
        for i in 0..n {
            a[(n, n + 1 + i)] = h[i] * v[i];
        }
        a.view_mut((n + 1, 0), (n, n)).copy_from(&k);
        a.view_mut((n + 1, n), (n, 1)).copy_from(&jv_lambda);
        a.view_mut((n + 1, n + 1), (n, n)).copy_from(&j);

        let step = a
            .lu()
            .solve(&(-r))
            .ok_or_else(|| Error::NumericalBreakdown("singular Moore-Spence system".into()))?;
        z += step;
    }
    match best {
        Some(prev) => Ok(prev),
        None => Err(Error::NewtonDivergence {
            iterations: MS_MAX_ITER,
            residual: last,
        }),
    }
}

/// Branch from `(1, lambda_k)` traced in the direction of decreasing
/// `lambda` until its first fold, and that fold.
pub fn trace_to_fold(
    k: usize,
    spec: &ProblemSpec,
    settings: &ContinuationSettings,
) -> Result<(Branch, FoldRecord)> {
    let params = spec.params();
    params.require_gasper_hypotheses()?;
    if params.is_symmetric() && k % 2 == 1 {
        return Err(Error::ParityViolation(k));
    }
    if let Some(threshold) = spec.sphere().and_then(|ctx| ctx.supercritical_threshold()) {
        if !threshold.admits(spec.q()) {
            return Err(Error::SupercriticalExponent {
                q: spec.q(),
                q_f: threshold.to_f64(),
            });
        }
    }
    let direction = if lambda_prime_zero(k, spec)? <= 0.0 { 1 } else { -1 };
    let mut settings = settings.clone();
    settings.stop_after_fold = true;
    let start = branch_switch_with(k, spec, 1e-3, direction, &settings)?;
    let mut branch = continue_branch(&start, spec, &settings)?;
    let fold = detect_fold(&branch, spec)?;
    branch.folds.push(fold.clone());
    Ok((branch, fold))
}

/// First fold on the branch from `(1, lambda_k)` along which `lambda`
/// decreases.
pub fn find_degenerate(k: usize, spec: &ProblemSpec) -> Result<FoldRecord> {
    trace_to_fold(k, spec, &ContinuationSettings::default()).map(|(_, fold)| fold)
}

/// `sigma_min / sigma_max` of the fold state relative to `tol`.
pub fn is_degenerate(fold: &FoldRecord, settings: &ContinuationSettings) -> bool {
    fold.point.sigma_ratio() < settings.degenerate_tol
}

