//! Branch switching at `(1, lambda_k)` and pseudo-arclength continuation.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use super::galerkin::symmetric_singular_values;
use super::problem::{ProblemSpec, SpectralFunction};
use super::topology::{count_critical_points, count_crossings};
use crate::error::{Error, Result};
use crate::jacobi::params::ratio_to_f64;
use crate::linearization::{cube_integral, cube_integral_exact};

/// `lambda_k = k (k + alpha + beta + 1) / (q - 1)` for `k = 1..=kmax`.
pub fn bifurcation_points(spec: &ProblemSpec, kmax: usize) -> Vec<(usize, f64)> {
    (1..=kmax).map(|k| (k, lambda_k(k, spec))).collect()
}

pub fn lambda_k(k: usize, spec: &ProblemSpec) -> f64 {
    let kf = k as f64;
    kf * (kf + spec.params().a()) / (spec.q() - 1.0)
}

/// `dlambda/ds(0) = -q lambda_k I_3 / (2 h_k)` along `u = 1 + s P_k + o(s)`.
///
/// With rational exponents the ratio `I_3 / h_k` is formed exactly, so the
/// vanishing cases give exactly zero.
pub fn lambda_prime_zero(k: usize, spec: &ProblemSpec) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfRange("lambda_prime_zero needs k >= 1".into()));
    }
    let params = spec.params();
    let ratio = if params.exact().is_some() {
        let (cube, _) = cube_integral_exact(k, params)?;
        if cube.is_zero() {
            0.0
        } else {
            let table = crate::linearization::exact_linearization(k, params)?;
            ratio_to_f64(&(cube / table.norm_over_mass))
        }
    } else {
        cube_integral(k, params)? / crate::jacobi::weighted_norm_sq(k, params)?
    };
    Ok(-spec.q() * lambda_k(k, spec) * ratio / 2.0)
}

/// Index of the bifurcation point a branch emanates from, and the sign of
/// `<u - 1, P_k>_w` on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BranchOrigin {
    pub k: usize,
    pub direction: i8,
}

/// One accepted continuation state.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub u: SpectralFunction,
    pub lambda: f64,
    /// Pseudo-arclength from the bifurcation point in the weighted norm.
    pub s: f64,
    pub residual_norm: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `None` when the count hit a near-tangent root.
    pub crossings: Option<usize>,
    pub critical_points: Option<usize>,
    /// `lambda` component of the unit tangent.
    pub dlambda_ds: f64,
    /// Unit tangent `(c, lambda)` in the weighted norm.
    pub tangent: Vec<f64>,
    pub origin: BranchOrigin,
}

impl BranchPoint {
    pub fn state(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.u.len() + 1);
        x.rows_mut(0, self.u.len()).copy_from_slice(self.u.coeffs());
        x[self.u.len()] = self.lambda;
        x
    }

    pub fn sigma_ratio(&self) -> f64 {
        self.sigma_min / self.sigma_max
    }
}

#[derive(Clone, Debug)]
pub struct ContinuationSettings {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub ds_initial: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_steps: usize,
    pub lambda_floor: f64,
    pub lambda_ceiling: f64,
    pub amplitude_cap: f64,
    /// Relative `sigma_min / sigma_max` below which a state is degenerate.
    pub degenerate_tol: f64,
    /// Stop `steps_past_fold` steps after the first sign change of
    /// `dlambda/ds`.
    pub stop_after_fold: bool,
    pub steps_past_fold: usize,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            newton_tol: 1e-11,
            max_iter: 25,
            ds_initial: 0.01,
            ds_min: 1e-6,
            ds_max: 0.05,
            max_steps: 2000,
            lambda_floor: 1e-4,
            lambda_ceiling: 1e6,
            amplitude_cap: 1e3,
            degenerate_tol: 1e-8,
            stop_after_fold: false,
            steps_past_fold: 3,
        }
    }
}

impl ContinuationSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.newton_tol > 0.0
            && self.max_iter > 0
            && self.ds_min > 0.0
            && self.ds_min <= self.ds_max
            && self.ds_initial > 0.0
            && self.lambda_floor < self.lambda_ceiling
            && self.amplitude_cap > 0.0
            && self.degenerate_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("inconsistent continuation settings {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    StepLimit,
    LambdaFloor,
    LambdaCeiling,
    AmplitudeCap,
    FoldPassed,
    /// Step halving reached `ds_min`; the last corrector failure is kept.
    StepExhausted { error: String },
}

/// Accepted points in arclength order, starting at the branch-switch point.
#[derive(Clone, Debug)]
pub struct Branch {
    pub origin: BranchOrigin,
    pub points: Vec<BranchPoint>,
    /// Indices `i` with a sign change of `dlambda/ds` between `i` and `i + 1`.
    pub fold_brackets: Vec<usize>,
    pub folds: Vec<super::fold::FoldRecord>,
    pub termination: Termination,
}

/// Weights of the extended inner product on `(c, lambda)`.
pub(crate) fn state_weights(spec: &ProblemSpec) -> DVector<f64> {
    let n = spec.n_modes();
    let mut w = DVector::from_element(n + 1, 1.0);
    w.rows_mut(0, n).copy_from(&spec.basis.norms);
    w
}

fn split(x: &DVector<f64>) -> (&[f64], f64) {
    let n = x.len() - 1;
    (&x.as_slice()[..n], x[n])
}

/// `[J F_lambda; row^T]`.
fn bordered(j: DMatrix<f64>, fl: &DVector<f64>, row: &DVector<f64>) -> DMatrix<f64> {
    let n = j.nrows();
    let mut a = j.resize(n + 1, n + 1, 0.0);
    a.view_mut((0, n), (n, 1)).copy_from(fl);
    a.row_mut(n).copy_from(&row.transpose());
    a
}

fn solve(a: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NumericalBreakdown("singular bordered system".into()))?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::NumericalBreakdown("non-finite bordered solve".into()))
    }
}

pub(crate) struct Corrected {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton on `{F(c, lambda) = 0, row . x = target}` from `x`.
pub(crate) fn correct(
    spec: &ProblemSpec,
    mut x: DVector<f64>,
    row: &DVector<f64>,
    target: f64,
    settings: &ContinuationSettings,
) -> Result<Corrected> {
    let mut accepted: Option<Corrected> = None;
    let mut last = f64::INFINITY;
    for it in 0..=settings.max_iter {
        let (c, lambda) = split(&x);
        let f = spec.residual_vec(c, lambda)?;
        let res = spec.weighted_norm(f.as_slice());
        let tol = settings.newton_tol * (1.0 + spec.weighted_norm(c));
        let g = row.dot(&x) - target;
        last = res;
        if !res.is_finite() {
            break;
        }
        if res < tol && g.abs() <= 1e-12 * (1.0 + target.abs()) {
            if let Some(prev) = accepted {
                return Ok(if res <= prev.residual {
                    Corrected {
                        x,
                        residual: res,
                        iterations: it,
                    }
                } else {
                    prev
                });
            }
            accepted = Some(Corrected {
                x: x.clone(),
                residual: res,
                iterations: it,
            });
        } else if let Some(prev) = accepted {
            return Ok(prev);
        }
        if it == settings.max_iter {
            break;
        }
        let j = spec.jacobian_mat(c, lambda)?;
        let fl = spec.lambda_column(c)?;
        let mut rhs = DVector::zeros(x.len());
        let n = f.len();
        rhs.rows_mut(0, n).copy_from(&(-f));
        rhs[n] = -g;
        x += solve(bordered(j, &fl, row), rhs)?;
    }
    match accepted {
        Some(prev) => Ok(prev),
        None => Err(Error::NewtonDivergence {
            iterations: settings.max_iter,
            residual: last,
        }),
    }
}

/// Unit tangent of the solution curve at `x`, oriented by `reference`
/// (`reference . W tau > 0`).
pub(crate) fn tangent(
    spec: &ProblemSpec,
    x: &DVector<f64>,
    reference: &DVector<f64>,
) -> Result<DVector<f64>> {
    let (c, lambda) = split(x);
    let w = state_weights(spec);
    let j = spec.jacobian_mat(c, lambda)?;
    let fl = spec.lambda_column(c)?;
    let row = reference.component_mul(&w);
    let mut rhs = DVector::zeros(x.len());
    rhs[x.len() - 1] = 1.0;
    let t = solve(bordered(j, &fl, &row), rhs)?;
    let norm = t.component_mul(&w).dot(&t).sqrt();
    Ok(t / norm)
}

/// Assembles the diagnostics of a converged state.
pub(crate) fn make_point(
    spec: &ProblemSpec,
    x: &DVector<f64>,
    residual_norm: f64,
    s: f64,
    tau: &DVector<f64>,
    origin: BranchOrigin,
) -> Result<BranchPoint> {
    let (c, lambda) = split(x);
    let j = spec.jacobian_mat(c, lambda)?;
    let sv = symmetric_singular_values(&spec.symmetrized(&j));
    let u = SpectralFunction::new(c.to_vec(), spec.params());
    Ok(BranchPoint {
        crossings: count_crossings(&u).ok(),
        critical_points: count_critical_points(&u).ok(),
        u,
        lambda,
        s,
        residual_norm,
        sigma_min: sv[0],
        sigma_max: sv[sv.len() - 1],
        dlambda_ds: tau[tau.len() - 1],
        tangent: tau.as_slice().to_vec(),
        origin,
    })
}

fn check_theorem_scope(k: usize, spec: &ProblemSpec) -> Result<()> {
    spec.params().require_gasper_hypotheses()?;
    if k == 0 || 2 * k > spec.n_modes() {
        return Err(Error::OutOfRange(format!(
            "k = {k} outside [1, N/2 = {}]",
            spec.n_modes() / 2
        )));
    }
    Ok(())
}

/// First point of the branch through `(1, lambda_k)` with
/// `<u - 1, P_k>_w = direction * s0 * h_k^{1/2}`.
pub fn branch_switch(
    k: usize,
    spec: &ProblemSpec,
    s0: f64,
    direction: i8,
) -> Result<BranchPoint> {
    branch_switch_with(k, spec, s0, direction, &ContinuationSettings::default())
}

pub fn branch_switch_with(
    k: usize,
    spec: &ProblemSpec,
    s0: f64,
    direction: i8,
    settings: &ContinuationSettings,
) -> Result<BranchPoint> {
    check_theorem_scope(k, spec)?;
    if !(s0 > 0.0 && s0 <= 0.05) {
        return Err(Error::OutOfRange(format!("s0 = {s0} outside (0, 0.05]")));
    }
    if direction != 1 && direction != -1 {
        return Err(Error::OutOfRange(format!("direction = {direction} must be +1 or -1")));
    }
    let n = spec.n_modes();
    let dir = f64::from(direction);
    let hk = spec.basis.norms[k];
    let ck = dir * s0 / hk.sqrt();
    let slope = lambda_prime_zero(k, spec)?;

    let mut x = DVector::zeros(n + 1);
    x[0] = 1.0;
    x[k] = ck;
    x[n] = lambda_k(k, spec) + slope * ck;
    let mut row = DVector::zeros(n + 1);
    row[k] = 1.0;
    let sol = correct(spec, x, &row, ck, settings)?;

    let mut reference = DVector::zeros(n + 1);
    reference[k] = dir;
    let tau = tangent(spec, &sol.x, &reference)?;
    let origin = BranchOrigin { k, direction };
    make_point(spec, &sol.x, sol.residual, s0, &tau, origin)
}

/// Pseudo-arclength continuation from `start` with adaptive steps.
///
/// Returns an error only when no step beyond `start` can be taken; later
/// failures end the branch with [`Termination::StepExhausted`].
pub fn continue_branch(
    start: &BranchPoint,
    spec: &ProblemSpec,
    settings: &ContinuationSettings,
) -> Result<Branch> {
    settings.validate()?;
    spec.params().require_gasper_hypotheses()?;
    if start.u.len() != spec.n_modes() {
        return Err(Error::InvalidConfig("start point resolution differs from spec".into()));
    }
    let w = state_weights(spec);
    let mut points = vec![start.clone()];
    let mut fold_brackets = Vec::new();
    let mut x = start.state();
    let mut tau = DVector::from_column_slice(&start.tangent);
    let mut s = start.s;
    let mut ds = settings.ds_initial.clamp(settings.ds_min, settings.ds_max);
    let mut countdown: Option<usize> = None;

    let termination = loop {
        if points.len() > settings.max_steps {
            break Termination::StepLimit;
        }
        if countdown == Some(0) {
            break Termination::FoldPassed;
        }

        let step = loop {
            let pred = &x + &tau * ds;
            let row = tau.component_mul(&w);
            let target = row.dot(&pred);
            let attempt = correct(spec, pred, &row, target, settings).and_then(|sol| {
                let t = tangent(spec, &sol.x, &tau)?;
                Ok((sol, t))
            });
            match attempt {
                Ok((sol, t)) if t.component_mul(&w).dot(&tau) >= 0.8 || ds <= settings.ds_min => {
                    break Ok((sol, t, ds));
                }
                Ok(_) => {}
                Err(e) if recoverable(&e) => {
                    if ds <= settings.ds_min {
                        break Err(e);
                    }
                }
                Err(e) => return Err(e),
            }
            if ds <= settings.ds_min {
                break Err(Error::NumericalBreakdown("tangent turned at minimum step".into()));
            }
            ds = (ds * 0.5).max(settings.ds_min);
        };

        let (sol, t, used) = match step {
            Ok(v) => v,
            Err(e) if points.len() == 1 => return Err(e),
            Err(e) => {
                break Termination::StepExhausted {
                    error: e.to_string(),
                }
            }
        };

        s += used;
        let point = make_point(spec, &sol.x, sol.residual, s, &t, start.origin)?;
        let prev = points.last().expect("nonempty").dlambda_ds;
        if prev != 0.0 && point.dlambda_ds != 0.0 && (prev < 0.0) != (point.dlambda_ds < 0.0) {
            fold_brackets.push(points.len() - 1);
            if settings.stop_after_fold && countdown.is_none() {
                countdown = Some(settings.steps_past_fold);
            }
        }
        x = sol.x;
        tau = t;
        if sol.iterations <= 3 {
            ds = (ds * 1.5).min(settings.ds_max);
        } else if sol.iterations >= 7 {
            ds = (ds * 0.7).max(settings.ds_min);
        }
        countdown = countdown.map(|c| c.saturating_sub(1));

        let lambda = point.lambda;
        let amplitude = spec.weighted_norm(point.u.coeffs());
        points.push(point);
        if lambda <= settings.lambda_floor {
            break Termination::LambdaFloor;
        }
        if lambda >= settings.lambda_ceiling {
            break Termination::LambdaCeiling;
        }
        if amplitude > settings.amplitude_cap {
            break Termination::AmplitudeCap;
        }
    };

    Ok(Branch {
        origin: start.origin,
        points,
        fold_brackets,
        folds: Vec::new(),
        termination,
    })
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::NewtonDivergence { .. } | Error::NonpositiveState { .. } | Error::NumericalBreakdown(_)
    )
}

/// Re-solves `point` with `fine` resolution on the hyperplane through it
/// orthogonal to its tangent.
pub fn refine_point(
    point: &BranchPoint,
    fine: &ProblemSpec,
    settings: &ContinuationSettings,
) -> Result<BranchPoint> {
    let n = fine.n_modes();
    let m = point.u.len();
    if n < m {
        return Err(Error::InvalidConfig("refinement must not reduce N".into()));
    }
    let lift = |v: &[f64]| {
        let mut x = DVector::zeros(n + 1);
        x.rows_mut(0, m).copy_from_slice(&v[..m]);
        x[n] = v[m];
        x
    };
    let x0 = lift(point.state().as_slice());
    let tau = lift(&point.tangent);
    let row = tau.component_mul(&state_weights(fine));
    let target = row.dot(&x0);
    let sol = correct(fine, x0, &row, target, settings)?;
    let t = tangent(fine, &sol.x, &tau)?;
    make_point(fine, &sol.x, sol.residual, point.s, &t, point.origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::JacobiParams;
    use approx::assert_relative_eq;

    fn spec(p: JacobiParams, q: f64) -> ProblemSpec {
        ProblemSpec::with_modes(p, q, 32).unwrap()
    }

    #[test]
    fn bifurcation_point_examples() {
        let s = spec(JacobiParams::from_ratios((1, 2), (1, 2)).unwrap(), 3.0);
        let pts = bifurcation_points(&s, 2);
        assert_eq!(pts[0], (1, 1.5));
        assert_eq!(pts[1], (2, 4.0));
        let s = spec(JacobiParams::from_ratios((1, 1), (0, 1)).unwrap(), 2.0);
        assert_eq!(bifurcation_points(&s, 1)[0], (1, 3.0));
    }

    #[test]
    fn slope_examples() {
        let s = spec(JacobiParams::from_ratios((1, 1), (0, 1)).unwrap(), 2.0);
        assert_relative_eq!(lambda_prime_zero(1, &s).unwrap(), -1.2, max_relative = 1e-14);
        let leg = spec(JacobiParams::from_ratios((0, 1), (0, 1)).unwrap(), 2.0);
        assert_eq!(lambda_prime_zero(1, &leg).unwrap(), 0.0);
        assert!(lambda_prime_zero(2, &leg).unwrap() < 0.0);
        let float = spec(JacobiParams::new(1.0, 0.0).unwrap(), 2.0);
        assert_relative_eq!(lambda_prime_zero(1, &float).unwrap(), -1.2, max_relative = 1e-12);
    }

    #[test]
    fn switch_lands_on_branch() {
        let s = spec(JacobiParams::from_ratios((1, 1), (0, 1)).unwrap(), 2.0);
        let p = branch_switch(1, &s, 1e-3, 1).unwrap();
        assert_eq!(p.crossings, Some(1));
        assert!(p.lambda < 3.0);
        assert!(p.residual_norm < 1e-11 * (1.0 + s.weighted_norm(p.u.coeffs())));
        assert!(p.dlambda_ds < 0.0);
    }

    #[test]
    fn switch_rejects_bad_input() {
        let s = spec(JacobiParams::new(0.5, 0.5).unwrap(), 3.0);
        assert!(branch_switch(0, &s, 1e-3, 1).is_err());
        assert!(branch_switch(17, &s, 1e-3, 1).is_err());
        assert!(branch_switch(1, &s, 0.2, 1).is_err());
        assert!(branch_switch(1, &s, 1e-3, 0).is_err());
        let swapped = spec(JacobiParams::new(0.0, 1.0).unwrap(), 2.0);
        assert!(matches!(
            branch_switch(1, &swapped, 1e-3, 1),
            Err(Error::HypothesisViolation { .. })
        ));
    }
}
