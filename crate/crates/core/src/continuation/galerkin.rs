//! Galerkin residual and Jacobian of
//! `F(u, lambda) = (1-t^2) u'' + (beta - alpha - (alpha+beta+2) t) u' - lambda (u - u^q)`
//! in the Jacobi basis. The linear part is diagonal with entries
//! `-i (i + alpha + beta + 1)`.

use nalgebra::{DMatrix, DVector};

use super::problem::{ProblemSpec, SpectralFunction};
use crate::error::{Error, Result};

impl ProblemSpec {
    fn check_len(&self, c: &[f64]) -> Result<()> {
        if c.len() != self.n_modes() {
            return Err(Error::InvalidConfig(format!(
                "state has {} coefficients, problem has N = {}",
                c.len(),
                self.n_modes()
            )));
        }
        Ok(())
    }

    /// Values at the Gauss nodes, rejecting any nonpositive entry.
    pub(crate) fn positive_nodal(&self, c: &[f64]) -> Result<DVector<f64>> {
        self.check_len(c)?;
        let u = &self.basis.values * DVector::from_column_slice(c);
        let min = u.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NonpositiveState { min });
        }
        Ok(u)
    }

    /// `proj_i(g) = \sum_m w_m g_m P_i(x_m) / h_i`.
    pub(crate) fn project(&self, g: &DVector<f64>) -> DVector<f64> {
        let b = &self.basis;
        let wg = g.component_mul(&b.weights);
        b.values.tr_mul(&wg).component_div(&b.norms)
    }

    pub(crate) fn residual_vec(&self, c: &[f64], lambda: f64) -> Result<DVector<f64>> {
        let u = self.positive_nodal(c)?;
        let q = self.q();
        let g = u.map(|x| x - x.powf(q));
        let proj = self.project(&g);
        let b = &self.basis;
        Ok(DVector::from_iterator(
            c.len(),
            (0..c.len()).map(|i| -b.eigen[i] * c[i] - lambda * proj[i]),
        ))
    }

    /// `dF/dlambda = -proj(u - u^q)`.
    pub(crate) fn lambda_column(&self, c: &[f64]) -> Result<DVector<f64>> {
        let u = self.positive_nodal(c)?;
        let q = self.q();
        Ok(-self.project(&u.map(|x| x - x.powf(q))))
    }

    /// `G_ij = \sum_m w_m f_m P_i(x_m) P_j(x_m)`.
    pub(crate) fn gram(&self, f: &DVector<f64>) -> DMatrix<f64> {
        let b = &self.basis;
        let mut scaled = b.values.clone();
        for (mut row, (w, fm)) in scaled.row_iter_mut().zip(b.weights.iter().zip(f.iter())) {
            row *= w * fm;
        }
        b.values.tr_mul(&scaled)
    }

    pub(crate) fn jacobian_mat(&self, c: &[f64], lambda: f64) -> Result<DMatrix<f64>> {
        let u = self.positive_nodal(c)?;
        let q = self.q();
        let f = u.map(|x| 1.0 - q * x.powf(q - 1.0));
        let mut j = self.gram(&f);
        let b = &self.basis;
        for i in 0..j.nrows() {
            let scale = -lambda / b.norms[i];
            j.row_mut(i).scale_mut(scale);
            j[(i, i)] -= b.eigen[i];
        }
        Ok(j)
    }

    /// `S = D^{1/2} J D^{-1/2}` with `D = diag(h)`: the Jacobian in the
    /// orthonormal basis, symmetric by self-adjointness.
    pub(crate) fn symmetrized(&self, j: &DMatrix<f64>) -> DMatrix<f64> {
        let h = &self.basis.norms;
        let mut s = j.clone();
        for r in 0..s.nrows() {
            for c in 0..s.ncols() {
                s[(r, c)] *= (h[r] / h[c]).sqrt();
            }
        }
        // symmetric part
        let t = s.transpose();
        (s + t) * 0.5
    }

    pub fn is_positive(&self, u: &SpectralFunction) -> bool {
        self.positive_nodal(u.coeffs()).is_ok()
    }
}

/// Coefficients of `F(u, lambda)` projected on `P_0, ..., P_{N-1}`.
pub fn residual(u: &SpectralFunction, lambda: f64, spec: &ProblemSpec) -> Result<SpectralFunction> {
    let r = spec.residual_vec(u.coeffs(), lambda)?;
    Ok(SpectralFunction::new(r.as_slice().to_vec(), spec.params()))
}

/// `D_u F(u, lambda)` as an `N x N` matrix acting on coefficient vectors.
pub fn jacobian(u: &SpectralFunction, lambda: f64, spec: &ProblemSpec) -> Result<DMatrix<f64>> {
    spec.jacobian_mat(u.coeffs(), lambda)
}

/// Singular values of `D_u F` in the orthonormal basis, ascending.
pub fn singular_values(u: &SpectralFunction, lambda: f64, spec: &ProblemSpec) -> Result<Vec<f64>> {
    let j = spec.jacobian_mat(u.coeffs(), lambda)?;
    Ok(symmetric_singular_values(&spec.symmetrized(&j)))
}

pub(crate) fn symmetric_singular_values(s: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = s.symmetric_eigenvalues().iter().map(|x| x.abs()).collect();
    sv.sort_by(f64::total_cmp);
    sv
}

/// Pointwise defects of the natural boundary relations
/// `(2 beta + 2) u'(-1) = lambda (u - u^q)(-1)` and
/// `-(2 alpha + 2) u'(1) = lambda (u - u^q)(1)`.
pub fn boundary_residual(u: &SpectralFunction, lambda: f64, q: f64) -> Result<(f64, f64)> {
    let (um, up) = (u.eval(-1.0), u.eval(1.0));
    if !(um > 0.0 && up > 0.0) {
        return Err(Error::NonpositiveState { min: um.min(up) });
    }
    let p = u.params();
    let left = (2.0 * p.beta() + 2.0) * u.derivative(-1.0) - lambda * (um - um.powf(q));
    let right = -(2.0 * p.alpha() + 2.0) * u.derivative(1.0) - lambda * (up - up.powf(q));
    Ok((left.abs(), right.abs()))
}

/// Relative change of `proj(u - u^q)` when the quadrature order doubles.
pub fn quadrature_convergence(u: &SpectralFunction, spec: &ProblemSpec) -> Result<f64> {
    let fine = ProblemSpec::with_resolution(
        spec.params().clone(),
        spec.q(),
        spec.n_modes(),
        2 * spec.n_quad(),
    )?;
    let coarse = spec.lambda_column(u.coeffs())?;
    let refined = fine.lambda_column(u.coeffs())?;
    let scale = spec.weighted_norm(coarse.as_slice()).max(f64::MIN_POSITIVE);
    Ok(spec.weighted_norm((coarse - refined).as_slice()) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::JacobiParams;
    use approx::assert_relative_eq;

    fn spec(al: f64, be: f64, q: f64, n: usize) -> ProblemSpec {
        ProblemSpec::with_modes(JacobiParams::new(al, be).unwrap(), q, n).unwrap()
    }

    #[test]
    fn trivial_state_has_zero_residual() {
        let s = spec(0.5, 0.5, 3.0, 16);
        let r = residual(&s.constant_one(), 2.7, &s).unwrap();
        assert!(r.coeffs().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn residual_at_zero_lambda_is_linear_part() {
        let s = spec(1.0, 0.0, 2.0, 16);
        let eps = 1e-3;
        let u = SpectralFunction::perturbed_one(1, eps, 16, s.params());
        let r = residual(&u, 0.0, &s).unwrap();
        assert_relative_eq!(r.coeffs()[1], -3.0 * eps, max_relative = 1e-13);
        assert!(r.coeffs().iter().enumerate().all(|(i, x)| i == 1 || x.abs() < 1e-15));
    }

    #[test]
    fn trivial_jacobian_is_diagonal() {
        let s = spec(1.5, 0.5, 2.0, 16);
        let lambda = 7.0;
        let j = jacobian(&s.constant_one(), lambda, &s).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                let expected = if r == c {
                    -(r as f64) * (r as f64 + 3.0) - lambda * (1.0 - 2.0)
                } else {
                    0.0
                };
                assert!((j[(r, c)] - expected).abs() < 1e-11, "({r}, {c})");
            }
        }
    }

    #[test]
    fn nonpositive_state_rejected() {
        let s = spec(0.0, 0.0, 2.5, 16);
        let u = SpectralFunction::perturbed_one(1, 2.0, 16, s.params());
        assert!(matches!(residual(&u, 1.0, &s), Err(Error::NonpositiveState { .. })));
    }

    #[test]
    fn weighted_symmetry() {
        let s = spec(1.5, 0.5, 2.0, 16);
        let mut c = vec![0.0; 16];
        c[0] = 1.0;
        c[1] = 0.1;
        c[3] = -0.03;
        let u = SpectralFunction::new(c, s.params());
        let j = jacobian(&u, 3.0, &s).unwrap();
        let h = s.norms();
        for r in 0..16 {
            for c in 0..16 {
                let d = (j[(r, c)] * h[r] - j[(c, r)] * h[c]).abs();
                assert!(d < 1e-10, "({r}, {c}) {d}");
            }
        }
    }
}
