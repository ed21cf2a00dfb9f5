use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::SphereContext;
use crate::jacobi::{eval_all, gauss_jacobi_rule, JacobiParams};

pub const DEFAULT_MODES: usize = 64;

/// Default quadrature order `max(2N + 16, 3N)`.
pub fn default_quadrature(n_modes: usize) -> usize {
    (2 * n_modes + 16).max(3 * n_modes)
}

/// Basis values at the Gauss nodes and the derived projection data.
#[derive(Debug)]
pub(crate) struct Basis {
    pub nodes: Vec<f64>,
    pub weights: DVector<f64>,
    /// `values[(m, i)] = P_i(x_m)`.
    pub values: DMatrix<f64>,
    /// `h_i` under the discrete inner product.
    pub norms: DVector<f64>,
    /// `i (i + alpha + beta + 1)`.
    pub eigen: DVector<f64>,
}

/// Discretised problem: exponents, nonlinearity and Galerkin resolution.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    params: JacobiParams,
    q: f64,
    n_modes: usize,
    n_quad: usize,
    sphere: Option<SphereContext>,
    pub(crate) basis: Arc<Basis>,
}

impl ProblemSpec {
    pub fn new(params: JacobiParams, q: f64) -> Result<Self> {
        Self::with_modes(params, q, DEFAULT_MODES)
    }

    pub fn with_modes(params: JacobiParams, q: f64, n_modes: usize) -> Result<Self> {
        Self::with_resolution(params, q, n_modes, default_quadrature(n_modes))
    }

    pub fn with_resolution(
        params: JacobiParams,
        q: f64,
        n_modes: usize,
        n_quad: usize,
    ) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::InvalidConfig(format!("q = {q} must exceed 1")));
        }
        if n_modes < 8 {
            return Err(Error::InvalidConfig(format!("N = {n_modes} must be at least 8")));
        }
        if n_quad < 2 * n_modes {
            return Err(Error::InvalidConfig(format!(
                "M = {n_quad} must be at least 2N = {}",
                2 * n_modes
            )));
        }
        let basis = Arc::new(build_basis(&params, n_modes, n_quad)?);
        Ok(Self {
            params,
            q,
            n_modes,
            n_quad,
            sphere: None,
            basis,
        })
    }

    /// Attaches sphere data; its exponents must match.
    pub fn with_sphere(mut self, ctx: SphereContext) -> Result<Self> {
        if ctx.params() != &self.params {
            return Err(Error::InvalidConfig(format!(
                "sphere exponents {:?} differ from {:?}",
                ctx.params(),
                self.params
            )));
        }
        self.sphere = Some(ctx);
        Ok(self)
    }

    /// Same problem with `2N` modes and `2M` nodes.
    pub fn refined(&self) -> Result<Self> {
        let mut fine =
            Self::with_resolution(self.params.clone(), self.q, 2 * self.n_modes, 2 * self.n_quad)?;
        fine.sphere = self.sphere.clone();
        Ok(fine)
    }

    pub fn params(&self) -> &JacobiParams {
        &self.params
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    pub fn sphere(&self) -> Option<&SphereContext> {
        self.sphere.as_ref()
    }

    /// `h_i` for `i < N`.
    pub fn norms(&self) -> &[f64] {
        self.basis.norms.as_slice()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.basis.nodes
    }

    /// `||c||_w = (\sum h_i c_i^2)^{1/2}`.
    pub fn weighted_norm(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .zip(self.basis.norms.iter())
            .map(|(c, h)| h * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// `c = 1 + 0`: the trivial state.
    pub fn constant_one(&self) -> SpectralFunction {
        SpectralFunction::constant(1.0, self.n_modes, &self.params)
    }
}

fn build_basis(params: &JacobiParams, n: usize, m: usize) -> Result<Basis> {
    let rule = gauss_jacobi_rule(params, m)?;
    let mut values = DMatrix::<f64>::zeros(m, n);
    let mut row = vec![0.0; n];
    for (r, &x) in rule.nodes().iter().enumerate() {
        eval_all(params, x, &mut row);
        for (i, v) in row.iter().enumerate() {
            values[(r, i)] = *v;
        }
    }
    let weights = DVector::from_column_slice(rule.weights());
    let norms = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            values
                .column(i)
                .iter()
                .zip(weights.iter())
                .map(|(p, w)| w * p * p)
                .sum::<f64>()
        }),
    );
    let a = params.a();
    let eigen = DVector::from_iterator(n, (0..n).map(|i| i as f64 * (i as f64 + a)));
    Ok(Basis {
        nodes: rule.nodes().to_vec(),
        weights,
        values,
        norms,
        eigen,
    })
}

/// `u(t) = \sum_i c_i P_i(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    coeffs: Vec<f64>,
    params: JacobiParams,
}

impl SpectralFunction {
    pub fn new(coeffs: Vec<f64>, params: &JacobiParams) -> Self {
        Self {
            coeffs,
            params: params.clone(),
        }
    }

    pub fn constant(value: f64, n: usize, params: &JacobiParams) -> Self {
        let mut coeffs = vec![0.0; n.max(1)];
        coeffs[0] = value;
        Self::new(coeffs, params)
    }

    /// `1 + eps P_k` with `n` coefficients.
    pub fn perturbed_one(k: usize, eps: f64, n: usize, params: &JacobiParams) -> Self {
        let mut u = Self::constant(1.0, n.max(k + 1), params);
        u.coeffs[k] += eps;
        u
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn params(&self) -> &JacobiParams {
        &self.params
    }

    /// Zero-padded or truncated copy with `n` coefficients.
    pub fn resized(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, 0.0);
        Self::new(coeffs, &self.params)
    }

    pub fn eval(&self, t: f64) -> f64 {
        series(&self.coeffs, &self.params, t, 0)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        series(&self.coeffs, &self.params, t, 1)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        series(&self.coeffs, &self.params, t, 2)
    }
}

/// `order`-th derivative of a Jacobi series, through
/// `P_i^{(r)} = (i + a)_r / 2^r P_{i-r}^{(alpha+r, beta+r)}`.
fn series(coeffs: &[f64], params: &JacobiParams, t: f64, order: u32) -> f64 {
    let r = order as usize;
    if coeffs.len() <= r {
        return 0.0;
    }
    let shifted;
    let p = if order == 0 {
        params
    } else {
        shifted = params.shifted(order);
        &shifted
    };
    let mut buf = vec![0.0; coeffs.len() - r];
    eval_all(p, t, &mut buf);
    let a = params.a();
    coeffs[r..]
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let i = (j + r) as f64;
            let factor = (0..r).fold(1.0, |acc, m| acc * 0.5 * (i + a + m as f64));
            c * factor * buf[j]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{eval_jacobi, weighted_norm_sq_closed_form};
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_resolution() {
        let p = JacobiParams::new(0.5, 0.5).unwrap();
        assert!(ProblemSpec::with_resolution(p.clone(), 1.0, 16, 48).is_err());
        assert!(ProblemSpec::with_resolution(p.clone(), 2.0, 4, 48).is_err());
        assert!(ProblemSpec::with_resolution(p.clone(), 2.0, 16, 31).is_err());
        let spec = ProblemSpec::new(p, 3.0).unwrap();
        assert_eq!((spec.n_modes(), spec.n_quad()), (64, 192));
    }

    #[test]
    fn discrete_norms_match_closed_form() {
        let p = JacobiParams::new(1.5, 0.5).unwrap();
        let spec = ProblemSpec::with_modes(p.clone(), 2.0, 32).unwrap();
        for (i, h) in spec.norms().iter().enumerate() {
            assert_relative_eq!(*h, weighted_norm_sq_closed_form(i, &p), max_relative = 1e-12);
        }
    }

    #[test]
    fn series_derivatives() {
        let p = JacobiParams::new(0.3, -0.2).unwrap();
        let u = SpectralFunction::new(vec![1.0, 0.2, -0.1, 0.05, 0.02], &p);
        for &t in &[-0.7, 0.1, 0.9] {
            let direct: f64 = (0..5).map(|i| u.coeffs()[i] * eval_jacobi(i, &p, t)).sum();
            assert_relative_eq!(u.eval(t), direct, max_relative = 1e-14);
            let h = 1e-5;
            let d1 = (u.eval(t + h) - u.eval(t - h)) / (2.0 * h);
            assert_relative_eq!(u.derivative(t), d1, max_relative = 1e-8);
            let d2 = (u.derivative(t + h) - u.derivative(t - h)) / (2.0 * h);
            assert_relative_eq!(u.second_derivative(t), d2, max_relative = 1e-7);
        }
    }
}
