//! Gauss–Jacobi quadrature by the Golub–Welsch construction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

use super::params::JacobiParams;
use crate::error::{Error, Result};

/// An `order`-point Gauss rule for the weight `(1-t)^alpha (1+t)^beta`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    params: JacobiParams,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn params(&self) -> &JacobiParams {
        &self.params
    }

    /// `\int f(t) (1-t)^alpha (1+t)^beta dt`, exact for polynomials of degree
    /// at most `2 * order - 1`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `\int_{-1}^{1} (1-t)^alpha (1+t)^beta dt = 2^{alpha+beta+1} B(alpha+1, beta+1)`.
pub fn weight_mass(params: &JacobiParams) -> f64 {
    let (al, be) = (params.alpha(), params.beta());
    ((al + be + 1.0) * std::f64::consts::LN_2 + ln_gamma(al + 1.0) + ln_gamma(be + 1.0)
        - ln_gamma(al + be + 2.0))
    .exp()
}

/// Number of Gauss points used to integrate a polynomial of degree `degree`:
/// `ceil((degree + 1) / 2)` plus two guard points.
pub fn default_order(degree: usize) -> usize {
    (degree + 2) / 2 + 2
}

type RuleCache = Mutex<HashMap<(u64, u64, usize), Arc<QuadratureRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoised `order`-point Gauss–Jacobi rule.
pub fn gauss_jacobi_rule(params: &JacobiParams, order: usize) -> Result<Arc<QuadratureRule>> {
    let (ka, kb) = params.cache_key();
    let key = (ka, kb, order);
    if let Some(rule) = cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_rule(params, order)?);
    cache()
        .lock()
        .expect("rule cache poisoned")
        .entry(key)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

fn build_rule(params: &JacobiParams, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::OutOfRange("quadrature order must be at least 1".into()));
    }
    let (al, be) = (params.alpha(), params.beta());
    let ab = al + be;

    // symmetric Jacobi matrix of the orthonormal recurrence
    let mut jac = DMatrix::<f64>::zeros(order, order);
    for n in 0..order {
        let nf = n as f64;
        jac[(n, n)] = if n == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * nf + ab) * (2.0 * nf + ab + 2.0))
        };
        if n + 1 < order {
            let m = nf + 1.0;
            let b2 = if n == 0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * m + ab;
                4.0 * m * (m + al) * (m + be) * (m + ab) / (s * s * (s - 1.0) * (s + 1.0))
            };
            let off = b2.sqrt();
            jac[(n, n + 1)] = off;
            jac[(n + 1, n)] = off;
        }
    }
    let mass = weight_mass(params);
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let v0 = eig.eigenvectors[(0, i)];
            (x, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let valid_nodes = nodes.iter().all(|x| x.is_finite() && x.abs() < 1.0)
        && nodes.windows(2).all(|w| w[0] < w[1]);
    let valid_weights = weights.iter().all(|w| w.is_finite() && *w > 0.0);
    if !valid_nodes || !valid_weights {
        return Err(Error::NumericalBreakdown(format!(
            "Gauss-Jacobi rule of order {order} for {params:?} has invalid nodes or weights"
        )));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        params: params.clone(),
    })
}
