//! Estimates of `lambda(s)` near `s = 0` from converged branch-switch points,
//! with `s` the coefficient of `P_k` in `u - 1`.

use serde::Serialize;

use super::branch::{branch_switch, lambda_k, lambda_prime_zero};
use super::problem::ProblemSpec;
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct SlopeEstimate {
    pub k: usize,
    pub closed_form: f64,
    /// `A` in the least-squares fit `lambda - lambda_k = A s + B s^2`.
    pub estimate: f64,
    pub curvature: f64,
    /// `(s, lambda - lambda_k)`.
    pub samples: Vec<(f64, f64)>,
}

impl SlopeEstimate {
    pub fn relative_error(&self) -> f64 {
        (self.estimate - self.closed_form).abs() / self.closed_form.abs()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticFit {
    pub k: usize,
    /// `C` in `lambda - lambda_k = C s^2`.
    pub coefficient: f64,
    /// `|y - C s^2|_2 / |y|_2` over the samples.
    pub relative_residual: f64,
    pub samples: Vec<(f64, f64)>,
}

fn samples(k: usize, spec: &ProblemSpec, amplitudes: &[f64]) -> Result<Vec<(f64, f64)>> {
    let lk = lambda_k(k, spec);
    let mut out = Vec::with_capacity(2 * amplitudes.len());
    for &direction in &[-1i8, 1] {
        for &s0 in amplitudes {
            let p = branch_switch(k, spec, s0, direction)?;
            out.push((p.u.coeffs()[k], p.lambda - lk));
        }
    }
    Ok(out)
}

/// Slope at the bifurcation point from amplitudes `s0 = 1e-3, ..., 5e-3` on
/// both sides.
pub fn estimate_lambda_prime(k: usize, spec: &ProblemSpec) -> Result<SlopeEstimate> {
    let closed_form = lambda_prime_zero(k, spec)?;
    let amps: Vec<f64> = (1..=5).map(|i| i as f64 * 1e-3).collect();
    let samples = samples(k, spec, &amps)?;
    // normal equations of y = A s + B s^2
    let (mut s2, mut s3, mut s4, mut sy, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(s, y) in &samples {
        s2 += s * s;
        s3 += s * s * s;
        s4 += s * s * s * s;
        sy += s * y;
        s2y += s * s * y;
    }
    let det = s2 * s4 - s3 * s3;
    let estimate = (sy * s4 - s2y * s3) / det;
    let curvature = (s2 * s2y - s3 * sy) / det;
    Ok(SlopeEstimate {
        k,
        closed_form,
        estimate,
        curvature,
        samples,
    })
}

/// Fit `lambda - lambda_k = C s^2` over 9 log-spaced amplitudes in
/// `[1e-4, 1e-2]` on both sides.
pub fn fit_quadratic(k: usize, spec: &ProblemSpec) -> Result<QuadraticFit> {
    let amps: Vec<f64> = (0..9).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect();
    let samples = samples(k, spec, &amps)?;
    let num: f64 = samples.iter().map(|(s, y)| y * s * s).sum();
    let den: f64 = samples.iter().map(|(s, _)| s.powi(4)).sum();
    let coefficient = num / den;
    let err: f64 = samples
        .iter()
        .map(|(s, y)| (y - coefficient * s * s).powi(2))
        .sum::<f64>()
        .sqrt();
    let size: f64 = samples.iter().map(|(_, y)| y * y).sum::<f64>().sqrt();
    Ok(QuadraticFit {
        k,
        coefficient,
        relative_residual: err / size,
        samples,
    })
}
