//! Jacobi polynomials `P_k^{(alpha, beta)}` in the normalisation fixed by
//! `P_k(1) = (alpha+1)_k / k!`.
//!
//! Floating-point values always come from the three-term recurrence; the
//! monomial form in [`exact`] is reserved for rational oracles.

pub mod exact;
pub mod params;
pub mod quadrature;

use statrs::function::gamma::ln_gamma;

pub use exact::{apply_l, exact_coeffs, ExactPolynomial, WeightMoments};
pub use params::{parse_rational, JacobiParams};
pub use quadrature::{default_order, gauss_jacobi_rule, weight_mass, QuadratureRule};

use crate::error::Result;

/// Endpoint of `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Value of `P_k^{(alpha, beta)}(t)`.
pub fn eval_jacobi(k: usize, params: &JacobiParams, t: f64) -> f64 {
    let mut buf = vec![0.0; k + 1];
    eval_all(params, t, &mut buf);
    buf[k]
}

/// Fills `out[i] = P_i(t)` for `i < out.len()`.
pub fn eval_all(params: &JacobiParams, t: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let (al, be) = (params.alpha(), params.beta());
    let ab = al + be;
    out[0] = 1.0;
    if n == 1 {
        return;
    }
    out[1] = 0.5 * (al - be) + 0.5 * (ab + 2.0) * t;
    for k in 1..n - 1 {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let c0 = 2.0 * (kf + 1.0) * (kf + ab + 1.0) * s;
        let c1 = (s + 1.0) * ((s + 2.0) * s * t + al * al - be * be);
        let c2 = 2.0 * (kf + al) * (kf + be) * (s + 2.0);
        out[k + 1] = (c1 * out[k] - c2 * out[k - 1]) / c0;
    }
}

/// `d/dt P_k^{(alpha,beta)}(t) = (k + alpha + beta + 1)/2 * P_{k-1}^{(alpha+1,beta+1)}(t)`.
pub fn eval_jacobi_derivative(k: usize, params: &JacobiParams, t: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    0.5 * (k as f64 + params.a()) * eval_jacobi(k - 1, &params.shifted(1), t)
}

/// `P_k(1) = (alpha+1)_k / k!` and `P_k(-1) = (-1)^k (beta+1)_k / k!`.
pub fn endpoint_value(k: usize, params: &JacobiParams, side: Side) -> f64 {
    let x = match side {
        Side::Plus => params.alpha() + 1.0,
        Side::Minus => params.beta() + 1.0,
    };
    let magnitude = (0..k).fold(1.0, |acc, i| acc * (x + i as f64) / (i + 1) as f64);
    match side {
        Side::Minus if k % 2 == 1 => -magnitude,
        _ => magnitude,
    }
}

/// `h_k = \int P_k^2 (1-t)^alpha (1+t)^beta dt`, by a Gauss rule of order
/// `k + 3`.
pub fn weighted_norm_sq(k: usize, params: &JacobiParams) -> Result<f64> {
    let rule = gauss_jacobi_rule(params, default_order(2 * k))?;
    let mut buf = vec![0.0; k + 1];
    Ok(rule.integrate(|t| {
        eval_all(params, t, &mut buf);
        buf[k] * buf[k]
    }))
}

/// `h_k = 2^{a} / (2k + a) * Gamma(k+alpha+1) Gamma(k+beta+1) / (Gamma(k+a) k!)`
/// with `a = alpha + beta + 1`; for `k = 0` this is the total mass.
pub fn weighted_norm_sq_closed_form(k: usize, params: &JacobiParams) -> f64 {
    if k == 0 {
        return weight_mass(params);
    }
    let (al, be) = (params.alpha(), params.beta());
    let a = params.a();
    let kf = k as f64;
    let log = a * std::f64::consts::LN_2 - (2.0 * kf + a).ln() + ln_gamma(kf + al + 1.0)
        + ln_gamma(kf + be + 1.0)
        - ln_gamma(kf + a)
        - ln_gamma(kf + 1.0);
    log.exp()
}

/// The `k` zeros of `P_k` in `(-1, 1)`, increasing: nodes of the `k`-point
/// Gauss rule followed by one Newton step.
pub fn jacobi_zeros(k: usize, params: &JacobiParams) -> Result<Vec<f64>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let rule = gauss_jacobi_rule(params, k)?;
    Ok(rule
        .nodes()
        .iter()
        .map(|&x| {
            let d = eval_jacobi_derivative(k, params, x);
            if d != 0.0 {
                (x - eval_jacobi(k, params, x) / d).clamp(-1.0, 1.0)
            } else {
                x
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degree_values() {
        let p = JacobiParams::new(0.3, -0.2).unwrap();
        assert_eq!(eval_jacobi(0, &p, 0.3), 1.0);
        let p10 = JacobiParams::new(1.0, 0.0).unwrap();
        assert_relative_eq!(eval_jacobi(1, &p10, 1.0), 2.0, max_relative = 1e-15);
        let leg = JacobiParams::new(0.0, 0.0).unwrap();
        assert_relative_eq!(eval_jacobi(2, &leg, 0.0), -0.5, max_relative = 1e-15);
    }

    #[test]
    fn endpoint_examples() {
        let p10 = JacobiParams::new(1.0, 0.0).unwrap();
        assert_relative_eq!(endpoint_value(2, &p10, Side::Plus), 3.0);
        assert_relative_eq!(endpoint_value(2, &p10, Side::Minus), 1.0);
        let leg = JacobiParams::new(0.0, 0.0).unwrap();
        assert_relative_eq!(endpoint_value(3, &leg, Side::Minus), -1.0);
    }

    #[test]
    fn norm_examples() {
        let leg = JacobiParams::new(0.0, 0.0).unwrap();
        assert_relative_eq!(weighted_norm_sq(0, &leg).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(weighted_norm_sq(1, &leg).unwrap(), 2.0 / 3.0, max_relative = 1e-14);
        let p10 = JacobiParams::new(1.0, 0.0).unwrap();
        assert_relative_eq!(weighted_norm_sq(1, &p10).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn norm_closed_form_agrees() {
        for (al, be) in [(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (-0.4, -0.4), (0.3, -0.7)] {
            let p = JacobiParams::new(al, be).unwrap();
            for k in 0..=30 {
                let q = weighted_norm_sq(k, &p).unwrap();
                let c = weighted_norm_sq_closed_form(k, &p);
                assert_relative_eq!(q, c, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn zero_examples() {
        let p10 = JacobiParams::new(1.0, 0.0).unwrap();
        let z = jacobi_zeros(1, &p10).unwrap();
        assert_relative_eq!(z[0], -1.0 / 3.0, max_relative = 1e-14);
        let sym = JacobiParams::new(0.7, 0.7).unwrap();
        assert!(jacobi_zeros(1, &sym).unwrap()[0].abs() < 1e-15);
        let leg = JacobiParams::new(0.0, 0.0).unwrap();
        let z = jacobi_zeros(2, &leg).unwrap();
        assert_relative_eq!(z[1], 1.0 / 3f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(z[0], -1.0 / 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let p = JacobiParams::new(1.5, 0.5).unwrap();
        for k in 1..10 {
            for &t in &[-0.9, -0.2, 0.35, 0.8] {
                let h = 1e-6;
                let fd = (eval_jacobi(k, &p, t + h) - eval_jacobi(k, &p, t - h)) / (2.0 * h);
                assert_relative_eq!(eval_jacobi_derivative(k, &p, t), fd, max_relative = 1e-7, epsilon = 1e-7);
            }
        }
    }
}
