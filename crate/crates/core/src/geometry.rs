//! Reduction of isoparametric data `(n, d, c)` on the round sphere to the
//! exponents of the Jacobi weight on `[-1, 1]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::params::{ratio, ratio_to_f64};
use crate::jacobi::JacobiParams;

pub const ADMISSIBLE_DEGREES: [i64; 5] = [1, 2, 3, 4, 6];

/// Isoparametric data on `S^n` together with the induced `(alpha, beta)`.
#[derive(Clone, Debug)]
pub struct SphereContext {
    n: i64,
    d: i64,
    c: i64,
    m_focal: Option<i64>,
    alpha: BigRational,
    beta: BigRational,
    params: JacobiParams,
}

/// Solves `beta - alpha = c/2`, `alpha + beta + 2 = (n + d - 1)/d` exactly.
pub fn params_from_sphere(n: i64, d: i64, c: i64) -> Result<SphereContext> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    if !ADMISSIBLE_DEGREES.contains(&d) {
        return Err(Error::InvalidDegree(d));
    }
    if c > 0 {
        return Err(Error::PositiveC(c));
    }
    let sum = ratio(n + d - 1, d) - ratio(2, 1);
    let diff = ratio(c, 2);
    let two = BigRational::from_integer(BigInt::from(2));
    let alpha = (&sum - &diff) / &two;
    let beta = (&sum + &diff) / &two;
    if beta <= ratio(-1, 1) {
        return Err(Error::NonIntegrableWeight(format!(
            "(n, d, c) = ({n}, {d}, {c}) gives beta = {beta}"
        )));
    }
    let params = JacobiParams::from_rational(alpha.clone(), beta.clone())?;
    Ok(SphereContext {
        n,
        d,
        c,
        m_focal: None,
        alpha,
        beta,
        params,
    })
}

impl SphereContext {
    /// Attaches the minimal focal-set dimension `m`, `0 <= m <= n - 2`.
    pub fn with_focal_dimension(mut self, m: i64) -> Result<Self> {
        check_focal(self.n, m)?;
        self.m_focal = Some(m);
        Ok(self)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn m_focal(&self) -> Option<i64> {
        self.m_focal
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn params(&self) -> &JacobiParams {
        &self.params
    }

    /// `q_f` for the attached focal dimension, if any.
    pub fn supercritical_threshold(&self) -> Option<Threshold> {
        self.m_focal
            .map(|m| supercritical_threshold(self.n, m).expect("validated on attach"))
    }
}

/// `mu_{di} = -d i (n + d i - 1)`, the eigenvalue of the Laplacian on
/// `f`-invariant functions.
pub fn sphere_eigenvalue(i: u32, ctx: &SphereContext) -> BigRational {
    let di = ctx.d * i64::from(i);
    BigRational::from_integer(BigInt::from(-di * (ctx.n + di - 1)))
}

/// `|(-mu_{di} / d^2) - i (i + alpha + beta + 1)|`, identically zero.
///
/// `q` does not enter the identity; both sides are the numerators of
/// `lambda_i` after dividing by `q - 1`.
pub fn consistency_check(i: u32, ctx: &SphereContext, q: f64) -> Result<f64> {
    if i == 0 {
        return Err(Error::OutOfRange("consistency_check needs i >= 1".into()));
    }
    if !(q > 1.0) {
        return Err(Error::OutOfRange(format!("q = {q} must exceed 1")));
    }
    let residual = exact_consistency_residual(i, ctx);
    Ok(ratio_to_f64(&residual.abs()))
}

pub(crate) fn exact_consistency_residual(i: u32, ctx: &SphereContext) -> BigRational {
    let lhs = -sphere_eigenvalue(i, ctx) / ratio(ctx.d * ctx.d, 1);
    let ir = ratio(i64::from(i), 1);
    let rhs = &ir * (&ir + &ctx.alpha + &ctx.beta + ratio(1, 1));
    lhs - rhs
}

/// `q_f = (n - m + 2)/(n - m - 2)`, or infinity when `m = n - 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Threshold {
    Finite(#[serde(serialize_with = "ser_ratio")] BigRational),
    Infinite,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl Threshold {
    pub fn to_f64(&self) -> f64 {
        match self {
            Threshold::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            Threshold::Infinite => f64::INFINITY,
        }
    }

    /// `q < q_f`.
    pub fn admits(&self, q: f64) -> bool {
        q < self.to_f64()
    }
}

pub fn supercritical_threshold(n: i64, m_focal: i64) -> Result<Threshold> {
    check_focal(n, m_focal)?;
    if m_focal == n - 2 {
        Ok(Threshold::Infinite)
    } else {
        Ok(Threshold::Finite(ratio(n - m_focal + 2, n - m_focal - 2)))
    }
}

fn check_focal(n: i64, m: i64) -> Result<()> {
    if m < 0 || m > n - 2 {
        return Err(Error::OutOfRange(format!(
            "focal dimension m = {m} outside [0, {}]",
            n - 2
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_map_examples() {
        let ctx = params_from_sphere(3, 1, 0).unwrap();
        assert_eq!((ctx.alpha(), ctx.beta()), (&ratio(1, 2), &ratio(1, 2)));
        let ctx = params_from_sphere(5, 2, 0).unwrap();
        assert_eq!((ctx.alpha(), ctx.beta()), (&ratio(1, 2), &ratio(1, 2)));
        let ctx = params_from_sphere(7, 2, -2).unwrap();
        assert_eq!((ctx.alpha(), ctx.beta()), (&ratio(3, 2), &ratio(1, 2)));
        assert_eq!(ctx.params().alpha(), 1.5);
    }

    #[test]
    fn parameter_map_errors() {
        assert_eq!(params_from_sphere(3, 5, 0).unwrap_err(), Error::InvalidDegree(5));
        assert_eq!(params_from_sphere(5, 2, 2).unwrap_err(), Error::PositiveC(2));
        assert_eq!(params_from_sphere(2, 1, 0).unwrap_err(), Error::InvalidDimension(2));
        // alpha + beta = 1/2 and beta - alpha = -3, so beta = -5/4
        assert!(matches!(
            params_from_sphere(4, 2, -6),
            Err(Error::NonIntegrableWeight(_))
        ));
    }

    #[test]
    fn eigenvalue_examples() {
        let ctx = params_from_sphere(3, 1, 0).unwrap();
        assert_eq!(sphere_eigenvalue(1, &ctx), ratio(-3, 1));
        assert_eq!(sphere_eigenvalue(0, &ctx), ratio(0, 1));
        let ctx = params_from_sphere(5, 2, 0).unwrap();
        assert_eq!(sphere_eigenvalue(2, &ctx), ratio(-32, 1));
    }

    #[test]
    fn consistency_examples() {
        let ctx = params_from_sphere(3, 1, 0).unwrap();
        assert_eq!(consistency_check(1, &ctx, 3.0).unwrap(), 0.0);
        let ctx = params_from_sphere(5, 2, 0).unwrap();
        assert_eq!(consistency_check(2, &ctx, 2.0).unwrap(), 0.0);
        let ctx = params_from_sphere(7, 2, -2).unwrap();
        assert_eq!(consistency_check(3, &ctx, 2.0).unwrap(), 0.0);
        assert!(consistency_check(0, &ctx, 2.0).is_err());
        assert!(consistency_check(1, &ctx, 1.0).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(supercritical_threshold(3, 0).unwrap(), Threshold::Finite(ratio(5, 1)));
        assert_eq!(supercritical_threshold(4, 2).unwrap(), Threshold::Infinite);
        assert_eq!(supercritical_threshold(6, 0).unwrap(), Threshold::Finite(ratio(2, 1)));
        assert!(supercritical_threshold(6, 5).is_err());
        assert!(supercritical_threshold(6, -1).is_err());
    }
}
