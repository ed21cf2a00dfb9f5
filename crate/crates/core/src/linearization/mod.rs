//! Linearization coefficients of `P_k^2` and the cube integral
//! `\int P_k^3 (1-t)^alpha (1+t)^beta dt`.
//!
//! Every quantity has a floating route (Gauss quadrature) and, for rational
//! exponents, an exact route through monomial expansion and normalised
//! weight moments. The two are never mixed: the exact values are kept as a
//! separate mirror so that callers can compare them.

pub mod gasper;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

pub use gasper::{
    gasper_quartic, gasper_quartic_exact, gasper_recurrence_coefficients,
    quartic_sign_structure, GasperQuartic, QuarticVerdict,
};

use crate::error::Result;
use crate::jacobi::params::ratio_to_f64;
use crate::jacobi::{
    default_order, eval_all, exact_coeffs, gauss_jacobi_rule, weight_mass, JacobiParams,
    WeightMoments,
};

/// Exact mirror of a [`LinearizationTable`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExactLinearization {
    pub coeffs: Vec<BigRational>,
    /// `h_k / m_0`.
    pub norm_over_mass: BigRational,
    /// `I_3 / m_0`.
    pub cube_over_mass: BigRational,
}

/// `P_k^2 = \sum_{i=0}^{2k} C_k^i P_i`, with `h_k` and the cube integral.
#[derive(Clone, Debug)]
pub struct LinearizationTable {
    pub k: usize,
    pub params: JacobiParams,
    pub coeffs: Vec<f64>,
    pub norm: f64,
    pub cube_integral: f64,
    pub exact: Option<ExactLinearization>,
}

impl LinearizationTable {
    /// `I_3 - C_k^k h_k`, zero by orthogonality.
    pub fn collapse_defect(&self) -> f64 {
        self.cube_integral - self.coeffs[self.k] * self.norm
    }
}

fn quadrature_order(k: usize) -> usize {
    default_order(3 * k)
}

// P_k^2 P_i has degree up to 4k
fn projection_order(k: usize) -> usize {
    default_order(4 * k)
}

/// Floating linearization coefficients plus the exact mirror when the
/// exponents are rational.
pub fn linearization_coeffs(k: usize, params: &JacobiParams) -> Result<LinearizationTable> {
    let (coeffs, norm, cube) = float_linearization(k, params)?;
    let exact = match params.exact() {
        Some(_) => Some(exact_linearization(k, params)?),
        None => None,
    };
    Ok(LinearizationTable {
        k,
        params: params.clone(),
        coeffs,
        norm,
        cube_integral: cube,
        exact,
    })
}

/// Quadrature-only route.
pub fn float_linearization(k: usize, params: &JacobiParams) -> Result<(Vec<f64>, f64, f64)> {
    let rule = gauss_jacobi_rule(params, projection_order(k))?;
    let len = 2 * k + 1;
    let mut projections = vec![0.0; len];
    let mut norms = vec![0.0; len];
    let mut cube = 0.0;
    let mut buf = vec![0.0; len];
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        eval_all(params, t, &mut buf);
        let pk = buf[k];
        let sq = pk * pk;
        cube += w * sq * pk;
        for i in 0..len {
            projections[i] += w * sq * buf[i];
            norms[i] += w * buf[i] * buf[i];
        }
    }
    let coeffs = projections.iter().zip(&norms).map(|(p, h)| p / h).collect();
    Ok((coeffs, norms[k], cube))
}

/// Rational route: expand `P_k^2` in monomials and integrate moments.
pub fn exact_linearization(k: usize, params: &JacobiParams) -> Result<ExactLinearization> {
    let mut moments = WeightMoments::new(params)?;
    let pk = exact_coeffs(k, params)?;
    let sq = &pk * &pk;
    let mut coeffs = Vec::with_capacity(2 * k + 1);
    let mut norm_over_mass = BigRational::zero();
    let mut cube_over_mass = BigRational::zero();
    for i in 0..=2 * k {
        let pi = if i == k { pk.clone() } else { exact_coeffs(i, params)? };
        let hi = moments.integral_over_mass(&(&pi * &pi));
        let proj = moments.integral_over_mass(&(&sq * &pi));
        if i == k {
            norm_over_mass = hi.clone();
            cube_over_mass = proj.clone();
        }
        coeffs.push(proj / hi);
    }
    Ok(ExactLinearization {
        coeffs,
        norm_over_mass,
        cube_over_mass,
    })
}

/// `I_3 = \int P_k^3 w dt` by quadrature of order `ceil((3k+1)/2) + 2`.
pub fn cube_integral(k: usize, params: &JacobiParams) -> Result<f64> {
    let rule = gauss_jacobi_rule(params, quadrature_order(k))?;
    let mut buf = vec![0.0; k + 1];
    Ok(rule.integrate(|t| {
        eval_all(params, t, &mut buf);
        buf[k].powi(3)
    }))
}

/// Exact cube integral as `(I_3 / m_0, m_0)`; the float mass is attached so
/// that callers can form `I_3` itself.
pub fn cube_integral_exact(k: usize, params: &JacobiParams) -> Result<(BigRational, f64)> {
    let mut moments = WeightMoments::new(params)?;
    let pk = exact_coeffs(k, params)?;
    let cube = &(&pk * &pk) * &pk;
    Ok((moments.integral_over_mass(&cube), weight_mass(params)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Positive,
    Zero,
    Negative,
}

impl SignClass {
    fn of_float(x: f64, band: f64) -> Self {
        if x.abs() <= band {
            SignClass::Zero
        } else if x > 0.0 {
            SignClass::Positive
        } else {
            SignClass::Negative
        }
    }

    fn of_exact(x: &BigRational) -> Self {
        if x.is_zero() {
            SignClass::Zero
        } else if x.is_positive() {
            SignClass::Positive
        } else {
            SignClass::Negative
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SignDiscrepancy {
    pub index: usize,
    pub expected: SignClass,
    pub observed: SignClass,
}

/// Signs of `C_k^i` compared against the positivity pattern for
/// `alpha >= beta`, `alpha + beta + 1 > 0`: when `alpha = beta` the odd
/// coefficients vanish and the even ones are positive, otherwise all are
/// positive.
#[derive(Clone, Debug, Serialize)]
pub struct SignReport {
    pub k: usize,
    pub exact: bool,
    pub classes: Vec<SignClass>,
    pub expected: Vec<SignClass>,
    pub cube_sign: SignClass,
    pub expected_cube_sign: SignClass,
    pub discrepancies: Vec<SignDiscrepancy>,
}

impl SignReport {
    pub fn agrees(&self) -> bool {
        self.discrepancies.is_empty() && self.cube_sign == self.expected_cube_sign
    }
}

/// Relative width of the band classified as zero for float coefficients.
pub const ZERO_BAND: f64 = 1e-12;

pub fn sign_classification(k: usize, params: &JacobiParams) -> Result<SignReport> {
    params.require_gasper_hypotheses()?;
    let table = linearization_coeffs(k, params)?;
    Ok(classify(&table))
}

pub fn classify(table: &LinearizationTable) -> SignReport {
    let k = table.k;
    let symmetric = table.params.is_symmetric();
    let expected: Vec<SignClass> = (0..=2 * k)
        .map(|i| {
            if symmetric && i % 2 == 1 {
                SignClass::Zero
            } else {
                SignClass::Positive
            }
        })
        .collect();
    let expected_cube_sign = if symmetric && k % 2 == 1 {
        SignClass::Zero
    } else {
        SignClass::Positive
    };

    let (classes, cube_sign): (Vec<SignClass>, SignClass) = match &table.exact {
        Some(ex) => (
            ex.coeffs.iter().map(SignClass::of_exact).collect(),
            SignClass::of_exact(&ex.cube_over_mass),
        ),
        None => {
            let max = table.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let band = ZERO_BAND * max;
            let cube_band = ZERO_BAND * table.norm.powf(1.5);
            (
                table.coeffs.iter().map(|&c| SignClass::of_float(c, band)).collect(),
                SignClass::of_float(table.cube_integral, cube_band),
            )
        }
    };
    let discrepancies = classes
        .iter()
        .zip(&expected)
        .enumerate()
        .filter(|(_, (o, e))| o != e)
        .map(|(index, (&observed, &expected))| SignDiscrepancy {
            index,
            expected,
            observed,
        })
        .collect();
    SignReport {
        k,
        exact: table.exact.is_some(),
        classes,
        expected,
        cube_sign,
        expected_cube_sign,
        discrepancies,
    }
}

/// Float classification of a table regardless of any exact mirror.
pub fn classify_float(table: &LinearizationTable) -> SignReport {
    let stripped = LinearizationTable {
        exact: None,
        ..table.clone()
    };
    classify(&stripped)
}

/// Exact values converted to floats, for comparison with the quadrature route.
pub fn exact_as_f64(ex: &ExactLinearization) -> Vec<f64> {
    ex.coeffs.iter().map(ratio_to_f64).collect()
}
