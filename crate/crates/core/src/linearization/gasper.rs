//! Sign structure behind the positivity of the linearization coefficients
//! when `alpha > beta`.
//!
//! With `a = alpha + beta + 1`, `b = alpha - beta` the coefficients `d_j`
//! (positive multiples of the `C_k^j`) obey a three-term recurrence
//! `A_j d_{j+1} = B_j d_j + C_j d_{j-1}` with `A_j, C_j > 0`. The middle
//! coefficient satisfies `(2j+1+a)(2j-1+a) B_j = b Q(j-1)` for the quartic
//! `Q` below, whose single positive root splits the range of `j` into a part
//! where the recurrence propagates positivity upward and a part where it
//! propagates downward.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::params::ratio_to_f64;

#[derive(Clone, Debug)]
pub struct GasperQuartic {
    pub k: usize,
    pub a: f64,
    /// Coefficients of `J^0 .. J^4`.
    pub coeffs: [f64; 5],
    pub exact: Option<[BigRational; 5]>,
}

fn expanded_f64(k: f64, a: f64) -> [f64; 5] {
    [
        4.0 * (k + 3.0 * k * a + 3.0 * a + 1.0) * (k - 1.0) + 4.0 * a * k + 4.0 * a * a * (3.0 * k - 2.0),
        8.0 * k * (k + a) * (a + 2.0) - 14.0 * a * a - 38.0 * a - 20.0,
        8.0 * k * (k + a) - 6.0 * a * a - 38.0 * a - 34.0,
        -12.0 * (a + 2.0),
        -6.0,
    ]
}

fn expanded_exact(k: usize, a: &BigRational) -> [BigRational; 5] {
    let r = |n: i64| BigRational::from_integer(BigInt::from(n));
    let k = BigRational::from_integer(BigInt::from(k));
    let a2 = a * a;
    [
        r(4) * (&k + r(3) * &k * a + r(3) * a + r(1)) * (&k - r(1))
            + r(4) * a * &k
            + r(4) * &a2 * (r(3) * &k - r(2)),
        r(8) * &k * (&k + a) * (a + r(2)) - r(14) * &a2 - r(38) * a - r(20),
        r(8) * &k * (&k + a) - r(6) * &a2 - r(38) * a - r(34),
        -r(12) * (a + r(2)),
        r(-6),
    ]
}

pub fn gasper_quartic(k: usize, a: f64) -> Result<GasperQuartic> {
    if k < 2 {
        return Err(Error::KTooSmall(k));
    }
    if !(a > 0.0) {
        return Err(Error::NonPositiveA(a));
    }
    Ok(GasperQuartic {
        k,
        a,
        coeffs: expanded_f64(k as f64, a),
        exact: None,
    })
}

pub fn gasper_quartic_exact(k: usize, a: &BigRational) -> Result<GasperQuartic> {
    let af = ratio_to_f64(a);
    if k < 2 {
        return Err(Error::KTooSmall(k));
    }
    if !a.is_positive() {
        return Err(Error::NonPositiveA(af));
    }
    let exact = expanded_exact(k, a);
    Ok(GasperQuartic {
        k,
        a: af,
        coeffs: std::array::from_fn(|i| ratio_to_f64(&exact[i])),
        exact: Some(exact),
    })
}

impl GasperQuartic {
    /// `(J+2)^2 (J+2k+2a+1)(2k-J-1)(2J+a+1) - (J+1)^2 (J+2k+2a)(2k-J)(2J+a+3)`.
    pub fn eval_factored(&self, j: f64) -> f64 {
        let (k, a) = (self.k as f64, self.a);
        (j + 2.0).powi(2) * (j + 2.0 * k + 2.0 * a + 1.0) * (2.0 * k - j - 1.0) * (2.0 * j + a + 1.0)
            - (j + 1.0).powi(2) * (j + 2.0 * k + 2.0 * a) * (2.0 * k - j) * (2.0 * j + a + 3.0)
    }

    pub fn eval_expanded(&self, j: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * j + c)
    }

    /// Exact factored form, for rational `a`.
    pub fn eval_factored_exact(&self, j: &BigRational) -> Option<BigRational> {
        let exact = self.exact.as_ref()?;
        let r = |n: i64| BigRational::from_integer(BigInt::from(n));
        // recover a from the J^3 coefficient -12(a+2)
        let a = -&exact[3] / r(12) - r(2);
        let k = BigRational::from_integer(BigInt::from(self.k));
        let two = r(2);
        let lhs = (j + &two) * (j + &two) * (j + &two * &k + &two * &a + r(1))
            * (&two * &k - j - r(1))
            * (&two * j + &a + r(1));
        let rhs = (j + r(1)) * (j + r(1)) * (j + &two * &k + &two * &a)
            * (&two * &k - j)
            * (&two * j + &a + r(3));
        Some(lhs - rhs)
    }

    pub fn eval_expanded_exact(&self, j: &BigRational) -> Option<BigRational> {
        let exact = self.exact.as_ref()?;
        Some(exact.iter().rev().fold(BigRational::zero(), |acc, c| acc * j + c))
    }

    /// Sign changes in the coefficient sequence, zeros skipped.
    pub fn coefficient_sign_changes(&self) -> usize {
        let signs: Vec<bool> = self
            .coeffs
            .iter()
            .filter(|c| **c != 0.0)
            .map(|c| *c > 0.0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Outcome of [`quartic_sign_structure`].
#[derive(Clone, Debug, Serialize)]
pub struct QuarticVerdict {
    pub q_at_zero: f64,
    pub positive_root: f64,
    pub sign_changes: usize,
    /// Degree (2 or 3) at which the coefficient sequence turns negative.
    pub sign_change_at: usize,
}

/// Locates the unique positive root `x0` of `Q` and checks `Q > 0` on
/// `(0, x0)`, `Q < 0` on `(x0, x0 + 4k]`.
pub fn quartic_sign_structure(gq: &GasperQuartic) -> Result<(f64, QuarticVerdict)> {
    let fail = |msg: String| Err(Error::StructureViolation(msg));
    let c = &gq.coeffs;
    if !(c[4] < 0.0 && c[3] < 0.0) {
        return fail(format!("leading coefficients not negative: {c:?}"));
    }
    if !(c[1] > 0.0 && c[0] > 0.0) {
        return fail(format!("low-order coefficients not positive: {c:?}"));
    }
    let sign_changes = gq.coefficient_sign_changes();
    if sign_changes != 1 {
        return fail(format!("{sign_changes} sign changes in {c:?}"));
    }
    let sign_change_at = if c[2] > 0.0 { 3 } else { 2 };
    let q0 = gq.eval_expanded(0.0);
    if !(q0 > 0.0) {
        return fail(format!("Q(0) = {q0} is not positive"));
    }

    let mut hi = 1.0;
    while gq.eval_expanded(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return fail("no sign change found on (0, 1e12]".into());
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if gq.eval_expanded(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x0 = 0.5 * (lo + hi);

    const SAMPLES: usize = 256;
    let band = 1e-9 * x0.max(1.0);
    for i in 1..SAMPLES {
        let x = (x0 - band) * i as f64 / SAMPLES as f64;
        if gq.eval_expanded(x) <= 0.0 {
            return fail(format!("Q({x}) <= 0 left of the root {x0}"));
        }
    }
    let right = 4.0 * gq.k as f64;
    for i in 1..=SAMPLES {
        let x = x0 + band + (right - band) * i as f64 / SAMPLES as f64;
        if gq.eval_expanded(x) >= 0.0 {
            return fail(format!("Q({x}) >= 0 right of the root {x0}"));
        }
    }
    Ok((
        x0,
        QuarticVerdict {
            q_at_zero: q0,
            positive_root: x0,
            sign_changes,
            sign_change_at,
        },
    ))
}

/// `(A_j, B_j, C_j)` of the three-term recurrence for the `d_j`, `1 <= j <= 2k-1`.
pub fn gasper_recurrence_coefficients(
    k: usize,
    alpha: f64,
    beta: f64,
    j: usize,
) -> Result<(f64, f64, f64)> {
    if j == 0 || j >= 2 * k {
        return Err(Error::OutOfRange(format!(
            "j = {j} outside [1, {}]",
            (2 * k).saturating_sub(1)
        )));
    }
    let a = alpha + beta + 1.0;
    let b = alpha - beta;
    let (k, j) = (k as f64, j as f64);
    let big_a = (j + 1.0) * (2.0 * j + 1.0 + a + b) * (2.0 * k + j + 1.0 + a) * (2.0 * k - j - 1.0 + a)
        * (j + 1.0)
        / ((2.0 * j + 1.0 + a) * (2.0 * j + 2.0 + a));
    let big_b = b
        * ((j + 1.0).powi(2) * (2.0 * k + j + 2.0 * a) * (2.0 * k - j) / (2.0 * j + 1.0 + a)
            - j * j * (2.0 * k + j - 1.0 + 2.0 * a) * (2.0 * k - j + 1.0) / (2.0 * j - 1.0 + a));
    let big_c = (j - 1.0 + a) * (2.0 * j + 2.0 * beta) * (2.0 * k + j - 1.0 + 2.0 * a)
        * (2.0 * k - j + 1.0)
        * (j - 1.0 + a)
        / ((2.0 * j - 2.0 + a) * (2.0 * j - 1.0 + a));
    Ok((big_a, big_b, big_c))
}
