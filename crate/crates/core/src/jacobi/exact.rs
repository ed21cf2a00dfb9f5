//! Exact rational polynomials, the Jacobi operator `L` acting on them, and
//! moments of the Jacobi weight.
//!
//! Weighted integrals are represented relative to the total mass
//! `m_0 = \int (1-t)^alpha (1+t)^beta dt`: the ratios `m_j / m_0` are rational
//! whenever `alpha` and `beta` are, even though `m_0` itself usually is not.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::params::{ratio_to_f64, JacobiParams};
use crate::error::Result;

/// Polynomial with exact rational coefficients, `coeffs[j]` multiplying `t^j`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExactPolynomial {
    coeffs: Vec<BigRational>,
}

impl ExactPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = BigRational::one();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, j: usize) -> BigRational {
        self.coeffs.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    /// Exact evaluation at a float argument (every finite `f64` is rational),
    /// rounded once at the end.
    pub fn eval_f64(&self, t: f64) -> f64 {
        let tr = BigRational::from_float(t).expect("finite argument");
        ratio_to_f64(&self.eval(&tr))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * BigInt::from(j))
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(ratio_to_f64).collect()
    }

    /// True when every nonzero coefficient sits at a degree of the given parity.
    pub fn has_parity(&self, odd: bool) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(j, c)| c.is_zero() || (j % 2 == 1) == odd)
    }
}

impl Add for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn add(self, rhs: &ExactPolynomial) -> ExactPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPolynomial::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Sub for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn sub(self, rhs: &ExactPolynomial) -> ExactPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPolynomial::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Mul for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn mul(self, rhs: &ExactPolynomial) -> ExactPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return ExactPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ExactPolynomial::new(out)
    }
}

/// Image of `p` under `L(y) = (1-t^2) y'' + (beta - alpha - (alpha+beta+2) t) y'`.
pub fn apply_l(p: &ExactPolynomial, params: &JacobiParams) -> Result<ExactPolynomial> {
    let (alpha, beta) = params.require_exact()?;
    let a = alpha + beta + BigRational::one();
    let b_minus_a = beta - alpha;
    let n = p.coeffs.len();
    let mut out = vec![BigRational::zero(); n];
    // L(t^j) = -j(j+a) t^j + j(beta-alpha) t^{j-1} + j(j-1) t^{j-2}
    for (j, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() || j == 0 {
            continue;
        }
        let jr = BigRational::from_integer(BigInt::from(j));
        out[j] -= c * &jr * (&jr + &a);
        out[j - 1] += c * &jr * &b_minus_a;
        if j >= 2 {
            out[j - 2] += c * BigRational::from_integer(BigInt::from(j * (j - 1)));
        }
    }
    Ok(ExactPolynomial::new(out))
}

/// Pochhammer symbol `(x)_k / k!`.
pub(crate) fn pochhammer_over_factorial(x: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        let ir = BigRational::from_integer(BigInt::from(i));
        acc = acc * (x + &ir) / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

/// Exact monomial coefficients of `P_k^{(alpha, beta)}`.
///
/// The degree-`k` eigenpolynomial of `L` is built from its leading term
/// downward: matching `t^j` in `L p = -k(k+a) p` gives
/// `(k-j)(k+j+a) p_j = -(j+1)(beta-alpha) p_{j+1} - (j+2)(j+1) p_{j+2}`,
/// and `(k-j)(k+j+a) != 0` for `j < k`. The result is rescaled so that
/// `p(1) = (alpha+1)_k / k!`.
pub fn exact_coeffs(k: usize, params: &JacobiParams) -> Result<ExactPolynomial> {
    let (alpha, beta) = params.require_exact()?;
    let a = alpha + beta + BigRational::one();
    let b_minus_a = beta - alpha;
    let kr = BigRational::from_integer(BigInt::from(k));
    let mut p = vec![BigRational::zero(); k + 1];
    p[k] = BigRational::one();
    for j in (0..k).rev() {
        let jr = BigRational::from_integer(BigInt::from(j));
        let mut rhs = -(BigRational::from_integer(BigInt::from(j + 1)) * &b_minus_a * &p[j + 1]);
        if j + 2 <= k {
            rhs -= BigRational::from_integer(BigInt::from((j + 2) * (j + 1))) * &p[j + 2];
        }
        let denom = (&kr - &jr) * (&kr + &jr + &a);
        p[j] = rhs / denom;
    }
    let at_one: BigRational = p.iter().fold(BigRational::zero(), |acc, c| acc + c);
    let target = pochhammer_over_factorial(&(alpha + BigRational::one()), k);
    let scale = target / at_one;
    Ok(ExactPolynomial::new(p.into_iter().map(|c| c * &scale).collect()))
}

/// Moments of the Jacobi weight normalised by the total mass.
///
/// Integrating `d/dt[t^j (1-t^2) w]` over `[-1, 1]` gives
/// `(j + alpha + beta + 2) m_{j+1} = (beta - alpha) m_j + j m_{j-1}`.
#[derive(Clone, Debug)]
pub struct WeightMoments {
    alpha: BigRational,
    beta: BigRational,
    normalized: Vec<BigRational>,
}

impl WeightMoments {
    pub fn new(params: &JacobiParams) -> Result<Self> {
        let (alpha, beta) = params.require_exact()?;
        Ok(Self {
            alpha: alpha.clone(),
            beta: beta.clone(),
            normalized: vec![BigRational::one()],
        })
    }

    fn ensure(&mut self, degree: usize) {
        let two = BigRational::from_integer(BigInt::from(2));
        while self.normalized.len() <= degree {
            let j = self.normalized.len() - 1;
            let jr = BigRational::from_integer(BigInt::from(j));
            let mut next = (&self.beta - &self.alpha) * &self.normalized[j];
            if j >= 1 {
                next += &jr * &self.normalized[j - 1];
            }
            next /= &jr + &self.alpha + &self.beta + &two;
            self.normalized.push(next);
        }
    }

    /// `m_j / m_0`.
    pub fn normalized(&mut self, j: usize) -> BigRational {
        self.ensure(j);
        self.normalized[j].clone()
    }

    /// `\int p w dt / m_0`.
    pub fn integral_over_mass(&mut self, p: &ExactPolynomial) -> BigRational {
        if let Some(d) = p.degree() {
            self.ensure(d);
        }
        p.coeffs()
            .iter()
            .zip(&self.normalized)
            .fold(BigRational::zero(), |acc, (c, m)| acc + c * m)
    }

    /// The total mass as an exact rational, available when both exponents are
    /// nonnegative integers: `2^{alpha+beta+1} alpha! beta! / (alpha+beta+1)!`.
    pub fn mass_exact(&self) -> Option<BigRational> {
        if !(self.alpha.is_integer() && self.beta.is_integer()) {
            return None;
        }
        if self.alpha.is_negative() || self.beta.is_negative() {
            return None;
        }
        let al = self.alpha.to_integer().to_usize()?;
        let be = self.beta.to_integer().to_usize()?;
        let fact = |n: usize| (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
        let num = num_traits::pow(BigInt::from(2), al + be + 1) * fact(al) * fact(be);
        let den = fact(al + be + 1);
        let g = num.gcd(&den);
        Some(BigRational::new(num / &g, den / g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::params::ratio;

    fn poly(c: &[(i64, i64)]) -> ExactPolynomial {
        ExactPolynomial::new(c.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    #[test]
    fn first_jacobi_polynomials() {
        let p10 = JacobiParams::parse("1", "0").unwrap();
        assert_eq!(exact_coeffs(1, &p10).unwrap(), poly(&[(1, 2), (3, 2)]));
        let leg = JacobiParams::parse("0", "0").unwrap();
        assert_eq!(exact_coeffs(2, &leg).unwrap(), poly(&[(-1, 2), (0, 1), (3, 2)]));
        assert_eq!(exact_coeffs(0, &p10).unwrap(), poly(&[(1, 1)]));
    }

    #[test]
    fn operator_examples() {
        let p10 = JacobiParams::parse("1", "0").unwrap();
        let t = ExactPolynomial::monomial(1);
        assert_eq!(apply_l(&t, &p10).unwrap(), poly(&[(-1, 1), (-3, 1)]));
        assert!(apply_l(&poly(&[(1, 1)]), &p10).unwrap().is_zero());
        let leg = JacobiParams::parse("0", "0").unwrap();
        let p2 = exact_coeffs(2, &leg).unwrap();
        assert_eq!(apply_l(&p2, &leg).unwrap(), p2.scale(&ratio(-6, 1)));
    }

    #[test]
    fn irrational_params_rejected() {
        let p = JacobiParams::new(0.5, 0.5).unwrap();
        assert!(exact_coeffs(2, &p).is_err());
        assert!(apply_l(&ExactPolynomial::monomial(1), &p).is_err());
        assert!(WeightMoments::new(&p).is_err());
    }

    #[test]
    fn legendre_moments() {
        // int t^j dt / 2 = 1/(j+1) for even j
        let mut m = WeightMoments::new(&JacobiParams::parse("0", "0").unwrap()).unwrap();
        for j in 0..12 {
            let expected = if j % 2 == 0 { ratio(1, j as i64 + 1) } else { ratio(0, 1) };
            assert_eq!(m.normalized(j), expected);
        }
        assert_eq!(m.mass_exact(), Some(ratio(2, 1)));
        let m10 = WeightMoments::new(&JacobiParams::parse("1", "0").unwrap()).unwrap();
        assert_eq!(m10.mass_exact(), Some(ratio(2, 1)));
    }
}
