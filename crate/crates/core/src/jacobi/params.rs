use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponents of the weight `(1-t)^alpha (1+t)^beta` on `[-1, 1]`.
///
/// When both exponents are rational an exact mirror is kept alongside the
/// floats; the exact polynomial and moment routines require it.
#[derive(Clone, PartialEq)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
    exact: Option<(BigRational, BigRational)>,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_integrable(alpha, beta)?;
        Ok(Self {
            alpha,
            beta,
            exact: None,
        })
    }

    pub fn from_rational(alpha: BigRational, beta: BigRational) -> Result<Self> {
        let a = ratio_to_f64(&alpha);
        let b = ratio_to_f64(&beta);
        let minus_one = -BigRational::one();
        if alpha <= minus_one || beta <= minus_one {
            return Err(Error::NonIntegrableWeight(format!(
                "alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self {
            alpha: a,
            beta: b,
            exact: Some((alpha, beta)),
        })
    }

    /// Parses both exponents from text (`"1/2"`, `"-0.4"`, `"3"`), keeping
    /// the exact mirror.
    pub fn parse(alpha: &str, beta: &str) -> Result<Self> {
        Self::from_rational(parse_rational(alpha)?, parse_rational(beta)?)
    }

    pub fn from_ratios(alpha: (i64, i64), beta: (i64, i64)) -> Result<Self> {
        Self::from_rational(ratio(alpha.0, alpha.1), ratio(beta.0, beta.1))
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `alpha + beta + 1`.
    #[inline]
    pub fn a(&self) -> f64 {
        self.alpha + self.beta + 1.0
    }

    /// `alpha - beta`.
    #[inline]
    pub fn b(&self) -> f64 {
        self.alpha - self.beta
    }

    pub fn exact(&self) -> Option<(&BigRational, &BigRational)> {
        self.exact.as_ref().map(|(a, b)| (a, b))
    }

    pub(crate) fn require_exact(&self) -> Result<(&BigRational, &BigRational)> {
        self.exact().ok_or(Error::IrrationalParams)
    }

    /// Parameters of the derivative family, `(alpha + s, beta + s)`.
    pub fn shifted(&self, s: u32) -> Self {
        let sf = f64::from(s);
        let exact = self.exact.as_ref().map(|(a, b)| {
            let sr = BigRational::from_integer(BigInt::from(s));
            (a + &sr, b + &sr)
        });
        Self {
            alpha: self.alpha + sf,
            beta: self.beta + sf,
            exact,
        }
    }

    /// `alpha == beta`, decided exactly when possible.
    pub fn is_symmetric(&self) -> bool {
        match &self.exact {
            Some((a, b)) => a == b,
            None => self.alpha == self.beta,
        }
    }

    /// Standing hypotheses `alpha >= beta`, `alpha + beta + 1 > 0`.
    pub fn satisfies_gasper_hypotheses(&self) -> bool {
        match &self.exact {
            Some((a, b)) => a >= b && (a + b + BigRational::one()).is_positive(),
            None => self.alpha >= self.beta && self.a() > 0.0,
        }
    }

    pub fn require_gasper_hypotheses(&self) -> Result<()> {
        if self.satisfies_gasper_hypotheses() {
            Ok(())
        } else {
            Err(Error::HypothesisViolation {
                alpha: self.alpha,
                beta: self.beta,
            })
        }
    }

    pub(crate) fn cache_key(&self) -> (u64, u64) {
        (self.alpha.to_bits(), self.beta.to_bits())
    }
}

impl fmt::Debug for JacobiParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some((a, b)) => write!(f, "JacobiParams(alpha = {a}, beta = {b})"),
            None => write!(f, "JacobiParams(alpha = {}, beta = {})", self.alpha, self.beta),
        }
    }
}

impl Serialize for JacobiParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("JacobiParams", 2)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("beta", &self.beta)?;
        st.end()
    }
}

fn check_integrable(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::NonIntegrableWeight(format!(
            "alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok(())
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, integers and plain decimals such as `"-0.75"` into an
/// exact rational. Exponent notation is not accepted.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::InvalidConfig(format!("cannot parse '{text}' as a rational number"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-0.4").unwrap(), ratio(-2, 5));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
        assert_eq!(parse_rational(".25").unwrap(), ratio(1, 4));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn rejects_non_integrable_weights() {
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
        assert!(JacobiParams::parse("0", "-1").is_err());
        assert!(JacobiParams::new(f64::NAN, 0.0).is_err());
        let p = JacobiParams::parse("3/2", "1/2").unwrap();
        assert_eq!(p.a(), 3.0);
        assert_eq!(p.b(), 1.0);
    }

    #[test]
    fn hypotheses() {
        assert!(JacobiParams::parse("1", "0").unwrap().satisfies_gasper_hypotheses());
        assert!(!JacobiParams::parse("0", "1").unwrap().satisfies_gasper_hypotheses());
        assert!(!JacobiParams::parse("-0.6", "-0.6").unwrap().satisfies_gasper_hypotheses());
    }
}
