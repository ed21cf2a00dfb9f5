//! Values checked against oracles that share no code with the library:
//! the explicit binomial sum for `P_k`, and exact polynomial integration
//! against integer-exponent weights.

use approx::assert_relative_eq;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use jacobi_bifurcation::continuation::{lambda_prime_zero, ProblemSpec};
use jacobi_bifurcation::jacobi::{eval_jacobi, weighted_norm_sq, JacobiParams};
use jacobi_bifurcation::linearization::{cube_integral, linearization_coeffs};

fn gbinom(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, i| {
        acc * (x - r(i as i64)) / r(i as i64 + 1)
    })
}

/// `P_n(x) = \sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^{n-s}`,
/// evaluated exactly at the binary values of `a`, `b`, `x`.
fn explicit_sum(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let q = |v: f64| BigRational::from_float(v).unwrap();
    let (a, b, x) = (q(a), q(b), q(x));
    let nr = r(n as i64);
    let two = r(2);
    let lo = (&x - r(1)) / &two;
    let hi = (&x + r(1)) / &two;
    let total = (0..=n).fold(BigRational::zero(), |acc, s| {
        let term = gbinom(&(&nr + &a), n - s)
            * gbinom(&(&nr + &b), s)
            * num_traits::pow(lo.clone(), s)
            * num_traits::pow(hi.clone(), n - s);
        acc + term
    });
    f(&total)
}

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

type Poly = Vec<BigRational>;

fn mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn pow(p: &Poly, e: usize) -> Poly {
    (0..e).fold(vec![BigRational::one()], |acc, _| mul(&acc, p))
}

fn binom_int(n: i64, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * r(n - i as i64) / r(i as i64 + 1))
}

/// Exact monomial form of `P_n^{(a, b)}` for integer `a, b` via the
/// explicit sum.
fn exact_jacobi(n: usize, a: i64, b: i64) -> Poly {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let xm = vec![-half.clone(), half.clone()];
    let xp = vec![half.clone(), half];
    let mut out = vec![BigRational::zero(); n + 1];
    for s in 0..=n {
        let c = binom_int(n as i64 + a, n - s) * binom_int(n as i64 + b, s);
        let term = mul(&pow(&xm, s), &pow(&xp, n - s));
        for (i, t) in term.into_iter().enumerate() {
            out[i] += &c * t;
        }
    }
    out
}

/// `\int_{-1}^1 p(t) (1-t)^a (1+t)^b dt` for integer `a, b >= 0`.
fn integrate(p: &Poly, a: usize, b: usize) -> BigRational {
    let w = mul(&pow(&vec![r(1), r(-1)], a), &pow(&vec![r(1), r(1)], b));
    mul(p, &w)
        .iter()
        .enumerate()
        .filter(|(j, _)| j % 2 == 0)
        .map(|(j, c)| c * r(2) / r(j as i64 + 1))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

#[test]
fn recurrence_matches_explicit_sum() {
    for &(a, b) in &[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0), (1.5, 0.5), (-0.4, -0.4), (0.3, -0.7)] {
        let p = JacobiParams::new(a, b).unwrap();
        for n in 0..=20 {
            for &x in &[-1.0, -0.73, -0.1, 0.0, 0.42, 0.9, 1.0] {
                let expected = explicit_sum(n, a, b, x);
                let got = eval_jacobi(n, &p, x);
                assert!(
                    (got - expected).abs() <= 1e-12 * expected.abs().max(1.0),
                    "P_{n}^({a},{b})({x}) = {got}, oracle {expected}"
                );
            }
        }
    }
}

#[test]
fn cube_and_norm_against_exact_integration() {
    for &(a, b) in &[(0usize, 0usize), (1, 0), (2, 1), (1, 1)] {
        let p = JacobiParams::new(a as f64, b as f64).unwrap();
        for k in 1..=6 {
            let pk = exact_jacobi(k, a as i64, b as i64);
            let h = integrate(&mul(&pk, &pk), a, b);
            let i3 = integrate(&mul(&mul(&pk, &pk), &pk), a, b);
            assert_relative_eq!(weighted_norm_sq(k, &p).unwrap(), f(&h), max_relative = 1e-13);
            let c3 = cube_integral(k, &p).unwrap();
            assert!((c3 - f(&i3)).abs() <= 1e-13 * f(&h).powf(1.5), "k = {k}, ({a}, {b})");
        }
    }
}

#[test]
fn known_cube_integrals() {
    // Legendre k = 2 and the (1, 0) family at k = 1
    let i3 = integrate(&pow(&exact_jacobi(2, 0, 0), 3), 0, 0);
    assert_eq!(i3, BigRational::new(BigInt::from(4), BigInt::from(35)));
    let leg = JacobiParams::parse("0", "0").unwrap();
    assert_relative_eq!(cube_integral(2, &leg).unwrap(), 4.0 / 35.0, max_relative = 1e-13);

    let i3 = integrate(&pow(&exact_jacobi(1, 1, 0), 3), 1, 0);
    assert_eq!(i3, BigRational::new(BigInt::from(2), BigInt::from(5)));
    let h1 = integrate(&pow(&exact_jacobi(1, 1, 0), 2), 1, 0);
    assert_eq!(h1, r(1));
    let p10 = JacobiParams::parse("1", "0").unwrap();
    assert_relative_eq!(cube_integral(1, &p10).unwrap(), 0.4, max_relative = 1e-13);
}

#[test]
fn slope_assembled_from_oracle_values() {
    // -q lambda_1 I3 / (2 h_1) with lambda_1 = 3, I3 = 2/5, h_1 = 1
    let spec = ProblemSpec::new(JacobiParams::parse("1", "0").unwrap(), 2.0).unwrap();
    let expected = -2.0 * 3.0 * 0.4 / 2.0;
    assert_relative_eq!(lambda_prime_zero(1, &spec).unwrap(), expected, max_relative = 1e-14);
}

#[test]
fn linearization_matches_exact_projection() {
    // C_k^i = \int P_k^2 P_i w / h_i
    for &(a, b) in &[(0usize, 0usize), (1, 0), (2, 1)] {
        let p = JacobiParams::new(a as f64, b as f64).unwrap();
        for k in 1..=5 {
            let table = linearization_coeffs(k, &p).unwrap();
            let pk = exact_jacobi(k, a as i64, b as i64);
            let sq = mul(&pk, &pk);
            for i in 0..=2 * k {
                let pi = exact_jacobi(i, a as i64, b as i64);
                let c = integrate(&mul(&sq, &pi), a, b) / integrate(&mul(&pi, &pi), a, b);
                let scale = table.coeffs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                assert!(
                    (table.coeffs[i] - f(&c)).abs() <= 1e-12 * scale,
                    "({a}, {b}) k = {k} i = {i}: {} vs {}",
                    table.coeffs[i],
                    f(&c)
                );
                if let Some(ex) = &table.exact {
                    assert_eq!(ex.coeffs[i], c);
                }
            }
        }
    }
}
