//! Level-set counts used to label solutions: the points where `u = 1` and
//! the interior critical points.

use serde::Serialize;

use super::problem::SpectralFunction;
use crate::error::{Error, Result};

const GRID_FACTOR: usize = 8;
const TRANSVERSALITY: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    LocalMin,
    LocalMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub t: f64,
    pub value: f64,
    pub kind: Extremum,
}

fn grid(n: usize) -> Vec<f64> {
    let g = (GRID_FACTOR * n).max(16);
    (0..g)
        .map(|j| -(std::f64::consts::PI * j as f64 / (g - 1) as f64).cos())
        .collect()
}

fn require_nonconstant(u: &SpectralFunction, grid: &[f64]) -> Result<()> {
    let du = grid.iter().fold(0.0_f64, |m, &t| m.max(u.derivative(t).abs()));
    let size = grid.iter().fold(0.0_f64, |m, &t| m.max(u.eval(t).abs()));
    if du <= 1e-14 * (1.0 + size) {
        return Err(Error::ConstantState);
    }
    Ok(())
}

/// Roots of `f` in `(-1, 1)` from sign changes on `grid`, polished by
/// bisection and checked against `|f'| > 1e-8 max|f'|`.
fn interior_roots<F, D>(grid: &[f64], f: F, df: D) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let slope_max = grid.iter().fold(0.0_f64, |m, &t| m.max(df(t).abs()));
    let tol = TRANSVERSALITY * slope_max;
    let last = grid.len() - 1;
    let mut roots = Vec::new();
    for j in 0..last {
        let (fa, fb) = (vals[j], vals[j + 1]);
        if fa == 0.0 {
            if j > 0 {
                roots.push(grid[j]);
            }
            continue;
        }
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (grid[j], grid[j + 1], fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    for &t in &roots {
        let d = df(t).abs();
        if !(d > tol) {
            return Err(Error::TangencyDetected { t, derivative: d });
        }
    }
    Ok(roots)
}

/// Points of `(-1, 1)` where `u = 1`, increasing.
pub fn crossing_points(u: &SpectralFunction) -> Result<Vec<f64>> {
    let g = grid(u.len());
    require_nonconstant(u, &g)?;
    interior_roots(&g, |t| u.eval(t) - 1.0, |t| u.derivative(t))
}

pub fn count_crossings(u: &SpectralFunction) -> Result<usize> {
    crossing_points(u).map(|r| r.len())
}

/// Interior zeros of `u'`, labelled by the sign of `u - 1` there.
pub fn critical_points(u: &SpectralFunction) -> Result<Vec<CriticalPoint>> {
    let g = grid(u.len());
    require_nonconstant(u, &g)?;
    let roots = interior_roots(&g, |t| u.derivative(t), |t| u.second_derivative(t))?;
    Ok(roots
        .into_iter()
        .map(|t| {
            let value = u.eval(t);
            let kind = if value < 1.0 || (value == 1.0 && u.second_derivative(t) > 0.0) {
                Extremum::LocalMin
            } else {
                Extremum::LocalMax
            };
            CriticalPoint { t, value, kind }
        })
        .collect())
}

pub fn count_critical_points(u: &SpectralFunction) -> Result<usize> {
    critical_points(u).map(|r| r.len())
}

/// Nature of the endpoints `t = -1` and `t = 1`: a local maximum where
/// `u > 1`, a local minimum where `u < 1`.
pub fn endpoint_extrema(u: &SpectralFunction) -> (Extremum, Extremum) {
    let kind = |v: f64| {
        if v > 1.0 {
            Extremum::LocalMax
        } else {
            Extremum::LocalMin
        }
    };
    (kind(u.eval(-1.0)), kind(u.eval(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::JacobiParams;

    #[test]
    fn legendre_cubic_crossings() {
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        let u = SpectralFunction::perturbed_one(3, 0.01, 8, &p);
        let roots = crossing_points(&u).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots[1].abs() < 1e-14);
        let r = (3.0_f64 / 5.0).sqrt();
        assert!((roots[2] - r).abs() < 1e-13);
    }

    #[test]
    fn constant_rejected() {
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        let u = SpectralFunction::constant(1.0, 8, &p);
        assert_eq!(count_crossings(&u), Err(Error::ConstantState));
        assert_eq!(count_critical_points(&u), Err(Error::ConstantState));
    }

    #[test]
    fn even_perturbation_has_one_critical_point() {
        let p = JacobiParams::new(0.5, 0.5).unwrap();
        let u = SpectralFunction::perturbed_one(2, 0.01, 8, &p);
        let cps = critical_points(&u).unwrap();
        assert_eq!(cps.len(), 1);
        assert!(cps[0].t.abs() < 1e-14);
        assert_eq!(cps[0].kind, Extremum::LocalMin);
        assert_eq!(endpoint_extrema(&u), (Extremum::LocalMax, Extremum::LocalMax));
    }

    #[test]
    fn triple_crossing_is_tangency() {
        // u - 1 = (t - 0.3)^3 in the Legendre basis
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        let u = SpectralFunction::new(vec![0.673, 0.87, -0.6, 0.4, 0.0, 0.0, 0.0, 0.0], &p);
        assert!(matches!(count_crossings(&u), Err(Error::TangencyDetected { .. })));
    }
}
