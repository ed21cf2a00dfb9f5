//! Acceptance checks shared by the command-line front-end and the test
//! suite. Each criterion returns a [`CriterionReport`] rather than
//! panicking, so a caller can print one line per criterion.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::continuation::{
    branch_json, estimate_lambda_prime, fit_quadratic, lambda_k, refine_point, trace_to_fold,
    Branch, ContinuationSettings, FoldRecord, ProblemSpec, SpectralFunction,
};
use crate::error::{Error, Result};
use crate::jacobi::exact::pochhammer_over_factorial;
use crate::jacobi::params::ratio;
use crate::jacobi::{
    default_order, endpoint_value, eval_all, gauss_jacobi_rule, weighted_norm_sq_closed_form,
    JacobiParams, Side, WeightMoments,
};
use crate::linearization::{
    classify, classify_float, gasper_quartic, gasper_quartic_exact, linearization_coeffs,
    quartic_sign_structure,
};

/// Exponent pairs exercised by the quadrature, endpoint and linearization
/// checks.
pub const PARAMETER_GRID: [(&str, &str); 6] = [
    ("0", "0"),
    ("1/2", "1/2"),
    ("1", "0"),
    ("3/2", "1/2"),
    ("-0.4", "-0.4"),
    ("0.3", "-0.7"),
];

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Quadrature,
    Endpoints,
    Theorem21,
    Gasper,
    Theorem31,
    Kernel,
    Theorem13,
    Invariants,
    Hygiene,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 10] = [
        "quadrature",
        "endpoints",
        "theorem21",
        "gasper",
        "theorem31",
        "kernel",
        "theorem13",
        "invariants",
        "hygiene",
        "all",
    ];

    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::All => (1..=9).collect(),
            other => vec![other as u8 + 1],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Suite::Quadrature,
            Suite::Endpoints,
            Suite::Theorem21,
            Suite::Gasper,
            Suite::Theorem31,
            Suite::Kernel,
            Suite::Theorem13,
            Suite::Invariants,
            Suite::Hygiene,
            Suite::All,
        ];
        Self::NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| all[i])
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} [{}]: {} ({} checks, {:.2}s)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.checks,
            self.seconds
        )?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n    {msg}")?;
        }
        if self.failures.len() > 5 {
            write!(f, "\n    ... {} more", self.failures.len() - 5)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Checker {
    checks: usize,
    failures: Vec<String>,
}

impl Checker {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn ok<T>(&mut self, r: Result<T>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{}: {e}", ctx()));
                None
            }
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<CriterionReport> {
    suite.criteria().into_iter().map(|id| criterion(id, seed)).collect()
}

pub fn criterion(id: u8, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut c = Checker::default();
    let name = match id {
        1 => {
            orthogonality_and_moments(&mut c);
            "quadrature"
        }
        2 => {
            endpoints(&mut c);
            "endpoints"
        }
        3 => {
            linearization_signs(&mut c);
            "theorem21"
        }
        4 => {
            quartic(&mut c, seed);
            "gasper"
        }
        5 => {
            slopes(&mut c);
            "theorem31"
        }
        6 => {
            trivial_kernel(&mut c);
            "kernel"
        }
        7 => {
            folds(&mut c);
            "theorem13"
        }
        8 => {
            branch_invariants(&mut c);
            "invariants"
        }
        9 => {
            hygiene(&mut c, seed);
            "hygiene"
        }
        _ => {
            c.check(false, || format!("no criterion {id}"));
            "unknown"
        }
    };
    CriterionReport {
        id,
        name,
        passed: c.failures.is_empty(),
        checks: c.checks,
        failures: c.failures,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn grid_params() -> Vec<JacobiParams> {
    PARAMETER_GRID
        .iter()
        .map(|(a, b)| JacobiParams::parse(a, b).expect("grid parameters are valid"))
        .collect()
}

fn orthogonality_and_moments(c: &mut Checker) {
    const KMAX: usize = 30;
    for p in grid_params() {
        let Some(rule) = c.ok(gauss_jacobi_rule(&p, default_order(2 * KMAX)), || {
            format!("{p:?} rule")
        }) else {
            continue;
        };
        let mut gram = vec![vec![0.0; KMAX + 1]; KMAX + 1];
        let mut buf = vec![0.0; KMAX + 1];
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            eval_all(&p, x, &mut buf);
            for j in 0..=KMAX {
                for k in j + 1..=KMAX {
                    gram[j][k] += w * buf[j] * buf[k];
                }
            }
        }
        let h: Vec<f64> = (0..=KMAX).map(|k| weighted_norm_sq_closed_form(k, &p)).collect();
        for j in 0..=KMAX {
            for k in j + 1..=KMAX {
                let bound = 1e-11 * (h[j] * h[k]).sqrt();
                c.check(gram[j][k].abs() < bound, || {
                    format!("{p:?} <P_{j}, P_{k}> = {:e} exceeds {bound:e}", gram[j][k])
                });
            }
        }

        let Some(mut moments) = c.ok(WeightMoments::new(&p), || format!("{p:?} moments")) else {
            continue;
        };
        for m in 1..=20 {
            let Some(rule) = c.ok(gauss_jacobi_rule(&p, m), || format!("{p:?} order {m}")) else {
                continue;
            };
            let mass: f64 = rule.weights().iter().sum();
            for j in 0..2 * m {
                let (mut val, mut scale) = (0.0, 0.0);
                for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
                    let xj = x.powi(j as i32);
                    val += w * xj;
                    scale += w * xj.abs();
                }
                let exact = crate::jacobi::params::ratio_to_f64(&moments.normalized(j));
                let err = (val / mass - exact).abs();
                c.check(err <= 1e-12 * scale / mass, || {
                    format!("{p:?} order {m} moment {j}: error {err:e}")
                });
            }
        }
    }
}

fn endpoints(c: &mut Checker) {
    const KMAX: usize = 31;
    for p in grid_params() {
        let mut plus = vec![0.0; KMAX + 1];
        let mut minus = vec![0.0; KMAX + 1];
        eval_all(&p, 1.0, &mut plus);
        eval_all(&p, -1.0, &mut minus);
        let (al, be) = p.exact().expect("grid is rational");
        let one = ratio(1, 1);
        for k in 0..KMAX {
            for (side, vals) in [(Side::Plus, &plus), (Side::Minus, &minus)] {
                let closed = endpoint_value(k, &p, side);
                let err = (vals[k] - closed).abs() / closed.abs();
                c.check(err < 1e-12, || {
                    format!("{p:?} P_{k}({side:?}) recurrence {} vs {closed} ({err:e})", vals[k])
                });
            }
            let at_plus = pochhammer_over_factorial(&(al + &one), k);
            c.check(at_plus.is_positive() && plus[k] > 0.0, || {
                format!("{p:?} P_{k}(1) not positive")
            });
            let sign = |k: usize| if k % 2 == 0 { ratio(1, 1) } else { ratio(-1, 1) };
            let m0 = sign(k) * pochhammer_over_factorial(&(be + &one), k);
            let m1 = sign(k + 1) * pochhammer_over_factorial(&(be + &one), k + 1);
            c.check((m0 * m1).is_negative() && minus[k] * minus[k + 1] < 0.0, || {
                format!("{p:?} P_{k}(-1) P_{}(-1) not negative", k + 1)
            });
        }
    }
}

fn linearization_signs(c: &mut Checker) {
    for p in grid_params() {
        let symmetric = p.is_symmetric();
        for k in 1..=12 {
            let Some(table) = c.ok(linearization_coeffs(k, &p), || format!("{p:?} k = {k}"))
            else {
                continue;
            };
            let exact = classify(&table);
            let float = classify_float(&table);
            c.check(exact.agrees(), || {
                format!("{p:?} k = {k} exact signs {:?}", exact.discrepancies)
            });
            c.check(float.agrees(), || {
                format!("{p:?} k = {k} float signs {:?}", float.discrepancies)
            });
            c.check(float.classes == exact.classes && float.cube_sign == exact.cube_sign, || {
                format!("{p:?} k = {k} float and exact signs differ")
            });
            if symmetric && k % 2 == 1 {
                let bound = 1e-12 * table.norm.powf(1.5);
                c.check(table.cube_integral.abs() < bound, || {
                    format!("{p:?} k = {k} I3 = {:e} exceeds {bound:e}", table.cube_integral)
                });
            } else {
                c.check(table.cube_integral > 0.0, || {
                    format!("{p:?} k = {k} I3 = {:e} not positive", table.cube_integral)
                });
            }
        }
    }
}

fn quartic(c: &mut Checker, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_values = [(1, 4), (1, 1), (2, 1), (7, 2)];
    for k in 2..=8 {
        for &(num, den) in &a_values {
            let a = num as f64 / den as f64;
            let Some(gq) = c.ok(gasper_quartic(k, a), || format!("k = {k}, a = {a}")) else {
                continue;
            };
            for _ in 0..5 {
                let j: f64 = rng.random_range(0.0..4.0 * k as f64);
                let (f, e) = (gq.eval_factored(j), gq.eval_expanded(j));
                let scale: f64 = gq
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, ci)| (ci * j.powi(i as i32)).abs())
                    .sum();
                c.check((f - e).abs() <= 1e-10 * scale, || {
                    format!("k = {k}, a = {a}, J = {j}: factored {f} vs expanded {e}")
                });
            }
            c.ok(quartic_sign_structure(&gq), || format!("k = {k}, a = {a} structure"));

            let Some(exact) = c.ok(gasper_quartic_exact(k, &ratio(num, den)), || {
                format!("k = {k}, a = {num}/{den} exact")
            }) else {
                continue;
            };
            for jn in 0..5 {
                let j = ratio(jn * 7 + 1, 3);
                let (f, e) = (exact.eval_factored_exact(&j), exact.eval_expanded_exact(&j));
                c.check(f.is_some() && f == e, || {
                    format!("k = {k}, a = {num}/{den}, J = {j}: exact forms differ")
                });
            }
        }
    }
}

fn slope_params() -> Vec<JacobiParams> {
    [((1, 1), (0, 1)), ((3, 2), (1, 2)), ((1, 2), (1, 2)), ((0, 1), (0, 1))]
        .iter()
        .map(|&(a, b)| JacobiParams::from_ratios(a, b).expect("valid"))
        .collect()
}

fn slopes(c: &mut Checker) {
    for p in slope_params() {
        for q in [2.0, 3.0] {
            let Some(spec) = c.ok(ProblemSpec::new(p.clone(), q), || format!("{p:?}")) else {
                continue;
            };
            for k in 1..=4 {
                if p.is_symmetric() && k % 2 == 1 {
                    if let Some(fit) = c.ok(fit_quadratic(k, &spec), || {
                        format!("{p:?} q = {q} k = {k} quadratic fit")
                    }) {
                        c.check(fit.relative_residual < 0.05 && fit.coefficient.is_finite(), || {
                            format!(
                                "{p:?} q = {q} k = {k}: C = {}, residual {:e}",
                                fit.coefficient, fit.relative_residual
                            )
                        });
                    }
                } else if let Some(est) = c.ok(estimate_lambda_prime(k, &spec), || {
                    format!("{p:?} q = {q} k = {k} slope")
                }) {
                    c.check(est.closed_form < 0.0 && est.relative_error() < 0.01, || {
                        format!(
                            "{p:?} q = {q} k = {k}: slope {} vs closed form {}",
                            est.estimate, est.closed_form
                        )
                    });
                }
            }
        }
    }
}

fn trivial_kernel(c: &mut Checker) {
    for p in slope_params() {
        for q in [2.0, 3.0] {
            let Some(spec) = c.ok(ProblemSpec::new(p.clone(), q), || format!("{p:?}")) else {
                continue;
            };
            let one = spec.constant_one();
            for k in 1..=spec.n_modes() / 4 {
                let lk = lambda_k(k, &spec);
                let Some(j) = c.ok(crate::continuation::jacobian(&one, lk, &spec), || {
                    format!("{p:?} q = {q} k = {k}")
                }) else {
                    continue;
                };
                let eig = spec.symmetrized(&j).symmetric_eigen();
                let small: Vec<usize> = (0..eig.eigenvalues.len())
                    .filter(|&i| eig.eigenvalues[i].abs() < 1e-10)
                    .collect();
                let mode = small.first().map(|&i| eig.eigenvectors.column(i).iamax());
                c.check(small.len() == 1 && mode == Some(k), || {
                    format!(
                        "{p:?} q = {q} k = {k}: {} small singular values, mode {mode:?}",
                        small.len()
                    )
                });
            }
        }
    }
}

/// The three degenerate cases with their branches.
pub fn fold_cases() -> Vec<(usize, JacobiParams, f64)> {
    vec![
        (2, JacobiParams::from_ratios((1, 2), (1, 2)).expect("valid"), 3.0),
        (1, JacobiParams::from_ratios((1, 1), (0, 1)).expect("valid"), 2.0),
        (3, JacobiParams::from_ratios((3, 2), (1, 2)).expect("valid"), 2.0),
    ]
}

fn traced(c: &mut Checker) -> Vec<(usize, ProblemSpec, Branch, FoldRecord, f64)> {
    let mut out = Vec::new();
    for (k, p, q) in fold_cases() {
        let Some(spec) = c.ok(ProblemSpec::new(p.clone(), q), || format!("{p:?}")) else {
            continue;
        };
        let start = Instant::now();
        if let Some((branch, fold)) = c.ok(
            trace_to_fold(k, &spec, &ContinuationSettings::default()),
            || format!("k = {k}, {p:?}, q = {q}"),
        ) {
            out.push((k, spec, branch, fold, start.elapsed().as_secs_f64()));
        }
    }
    out
}

fn folds(c: &mut Checker) {
    for (k, spec, branch, fold, secs) in traced(c) {
        let tag = format!("k = {k}, {:?}, q = {}", spec.params(), spec.q());
        let lk = lambda_k(k, &spec);
        c.check(fold.moore_spence_residual < 1e-10, || {
            format!("{tag}: Moore-Spence residual {:e}", fold.moore_spence_residual)
        });
        c.check(fold.point.sigma_ratio() < 1e-8, || {
            format!("{tag}: sigma_min/sigma_max = {:e}", fold.point.sigma_ratio())
        });
        c.check(fold.point.crossings == Some(k), || {
            format!("{tag}: crossings {:?}", fold.point.crossings)
        });
        c.check(fold.point.critical_points == Some(k - 1), || {
            format!("{tag}: critical points {:?}", fold.point.critical_points)
        });
        c.check(fold.lambda_star > 0.0 && fold.lambda_star < lk, || {
            format!("{tag}: lambda_* = {} outside (0, {lk})", fold.lambda_star)
        });
        let lowest = branch.points.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
        c.check(fold.lambda_star <= lowest * (1.0 + 1e-12), || {
            format!("{tag}: lambda_* = {} above traced minimum {lowest}", fold.lambda_star)
        });
        c.check(secs < 60.0, || format!("{tag}: took {secs:.1}s"));
    }
}

fn branch_invariants(c: &mut Checker) {
    for (k, spec, branch, _, _) in traced(c) {
        let tag = format!("k = {k}, {:?}, q = {}", spec.params(), spec.q());
        let first = &branch.points[0].u;
        let sign_minus = first.eval(-1.0) > 1.0;
        for (i, p) in branch.points.iter().enumerate() {
            c.check(p.crossings == Some(k), || format!("{tag}: point {i} crossings {:?}", p.crossings));
            let (um, up) = (p.u.eval(-1.0), p.u.eval(1.0));
            c.check((um > 1.0) == sign_minus && um != 1.0, || {
                format!("{tag}: point {i} u(-1) - 1 = {:e} changed sign", um - 1.0)
            });
            c.check(up > 1.0, || format!("{tag}: point {i} u(1) = {up}"));
            c.check(p.lambda > 1e-4, || format!("{tag}: point {i} lambda = {}", p.lambda));
        }
    }
}

#[derive(Serialize)]
struct GradientSample {
    lambda: f64,
    relative_error: f64,
}

/// Central differences of the residual against `J v` at `count` random
/// positive states.
fn gradient_samples(spec: &ProblemSpec, seed: u64, count: usize) -> Result<Vec<GradientSample>> {
    let n = spec.n_modes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let eps = 1e-6;
    while out.len() < count {
        let c = draw(&mut rng, n, 1.0);
        let lead = rng.random_range(-1.0..1.0);
        let v = draw(&mut rng, n, lead);
        let lambda: f64 = rng.random_range(0.5..20.0);
        let u = SpectralFunction::new(c.clone(), spec.params());
        if !spec.is_positive(&u) {
            continue;
        }
        let shift = |sgn: f64| -> Vec<f64> { c.iter().zip(&v).map(|(a, b)| a + sgn * eps * b).collect() };
        let fp = spec.residual_vec(&shift(1.0), lambda)?;
        let fm = spec.residual_vec(&shift(-1.0), lambda)?;
        let fd = (fp - fm) / (2.0 * eps);
        let jv = spec.jacobian_mat(&c, lambda)? * nalgebra::DVector::from_column_slice(&v);
        let err = spec.weighted_norm((&fd - &jv).as_slice()) / spec.weighted_norm(jv.as_slice());
        out.push(GradientSample {
            lambda,
            relative_error: err,
        });
    }
    Ok(out)
}

/// Coefficients `(lead, 0.2 r_i / (1 + i)^3)` with `r_i` uniform in `[-1, 1)`.
fn draw(rng: &mut ChaCha8Rng, n: usize, lead: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    out.push(lead);
    for i in 1..n {
        let r: f64 = rng.random_range(-1.0..1.0);
        out.push(0.2 * r / (1.0 + i as f64).powi(3));
    }
    out
}

fn hygiene(c: &mut Checker, seed: u64) {
    let p = JacobiParams::from_ratios((3, 2), (1, 2)).expect("valid");
    if let Some(spec) = c.ok(ProblemSpec::new(p, 2.5), || "hygiene spec".into()) {
        if let Some(samples) = c.ok(gradient_samples(&spec, seed, 10), || "gradient".into()) {
            for (i, s) in samples.iter().enumerate() {
                c.check(s.relative_error < 1e-6, || {
                    format!("state {i}: Jacobian vs central difference {:e}", s.relative_error)
                });
            }
            let again = gradient_samples(&spec, seed, 10).ok();
            let a = serde_json::to_string(&samples).ok();
            let b = again.and_then(|s| serde_json::to_string(&s).ok());
            c.check(a.is_some() && a == b, || "seeded gradient report not reproducible".into());
        }
    }

    let settings = ContinuationSettings::default();
    for (k, p, q) in fold_cases() {
        let Some(spec) = c.ok(ProblemSpec::new(p.clone(), q), || format!("{p:?}")) else {
            continue;
        };
        let Some(fine) = c.ok(spec.refined(), || "refined spec".into()) else {
            continue;
        };
        let Some((branch, _)) = c.ok(trace_to_fold(k, &spec, &settings), || {
            format!("k = {k}, {p:?}")
        }) else {
            continue;
        };
        for (i, pt) in branch.points.iter().enumerate() {
            if let Some(r) = c.ok(refine_point(pt, &fine, &settings), || {
                format!("k = {k} point {i} refinement")
            }) {
                let rel = (r.lambda - pt.lambda).abs() / pt.lambda.abs();
                c.check(rel < 1e-8, || format!("k = {k} point {i}: refinement moves lambda by {rel:e}"));
            }
        }
        let first = branch_json(&branch, &spec);
        let second = trace_to_fold(k, &spec, &settings).and_then(|(b, _)| branch_json(&b, &spec));
        c.check(matches!((&first, &second), (Ok(a), Ok(b)) if a == b), || {
            format!("k = {k}: repeated trace JSON differs")
        });
    }
}

