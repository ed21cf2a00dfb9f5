//! JSON and CSV renderings of traced branches.

use std::io::Write;

use serde::Serialize;

use super::branch::{Branch, BranchPoint, Termination};
use super::fold::FoldRecord;
use super::problem::ProblemSpec;
use super::topology::Extremum;
use crate::error::{Error, Result};

#[derive(Serialize)]
pub struct SpecSummary {
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl SpecSummary {
    pub fn of(spec: &ProblemSpec) -> Self {
        Self {
            alpha: spec.params().alpha(),
            beta: spec.params().beta(),
            q: spec.q(),
            n: spec.n_modes(),
            m: spec.n_quad(),
        }
    }
}

#[derive(Serialize)]
pub struct PointRecord<'a> {
    pub s: f64,
    pub lambda: f64,
    pub coeffs: &'a [f64],
    pub sigma_min: f64,
    pub crossings: Option<usize>,
    pub critical_points: Option<usize>,
    pub residual_norm: f64,
}

impl<'a> From<&'a BranchPoint> for PointRecord<'a> {
    fn from(p: &'a BranchPoint) -> Self {
        Self {
            s: p.s,
            lambda: p.lambda,
            coeffs: p.u.coeffs(),
            sigma_min: p.sigma_min,
            crossings: p.crossings,
            critical_points: p.critical_points,
            residual_norm: p.residual_norm,
        }
    }
}

#[derive(Serialize)]
pub struct FoldSummary<'a> {
    pub lambda_star: f64,
    pub coeffs: &'a [f64],
    pub null_direction: &'a [f64],
    pub crossings: Option<usize>,
    pub critical_points: Option<usize>,
    pub sigma_ratio: f64,
    pub moore_spence_residual: f64,
    pub endpoints: [Extremum; 2],
}

impl<'a> From<&'a FoldRecord> for FoldSummary<'a> {
    fn from(f: &'a FoldRecord) -> Self {
        Self {
            lambda_star: f.lambda_star,
            coeffs: f.point.u.coeffs(),
            null_direction: f.null_direction.coeffs(),
            crossings: f.point.crossings,
            critical_points: f.point.critical_points,
            sigma_ratio: f.point.sigma_ratio(),
            moore_spence_residual: f.moore_spence_residual,
            endpoints: [f.endpoints.0, f.endpoints.1],
        }
    }
}

#[derive(Serialize)]
pub struct BranchDocument<'a> {
    pub spec: SpecSummary,
    pub k: usize,
    pub direction: i8,
    pub points: Vec<PointRecord<'a>>,
    pub folds: Vec<FoldSummary<'a>>,
    pub termination: &'a Termination,
}

impl<'a> BranchDocument<'a> {
    pub fn new(branch: &'a Branch, spec: &ProblemSpec) -> Self {
        Self {
            spec: SpecSummary::of(spec),
            k: branch.origin.k,
            direction: branch.origin.direction,
            points: branch.points.iter().map(PointRecord::from).collect(),
            folds: branch.folds.iter().map(FoldSummary::from).collect(),
            termination: &branch.termination,
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::NumericalBreakdown(format!("serialisation failed: {e}"))
}

pub fn branch_json(branch: &Branch, spec: &ProblemSpec) -> Result<String> {
    serde_json::to_string_pretty(&BranchDocument::new(branch, spec)).map_err(json_error)
}

#[derive(Serialize)]
struct CsvRow {
    s: f64,
    lambda: f64,
    u_at_minus1: f64,
    u_at_plus1: f64,
    sigma_min: f64,
    crossings: Option<usize>,
    critical_points: Option<usize>,
}

/// One row per accepted point.
pub fn write_branch_csv<W: Write>(branch: &Branch, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &branch.points {
        w.serialize(CsvRow {
            s: p.s,
            lambda: p.lambda,
            u_at_minus1: p.u.eval(-1.0),
            u_at_plus1: p.u.eval(1.0),
            sigma_min: p.sigma_min,
            crossings: p.crossings,
            critical_points: p.critical_points,
        })
        .map_err(|e| Error::NumericalBreakdown(format!("csv: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::NumericalBreakdown(format!("csv: {e}")))
}

pub fn branch_csv(branch: &Branch) -> Result<String> {
    let mut buf = Vec::new();
    write_branch_csv(branch, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
