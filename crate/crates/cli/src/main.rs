use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use jacobi_bifurcation::continuation::{
    branch_json, branch_switch_with, continue_branch, detect_fold, lambda_prime_zero,
    write_branch_csv, Branch, BranchDocument, ContinuationSettings, ProblemSpec,
};
use jacobi_bifurcation::geometry::{params_from_sphere, sphere_eigenvalue, SphereContext};
use jacobi_bifurcation::jacobi::{parse_rational, JacobiParams};
use jacobi_bifurcation::linearization::{classify, linearization_coeffs, SignClass};
use jacobi_bifurcation::verify::{run_suite, Suite, DEFAULT_SEED};
use jacobi_bifurcation::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "jacobi-bif", version, about = "Jacobi spectral data and bifurcation branches")]
struct Cli {
    /// Directory for output files when no explicit path is given.
    #[arg(long, global = true, env = "JACOBI_BIF_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exponents, eigenvalues and thresholds for isoparametric data (n, d, c).
    Sphere {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        c: i64,
        /// Exponent of the nonlinearity, e.g. `3` or `7/3`.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value_t = 3)]
        kmax: u32,
        /// Minimal focal-set dimension.
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        json: bool,
    },
    /// Linearization coefficients of `P_k^2` and the cube integral.
    Linearize {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Include the exact rational values.
        #[arg(long)]
        exact: bool,
    },
    /// Trace branches from `(1, lambda_k)`.
    Trace(TraceArgs),
    /// Run an acceptance suite.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Towards decreasing lambda.
    Auto,
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct TraceArgs {
    /// Single branch index.
    #[arg(long, conflicts_with = "kmax", required_unless_present = "kmax")]
    k: Option<usize>,
    /// Sweep `k = 1..=kmax` in parallel.
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, allow_hyphen_values = true, requires = "beta", conflicts_with_all = ["n", "d", "c"])]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha")]
    beta: Option<String>,
    #[arg(long, requires_all = ["d", "c"])]
    n: Option<i64>,
    #[arg(long)]
    d: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<i64>,
    #[arg(long, requires = "n")]
    m: Option<i64>,
    #[arg(long)]
    q: f64,
    #[arg(long = "modes", default_value_t = 64)]
    modes: usize,
    /// Quadrature order; defaults to `max(2N + 16, 3N)`.
    #[arg(long = "quad")]
    quad: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    direction: Direction,
    #[arg(long, default_value_t = 1e-3)]
    s0: f64,
    #[arg(long, default_value_t = 2000)]
    max_steps: usize,
    #[arg(long, default_value_t = 0.05)]
    ds_max: f64,
    #[arg(long, default_value_t = 1e-6)]
    ds_min: f64,
    #[arg(long, default_value_t = 1e-4)]
    lambda_floor: f64,
    #[arg(long, default_value_t = 1e6)]
    lambda_ceiling: f64,
    #[arg(long, default_value_t = 1e3)]
    amplitude_cap: f64,
    /// Keep tracing past the first fold.
    #[arg(long)]
    through_fold: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; stdout when neither this nor `--out-dir` is given.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

macro_rules! outln {
    ($($arg:tt)*) => {
        stdout_write(format!("{}\n", format_args!($($arg)*)).as_bytes())
    };
}

/// Writes to stdout; a closed reader ends the process quietly.
fn stdout_write(bytes: &[u8]) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(bytes).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("i/o error: {e}");
        std::process::exit(1);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli.out_dir.as_deref();
    let result = match cli.command {
        Command::Sphere {
            n,
            d,
            c,
            q,
            kmax,
            m,
            json,
        } => cmd_sphere(n, d, c, q.as_deref(), kmax, m, json),
        Command::Linearize {
            k,
            alpha,
            beta,
            exact,
        } => cmd_linearize(k, &alpha, &beta, exact),
        Command::Trace(args) => cmd_trace(&args, out_dir),
        Command::Verify { suite, seed } => cmd_verify(&suite, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = match &f {
                Failure::Config(msg) => {
                    eprintln!("error: {msg}");
                    EXIT_CONFIG
                }
                Failure::Numerical(msg) => {
                    eprintln!("numerical failure: {msg}");
                    EXIT_NUMERICAL
                }
                Failure::Io(msg) => {
                    eprintln!("i/o error: {msg}");
                    1
                }
                Failure::Verify => EXIT_VERIFY,
            };
            ExitCode::from(code)
        }
    }
}

#[derive(Serialize)]
struct SphereReport {
    n: i64,
    d: i64,
    c: i64,
    alpha: String,
    beta: String,
    eigenvalues: Vec<(u32, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    bifurcation_points: Vec<(u32, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_f: Option<String>,
}

fn cmd_sphere(
    n: i64,
    d: i64,
    c: i64,
    q: Option<&str>,
    kmax: u32,
    m: Option<i64>,
    json: bool,
) -> Result<(), Failure> {
    let mut ctx = params_from_sphere(n, d, c)?;
    if let Some(m) = m {
        ctx = ctx.with_focal_dimension(m)?;
    }
    let q_exact = q.map(parse_rational).transpose()?;
    if let Some(q) = &q_exact {
        if *q <= jacobi_bifurcation::jacobi::params::ratio(1, 1) {
            return Err(Failure::Config(format!("q = {q} must exceed 1")));
        }
    }
    let eigenvalues = (0..=kmax)
        .map(|i| (i, sphere_eigenvalue(i, &ctx).to_string()))
        .collect();
    let bifurcation_points = match &q_exact {
        Some(q) => {
            let one = jacobi_bifurcation::jacobi::params::ratio(1, 1);
            let a = ctx.alpha() + ctx.beta() + &one;
            (1..=kmax)
                .map(|k| {
                    let kr = jacobi_bifurcation::jacobi::params::ratio(i64::from(k), 1);
                    (k, (&kr * (&kr + &a) / (q - &one)).to_string())
                })
                .collect()
        }
        None => Vec::new(),
    };
    let report = SphereReport {
        n,
        d,
        c,
        alpha: ctx.alpha().to_string(),
        beta: ctx.beta().to_string(),
        eigenvalues,
        q: q_exact.map(|q| q.to_string()),
        bifurcation_points,
        m,
        q_f: threshold_text(&ctx),
    };
    if json {
        outln!("{}", to_json(&report)?);
        return Ok(());
    }
    outln!("alpha = {}", report.alpha);
    outln!("beta  = {}", report.beta);
    for (i, mu) in &report.eigenvalues {
        outln!("mu_{} = {mu}", i64::from(*i) * d);
    }
    for (k, l) in &report.bifurcation_points {
        outln!("lambda_{k} = {l}");
    }
    if let Some(qf) = &report.q_f {
        outln!("q_f = {qf}");
    }
    Ok(())
}

fn threshold_text(ctx: &SphereContext) -> Option<String> {
    use jacobi_bifurcation::geometry::Threshold;
    ctx.supercritical_threshold().map(|t| match t {
        Threshold::Finite(r) => r.to_string(),
        Threshold::Infinite => "inf".to_string(),
    })
}

#[derive(Serialize)]
struct ExactReport {
    coeffs: Vec<String>,
    norm_over_mass: String,
    i3_over_mass: String,
}

#[derive(Serialize)]
struct LinearizeReport {
    k: usize,
    alpha: f64,
    beta: f64,
    coeffs: Vec<f64>,
    i3: f64,
    h_k: f64,
    classification: Vec<SignClass>,
    i3_sign: SignClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactReport>,
}

fn cmd_linearize(k: i64, alpha: &str, beta: &str, exact: bool) -> Result<(), Failure> {
    if k < 0 {
        return Err(Error::NegativeDegree(k).into());
    }
    let k = k as usize;
    let params = JacobiParams::parse(alpha, beta)?;
    let table = linearization_coeffs(k, &params)?;
    let report = classify(&table);
    let out = LinearizeReport {
        k,
        alpha: params.alpha(),
        beta: params.beta(),
        coeffs: table.coeffs.clone(),
        i3: table.cube_integral,
        h_k: table.norm,
        classification: report.classes,
        i3_sign: report.cube_sign,
        exact: if exact {
            table.exact.as_ref().map(|ex| ExactReport {
                coeffs: ex.coeffs.iter().map(|c| c.to_string()).collect(),
                norm_over_mass: ex.norm_over_mass.to_string(),
                i3_over_mass: ex.cube_over_mass.to_string(),
            })
        } else {
            None
        },
    };
    outln!("{}", to_json(&out)?);
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Io(e.to_string()))
}

fn trace_spec(args: &TraceArgs) -> Result<ProblemSpec, Failure> {
    let (params, sphere) = match (&args.alpha, &args.beta, args.n, args.d, args.c) {
        (Some(a), Some(b), None, None, None) => (JacobiParams::parse(a, b)?, None),
        (None, None, Some(n), Some(d), Some(c)) => {
            let mut ctx = params_from_sphere(n, d, c)?;
            if let Some(m) = args.m {
                ctx = ctx.with_focal_dimension(m)?;
            }
            (ctx.params().clone(), Some(ctx))
        }
        _ => {
            return Err(Failure::Config(
                "give exactly one of (--alpha, --beta) or (--n, --d, --c)".into(),
            ))
        }
    };
    let spec = match args.quad {
        Some(m) => ProblemSpec::with_resolution(params, args.q, args.modes, m)?,
        None => ProblemSpec::with_modes(params, args.q, args.modes)?,
    };
    Ok(match sphere {
        Some(ctx) => spec.with_sphere(ctx)?,
        None => spec,
    })
}

fn settings(args: &TraceArgs) -> Result<ContinuationSettings, Failure> {
    let s = ContinuationSettings {
        max_steps: args.max_steps,
        ds_max: args.ds_max,
        ds_min: args.ds_min,
        lambda_floor: args.lambda_floor,
        lambda_ceiling: args.lambda_ceiling,
        amplitude_cap: args.amplitude_cap,
        stop_after_fold: !args.through_fold,
        ..ContinuationSettings::default()
    };
    s.validate()?;
    Ok(s)
}

/// Branches from `(1, lambda_k)` for the requested directions, each with
/// its first fold when one is bracketed.
fn trace_k(
    k: usize,
    spec: &ProblemSpec,
    settings: &ContinuationSettings,
    direction: Direction,
    s0: f64,
) -> Result<Vec<Branch>, Error> {
    let decreasing = if lambda_prime_zero(k, spec)? <= 0.0 { 1 } else { -1 };
    let dirs: Vec<i8> = match direction {
        Direction::Auto => vec![decreasing],
        Direction::Plus => vec![1],
        Direction::Minus => vec![-1],
        Direction::Both => vec![1, -1],
    };
    let mut out = Vec::with_capacity(dirs.len());
    for dir in dirs {
        let start = branch_switch_with(k, spec, s0, dir, settings)?;
        let mut branch = continue_branch(&start, spec, settings)?;
        if !branch.fold_brackets.is_empty() {
            let fold = detect_fold(&branch, spec)?;
            branch.folds.push(fold);
        }
        out.push(branch);
    }
    Ok(out)
}

fn cmd_trace(args: &TraceArgs, out_dir: Option<&Path>) -> Result<(), Failure> {
    let spec = trace_spec(args)?;
    let settings = settings(args)?;
    let ks: Vec<usize> = match (args.k, args.kmax) {
        (Some(k), _) => vec![k],
        (None, Some(kmax)) => (1..=kmax).collect(),
        (None, None) => return Err(Failure::Config("give --k or --kmax".into())),
    };

    let results: Vec<Result<Vec<Branch>, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ks
            .iter()
            .map(|&k| {
                let (spec, settings) = (&spec, &settings);
                scope.spawn(move || trace_k(k, spec, settings, args.direction, args.s0))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("trace worker panicked"))
            .collect()
    });
    let mut branches = Vec::new();
    for r in results {
        branches.extend(r?);
    }
    emit(&branches, &spec, args, out_dir)
}

fn emit(
    branches: &[Branch],
    spec: &ProblemSpec,
    args: &TraceArgs,
    out_dir: Option<&Path>,
) -> Result<(), Failure> {
    let single = branches.len() == 1;
    match args.format {
        Format::Json => {
            let text = if single {
                branch_json(&branches[0], spec)?
            } else {
                let docs: Vec<BranchDocument> =
                    branches.iter().map(|b| BranchDocument::new(b, spec)).collect();
                to_json(&docs)?
            };
            let path = args.output.clone().or_else(|| {
                out_dir.map(|d| d.join(file_name(branches, single, "json")))
            });
            write_text(path.as_deref(), &text)
        }
        Format::Csv => {
            if single {
                let path = args.output.clone().or_else(|| {
                    out_dir.map(|d| d.join(file_name(branches, true, "csv")))
                });
                let mut buf = Vec::new();
                write_branch_csv(&branches[0], &mut buf)?;
                write_text(path.as_deref(), &String::from_utf8_lossy(&buf))
            } else {
                let dir = args
                    .output
                    .clone()
                    .or_else(|| out_dir.map(Path::to_path_buf))
                    .ok_or_else(|| {
                        Failure::Config(
                            "several branches in CSV need --output DIR or --out-dir".into(),
                        )
                    })?;
                fs::create_dir_all(&dir)?;
                for b in branches {
                    let mut buf = Vec::new();
                    write_branch_csv(b, &mut buf)?;
                    fs::write(dir.join(branch_name(b, "csv")), buf)?;
                }
                Ok(())
            }
        }
    }
}

fn branch_name(b: &Branch, ext: &str) -> String {
    let dir = if b.origin.direction > 0 { "plus" } else { "minus" };
    format!("branch_k{}_{dir}.{ext}", b.origin.k)
}

fn file_name(branches: &[Branch], single: bool, ext: &str) -> String {
    if single {
        branch_name(&branches[0], ext)
    } else {
        format!("branches.{ext}")
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let mut f = fs::File::create(p)?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
            Ok(())
        }
        None => {
            if text.ends_with('\n') {
                stdout_write(text.as_bytes());
            } else {
                outln!("{text}");
            }
            Ok(())
        }
    }
}

fn cmd_verify(suite: &str, seed: u64) -> Result<(), Failure> {
    let suite: Suite = suite.parse()?;
    let reports = run_suite(suite, seed);
    for r in &reports {
        outln!("{r}");
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
