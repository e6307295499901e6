//! Command line front end: domain files in, JSON and CSV reports out.

use std::ffi::OsString;
use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::boundary::{BoundaryFamily, ValleyBoundary};
use crate::disc_analytic;
use crate::eigen::{self, EigenError, EigenResult, SolveDiagnostics};
use crate::fem::{self, AssembledProblem};
use crate::gap::{self, GapReport, LemmaIdentityReport, ProofCheckReport, RichardsonFit, Verdict};
use crate::geometry::{triangulate, BoundaryCurve, Harmonic, Mesh};
use crate::valley::{self, EquivalenceReport, ValleyError};

pub const EXIT_PASS: i32 = 0;
/// A `--strict` run whose computed gap undershoots bound minus budget.
pub const EXIT_BOUND_VIOLATION: i32 = 2;
pub const EXIT_SOLVER_FAILURE: i32 = 3;
pub const EXIT_BAD_CONFIG: i32 = 4;

/// Parses `args` (first element is the program name) and runs one subcommand.
/// Returns the process exit code instead of exiting so tests can call it.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() {
                EXIT_BAD_CONFIG
            } else {
                EXIT_PASS
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "diracgap",
    version,
    about = "Dirac spectra and gap bounds on smooth plane domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem for the lowest eigenpairs and judge the gap bound.
    Solve(SolveArgs),
    /// Solve plus every proof-ingredient check on one configuration.
    Verify(VerifyArgs),
    /// Gap-versus-bound table over a list of boundary parameters.
    Sweep(SweepArgs),
    /// Eigenvalue convergence table over a mesh refinement ladder.
    Converge(ConvergeArgs),
    /// Analytic disc spectrum from the Bessel root scan.
    Disc(DiscArgs),
    /// Four-spinor valley-coupled spectra and their two-spinor reduction.
    Valley(ValleyArgs),
    /// Dump an assembled matrix as a plain-text triplet file.
    ExportMatrix(ExportArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Domain description file (JSON)
    #[arg(long)]
    domain: PathBuf,
    /// Boundary family parameter in radians
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Target mesh spacing
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    /// Number of eigenpairs to compute
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Relative residual tolerance for the eigensolver
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the solver start vectors
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Discretization allowance subtracted from the bound before judging
    #[arg(long, default_value_t = 0.0)]
    budget: f64,
    /// Exit with code 2 when the verdict is fail
    #[arg(long)]
    strict: bool,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Domain description file (JSON)
    #[arg(long)]
    domain: PathBuf,
    /// Boundary family parameter in radians
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Finest mesh spacing; the budget ladder solves at 4h and 2h as well
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    /// Number of eigenpairs to compute on the finest mesh
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Relative residual tolerance for the eigensolver
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the solver start vectors
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the extrapolation-based discretization budget
    #[arg(long)]
    budget: Option<f64>,
    /// Exit with code 2 when the gap verdict is fail
    #[arg(long)]
    strict: bool,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Domain description file (JSON)
    #[arg(long)]
    domain: PathBuf,
    /// Comma-separated boundary parameters in radians
    #[arg(
        long,
        default_value = "0,0.5235987755982988,0.7853981633974483,1.0471975511965976"
    )]
    etas: String,
    /// Target mesh spacing
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    /// Number of eigenpairs per row
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Relative residual tolerance for the eigensolver
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the solver start vectors
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Discretization allowance subtracted from the bound before judging
    #[arg(long, default_value_t = 0.0)]
    budget: f64,
    /// Exit with code 2 when any row fails
    #[arg(long)]
    strict: bool,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    /// Domain description file (JSON)
    #[arg(long)]
    domain: PathBuf,
    /// Boundary family parameter in radians
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Comma-separated decreasing mesh spacings, at least three
    #[arg(long, default_value = "0.2,0.1,0.05")]
    h_list: String,
    /// Relative residual tolerance for the eigensolver
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the solver start vectors
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiscArgs {
    /// Disc radius
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Largest angular channel to scan
    #[arg(long, default_value_t = 4)]
    m_max: u32,
    /// Roots per channel
    #[arg(long, default_value_t = 4)]
    per_m: u32,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValleyArgs {
    /// Domain description file (JSON)
    #[arg(long)]
    domain: PathBuf,
    /// Boundary condition kind
    #[arg(long, value_enum)]
    bc: BcArg,
    /// Valley mixing phase for the armchair condition
    #[arg(long, default_value_t = 0.0)]
    nu_phase: f64,
    /// Target mesh spacing; the valley path solves densely, keep it coarse
    #[arg(long, default_value_t = 0.15)]
    h: f64,
    /// Tolerance for the structural and spectral comparisons
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Discretization allowance subtracted from the bound before judging
    #[arg(long, default_value_t = 0.0)]
    budget: f64,
    /// Exit with code 2 when the gap verdict is fail
    #[arg(long)]
    strict: bool,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Domain description file (JSON)
    #[arg(long)]
    domain: PathBuf,
    /// Boundary family parameter in radians
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Target mesh spacing
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    /// Which assembled form to export
    #[arg(long, value_enum, default_value_t = FormArg::Squared)]
    form: FormArg,
    /// Which matrix of the assembled problem to export
    #[arg(long, value_enum, default_value_t = MatrixArg::Form)]
    matrix: MatrixArg,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BcArg {
    InfiniteMass,
    Armchair,
    Zigzag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FormArg {
    Squared,
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MatrixArg {
    Form,
    Mass,
    Reduction,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_BAD_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Solver(m) => m,
        }
    }
}

fn config<E: std::fmt::Display>(err: E) -> CliError {
    CliError::Config(err.to_string())
}

fn solver<E: std::fmt::Display>(err: E) -> CliError {
    CliError::Solver(err.to_string())
}

fn eigen_error(err: EigenError) -> CliError {
    match err {
        EigenError::BadRequest { .. } => CliError::Config(err.to_string()),
        EigenError::DenseTooLarge { dim, limit } => CliError::Config(format!(
            "reduced dimension {dim} exceeds the dense-path limit {limit}; increase --h"
        )),
        other => CliError::Solver(other.to_string()),
    }
}

fn valley_error(err: ValleyError) -> CliError {
    match err {
        ValleyError::Boundary(inner) => CliError::Config(inner.to_string()),
        ValleyError::Geometry(inner) => CliError::Config(inner.to_string()),
        ValleyError::Eigen(inner) => eigen_error(inner),
        err @ (ValleyError::NotArmchair { .. } | ValleyError::CompanionMismatch { .. }) => {
            CliError::Config(err.to_string())
        }
        other => CliError::Solver(other.to_string()),
    }
}

/// On-disk domain description. `type` selects the curve family:
/// `{"type":"disc","R":1.0}`, `{"type":"ellipse","a":1.5,"b":0.75}`, or
/// `{"type":"fourier","r0":1.0,"harmonics":[{"n":3,"a":0.2,"b":0.0}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
enum DomainSpec {
    Disc {
        #[serde(rename = "R")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Fourier {
        r0: f64,
        harmonics: Vec<Harmonic>,
    },
}

impl DomainSpec {
    fn curve(&self) -> Result<BoundaryCurve, CliError> {
        match self {
            DomainSpec::Disc { radius } => BoundaryCurve::disc(*radius),
            DomainSpec::Ellipse { a, b } => BoundaryCurve::ellipse(*a, *b),
            DomainSpec::Fourier { r0, harmonics } => BoundaryCurve::fourier(*r0, harmonics.clone()),
        }
        .map_err(config)
    }
}

fn load_domain(path: &Path) -> Result<(DomainSpec, BoundaryCurve), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let spec: DomainSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("bad domain file {}: {e}", path.display())))?;
    let curve = spec.curve()?;
    Ok((spec, curve))
}

/// SHA-256 over the canonical JSON of the run configuration. Stored in every
/// report so outputs can be traced back to their exact inputs.
fn config_hash<T: Serialize>(config: &T) -> String {
    let text = serde_json::to_string(config).expect("run configurations always serialize");
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    format!("{:x}", hasher.finalize())
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, Serialize)]
struct Timings {
    mesh_ms: f64,
    assemble_ms: f64,
    solve_ms: f64,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

struct RunPieces {
    mesh: Mesh,
    fam: BoundaryFamily,
    prob: AssembledProblem,
    res: EigenResult,
    timings: Timings,
}

fn solve_pipeline(
    curve: &BoundaryCurve,
    eta: f64,
    h: f64,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<RunPieces, CliError> {
    let fam = BoundaryFamily::new(eta).map_err(config)?;
    let start = Instant::now();
    let mesh = triangulate(curve, h).map_err(config)?;
    let mesh_ms = ms(start);
    let start = Instant::now();
    let prob = fem::assemble(&mesh, &fam).map_err(config)?;
    let assemble_ms = ms(start);
    let start = Instant::now();
    let res = eigen::smallest_eigenpairs(&prob, k, tol, seed).map_err(eigen_error)?;
    let solve_ms = ms(start);
    Ok(RunPieces {
        mesh,
        fam,
        prob,
        res,
        timings: Timings {
            mesh_ms,
            assemble_ms,
            solve_ms,
        },
    })
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Converge(a) => run_converge(a),
        Command::Disc(a) => run_disc(a),
        Command::Valley(a) => run_valley(a),
        Command::ExportMatrix(a) => run_export(a),
    }
}

fn strict_code(strict: bool, any_fail: bool) -> i32 {
    if strict && any_fail {
        EXIT_BOUND_VIOLATION
    } else {
        EXIT_PASS
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Solver(format!("report serialization failed: {e}")))?;
    text.push('\n');
    emit_text(out, &text)
}

fn emit_text(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    let items = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<Vec<f64>, String>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    if let Some(bad) = items.iter().find(|v| !v.is_finite()) {
        return Err(format!("non-finite entry {bad}"));
    }
    Ok(items)
}

/// Worker count for the sweep: `DIRACGAP_THREADS` when set, otherwise the
/// available parallelism, never more than there are rows.
fn thread_cap(rows: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1);
    let cap = std::env::var("DIRACGAP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    cap.min(rows).max(1)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Serialize)]
struct SolveOutput {
    version: &'static str,
    config_hash: String,
    seed: u64,
    domain: String,
    eta: f64,
    beta: f64,
    b_factor: f64,
    area: f64,
    h: f64,
    n_vertices: usize,
    n_boundary: usize,
    n_reduced: usize,
    eigenvalues_mu: Vec<f64>,
    gaps_abs_lambda: Vec<f64>,
    residuals: Vec<f64>,
    bound: f64,
    budget: f64,
    margin: f64,
    verdict: Verdict,
    diagnostics: SolveDiagnostics,
    timings: Timings,
}

fn run_solve(a: SolveArgs) -> Result<i32, CliError> {
    let (spec, curve) = load_domain(&a.domain)?;
    let hash = config_hash(&json!({
        "command": "solve", "domain": spec, "eta": a.eta, "h": a.h,
        "k": a.k, "tol": a.tol, "seed": a.seed, "budget": a.budget,
    }));
    let run = solve_pipeline(&curve, a.eta, a.h, a.k, a.tol, a.seed)?;
    let area = curve.area();
    let report = gap::check_gap(&run.res, area, &run.fam, a.budget).map_err(config)?;
    let output = SolveOutput {
        version: VERSION,
        config_hash: hash,
        seed: a.seed,
        domain: curve.label(),
        eta: run.fam.eta(),
        beta: run.fam.beta(),
        b_factor: run.fam.b_factor(),
        area,
        h: a.h,
        n_vertices: run.prob.meta.n_vertices,
        n_boundary: run.prob.meta.n_boundary,
        n_reduced: run.prob.meta.n_reduced,
        eigenvalues_mu: run.res.eigenvalues.clone(),
        gaps_abs_lambda: run.res.gaps.clone(),
        residuals: run.res.residuals.clone(),
        bound: report.bound,
        budget: report.budget,
        margin: report.margin,
        verdict: report.verdict,
        diagnostics: run.res.diagnostics,
        timings: run.timings,
    };
    emit_json(&a.out, &output)?;
    Ok(strict_code(a.strict, report.verdict == Verdict::Fail))
}

#[derive(Serialize)]
struct RefinementRow {
    h: f64,
    h_eff: f64,
    sqrt_mu1: f64,
}

#[derive(Serialize)]
struct NeumannSummary {
    c: f64,
    compatibility_residual: f64,
    interior_residual: f64,
}

#[derive(Serialize)]
struct VerifyOutput {
    version: &'static str,
    config_hash: String,
    seed: u64,
    domain: String,
    eta: f64,
    beta: f64,
    b_factor: f64,
    area: f64,
    h: f64,
    n_reduced: usize,
    gap_report: GapReport,
    budget_source: &'static str,
    refinement: Vec<RefinementRow>,
    richardson: Option<RichardsonFit>,
    neumann: NeumannSummary,
    lemma_ground_state: LemmaIdentityReport,
    proof_inequality: Option<ProofCheckReport>,
    proof_note: Option<String>,
    timings: Timings,
}

fn run_verify(a: VerifyArgs) -> Result<i32, CliError> {
    let (spec, curve) = load_domain(&a.domain)?;
    let hash = config_hash(&json!({
        "command": "verify", "domain": spec, "eta": a.eta, "h": a.h,
        "k": a.k, "tol": a.tol, "seed": a.seed, "budget": a.budget,
    }));
    let run = solve_pipeline(&curve, a.eta, a.h, a.k, a.tol, a.seed)?;
    let mut refinement = Vec::with_capacity(3);
    for factor in [4.0, 2.0] {
        let coarse = solve_pipeline(&curve, a.eta, a.h * factor, 1, a.tol, a.seed)?;
        refinement.push(RefinementRow {
            h: a.h * factor,
            h_eff: 1.0 / coarse.mesh.rings as f64,
            sqrt_mu1: coarse.res.gaps[0],
        });
    }
    refinement.push(RefinementRow {
        h: a.h,
        h_eff: 1.0 / run.mesh.rings as f64,
        sqrt_mu1: run.res.gaps[0],
    });
    let hs: Vec<f64> = refinement.iter().map(|r| r.h_eff).collect();
    let values: Vec<f64> = refinement.iter().map(|r| r.sqrt_mu1).collect();
    let fit = gap::richardson_extrapolate(&hs, &values);
    let (budget, budget_source) = match (a.budget, &fit) {
        (Some(b), _) => (b, "override"),
        (None, Some(f)) => (3.0 * (values[2] - f.estimate).abs(), "richardson"),
        (None, None) => {
            return Err(CliError::Solver(
                "the refinement ladder did not fit a power law; pass --budget explicitly".into(),
            ))
        }
    };
    let area = curve.area();
    let gap_report = gap::check_gap(&run.res, area, &run.fam, budget).map_err(config)?;
    let neumann_full = gap::solve_neumann(&run.mesh).map_err(solver)?;
    let ground_full = run.prob.r.matvec_alloc(&run.res.vectors[0]);
    let lemma = gap::lemma_decompose(&run.mesh, &run.fam, &ground_full).map_err(solver)?;
    let (proof_inequality, proof_note) = if (run.fam.beta().abs() - 1.0).abs() <= 1e-12 {
        let check = gap::proof_inequality_check(&run.mesh, &run.prob, &run.res, &neumann_full)
            .map_err(solver)?;
        (Some(check), None)
    } else {
        (
            None,
            Some(format!(
                "the weighted inequality applies only at |beta| = 1; beta = {}",
                run.fam.beta()
            )),
        )
    };
    let output = VerifyOutput {
        version: VERSION,
        config_hash: hash,
        seed: a.seed,
        domain: curve.label(),
        eta: run.fam.eta(),
        beta: run.fam.beta(),
        b_factor: run.fam.b_factor(),
        area,
        h: a.h,
        n_reduced: run.prob.meta.n_reduced,
        gap_report: gap_report.clone(),
        budget_source,
        refinement,
        richardson: fit,
        neumann: NeumannSummary {
            c: neumann_full.c,
            compatibility_residual: neumann_full.compatibility_residual,
            interior_residual: neumann_full.interior_residual,
        },
        lemma_ground_state: lemma.report,
        proof_inequality,
        proof_note,
        timings: run.timings,
    };
    emit_json(&a.out, &output)?;
    Ok(strict_code(a.strict, gap_report.verdict == Verdict::Fail))
}

struct SweepRow {
    b_factor: f64,
    bound: f64,
    gap: f64,
    margin: f64,
    pass: bool,
}

fn sweep_row(
    curve: &BoundaryCurve,
    eta: f64,
    h: f64,
    k: usize,
    tol: f64,
    seed: u64,
    budget: f64,
) -> Result<SweepRow, String> {
    let fam = BoundaryFamily::new(eta).map_err(|e| e.to_string())?;
    let mesh = triangulate(curve, h).map_err(|e| e.to_string())?;
    let prob = fem::assemble(&mesh, &fam).map_err(|e| e.to_string())?;
    let res = eigen::smallest_eigenpairs(&prob, k, tol, seed).map_err(|e| e.to_string())?;
    let report = gap::check_gap(&res, curve.area(), &fam, budget).map_err(|e| e.to_string())?;
    Ok(SweepRow {
        b_factor: report.b_factor,
        bound: report.bound,
        gap: report.gap,
        margin: report.margin,
        pass: report.verdict == Verdict::Pass,
    })
}

fn run_sweep(a: SweepArgs) -> Result<i32, CliError> {
    let (spec, curve) = load_domain(&a.domain)?;
    let etas = parse_f64_list(&a.etas).map_err(|e| CliError::Config(format!("bad --etas: {e}")))?;
    let hash = config_hash(&json!({
        "command": "sweep", "domain": spec, "etas": etas, "h": a.h,
        "k": a.k, "tol": a.tol, "seed": a.seed, "budget": a.budget,
    }));
    let slots: Vec<Mutex<Option<Result<SweepRow, String>>>> =
        etas.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = thread_cap(etas.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= etas.len() {
                    break;
                }
                let row = sweep_row(&curve, etas[i], a.h, a.k, a.tol, a.seed, a.budget);
                *slots[i].lock().unwrap() = Some(row);
            });
        }
    });
    let mut text = format!(
        "# diracgap {VERSION} sweep\n# config {hash}\n# domain {} h {} k {} tol {} seed {} budget {}\n",
        curve.label(),
        fmt_f64(a.h),
        a.k,
        fmt_f64(a.tol),
        a.seed,
        fmt_f64(a.budget),
    );
    text.push_str("eta,B,bound,gap_fem,margin,pass\n");
    let mut any_fail = false;
    for (i, slot) in slots.iter().enumerate() {
        let eta = fmt_f64(etas[i]);
        match slot.lock().unwrap().take() {
            Some(Ok(row)) => {
                any_fail |= !row.pass;
                text.push_str(&format!(
                    "{eta},{},{},{},{},{}\n",
                    fmt_f64(row.b_factor),
                    fmt_f64(row.bound),
                    fmt_f64(row.gap),
                    fmt_f64(row.margin),
                    row.pass,
                ));
            }
            Some(Err(msg)) => {
                any_fail = true;
                let clean = msg.replace([',', '\n'], ";");
                text.push_str(&format!("{eta},NaN,NaN,NaN,NaN,error: {clean}\n"));
            }
            None => {
                return Err(CliError::Solver(format!(
                    "sweep worker never produced row {i}"
                )))
            }
        }
    }
    emit_text(&a.out, &text)?;
    Ok(strict_code(a.strict, any_fail))
}

fn run_converge(a: ConvergeArgs) -> Result<i32, CliError> {
    let (spec, curve) = load_domain(&a.domain)?;
    let hs =
        parse_f64_list(&a.h_list).map_err(|e| CliError::Config(format!("bad --h-list: {e}")))?;
    if hs.len() < 3 {
        return Err(CliError::Config(format!(
            "--h-list needs at least three spacings for an extrapolation, got {}",
            hs.len()
        )));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config(
            "--h-list must be strictly decreasing".into(),
        ));
    }
    let hash = config_hash(&json!({
        "command": "converge", "domain": spec, "eta": a.eta, "h_list": hs,
        "tol": a.tol, "seed": a.seed,
    }));
    let mut h_eff = Vec::with_capacity(hs.len());
    let mut mu1 = Vec::with_capacity(hs.len());
    let mut sqrt_mu1 = Vec::with_capacity(hs.len());
    for &h in &hs {
        let run = solve_pipeline(&curve, a.eta, h, 1, a.tol, a.seed)?;
        h_eff.push(1.0 / run.mesh.rings as f64);
        mu1.push(run.res.eigenvalues[0]);
        sqrt_mu1.push(run.res.gaps[0]);
    }
    let fit = gap::richardson_extrapolate(&h_eff, &sqrt_mu1);
    let mut text = format!(
        "# diracgap {VERSION} converge\n# config {hash}\n# domain {} eta {} tol {} seed {}\n# extrapolation runs on sqrt_mu1 against h_eff = 1/rings\n",
        curve.label(),
        fmt_f64(a.eta),
        fmt_f64(a.tol),
        a.seed,
    );
    if fit.is_none() {
        text.push_str("# warning: no power-law fit; refinement differences are not monotone\n");
        eprintln!(
            "warning: the refinement ladder did not fit a power law; no extrapolation reported"
        );
    }
    text.push_str("h,mu1,sqrt_mu1,richardson_estimate,observed_order\n");
    for i in 0..hs.len() {
        let tail = if i + 1 == hs.len() {
            match &fit {
                Some(f) => format!("{},{}", fmt_f64(f.estimate), fmt_f64(f.order)),
                None => ",".into(),
            }
        } else {
            ",".into()
        };
        text.push_str(&format!(
            "{},{},{},{tail}\n",
            fmt_f64(hs[i]),
            fmt_f64(mu1[i]),
            fmt_f64(sqrt_mu1[i]),
        ));
    }
    emit_text(&a.out, &text)?;
    Ok(EXIT_PASS)
}

fn run_disc(a: DiscArgs) -> Result<i32, CliError> {
    let hash = config_hash(&json!({
        "command": "disc", "radius": a.radius, "m_max": a.m_max, "per_m": a.per_m,
    }));
    let spectrum = disc_analytic::disc_eigenvalues(a.radius, a.m_max, a.per_m).map_err(config)?;
    let mut text = format!(
        "# diracgap {VERSION} disc\n# config {hash}\n# radius {} m_max {} per_m {}\n",
        fmt_f64(a.radius),
        a.m_max,
        a.per_m,
    );
    text.push_str("m,index,k,residual\n");
    for root in &spectrum.roots {
        text.push_str(&format!(
            "{},{},{},{}\n",
            root.m,
            root.index,
            fmt_f64(root.k),
            fmt_f64(root.residual),
        ));
    }
    emit_text(&a.out, &text)?;
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct ValleyOutput {
    version: &'static str,
    config_hash: String,
    domain: String,
    kind: ValleyBoundary,
    h: f64,
    area: f64,
    n_vertices: usize,
    n_reduced: usize,
    spectrum: Vec<f64>,
    gap: f64,
    bound: f64,
    budget: f64,
    margin: f64,
    verdict: Verdict,
    /// armchair runs: the full two-spinor reduction report
    equivalence: Option<EquivalenceReport>,
    /// infinite-mass runs: max distance between the four-spinor spectrum and
    /// the sorted union of the two split-block spectra
    union_deviation: Option<f64>,
    timings: Timings,
}

fn run_valley(a: ValleyArgs) -> Result<i32, CliError> {
    let (spec, curve) = load_domain(&a.domain)?;
    let vb = match a.bc {
        BcArg::Zigzag => ValleyBoundary::Zigzag,
        BcArg::InfiniteMass => ValleyBoundary::InfiniteMass,
        BcArg::Armchair => ValleyBoundary::Armchair {
            nu_phase: a.nu_phase,
        },
    };
    let hash = config_hash(&json!({
        "command": "valley", "domain": spec, "bc": vb, "h": a.h,
        "tol": a.tol, "budget": a.budget,
    }));
    let start = Instant::now();
    let mesh = triangulate(&curve, a.h).map_err(config)?;
    let mesh_ms = ms(start);
    let start = Instant::now();
    let four = valley::assemble_four_spinor(&mesh, &vb).map_err(valley_error)?;
    let assemble_ms = ms(start);
    let start = Instant::now();
    let spectrum = eigen::full_pencil_spectrum(&four.k4, &four.m4).map_err(eigen_error)?;
    let mut equivalence = None;
    let mut union_deviation = None;
    match vb {
        ValleyBoundary::Armchair { .. } => {
            let fam = BoundaryFamily::new(0.0).map_err(config)?;
            let two = fem::assemble_first_order(&mesh, &fam).map_err(config)?;
            let report =
                valley::spectral_equivalence_check(&four, &two, a.tol).map_err(valley_error)?;
            equivalence = Some(report);
        }
        ValleyBoundary::InfiniteMass => {
            let split = valley::split_infinite_mass(&four).map_err(valley_error)?;
            let first =
                eigen::full_pencil_spectrum(&split.k_first, &split.m_first).map_err(eigen_error)?;
            let second = eigen::full_pencil_spectrum(&split.k_second, &split.m_second)
                .map_err(eigen_error)?;
            let mut union: Vec<f64> = first.into_iter().chain(second).collect();
            union.sort_by(f64::total_cmp);
            let deviation = spectrum
                .iter()
                .zip(&union)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            if deviation > a.tol {
                return Err(CliError::Solver(format!(
                    "four-spinor spectrum deviates from the split-block union by {deviation:.3e} (tol {:.1e})",
                    a.tol
                )));
            }
            union_deviation = Some(deviation);
        }
        ValleyBoundary::Zigzag => unreachable!("assembly rejects zigzag before this point"),
    }
    let solve_ms = ms(start);
    let gap = spectrum
        .iter()
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min);
    let area = curve.area();
    let fam = BoundaryFamily::new(0.0).map_err(config)?;
    let bound = gap::gap_lower_bound(area, &fam).map_err(config)?;
    let verdict = if gap >= bound - a.budget {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let output = ValleyOutput {
        version: VERSION,
        config_hash: hash,
        domain: curve.label(),
        kind: vb,
        h: a.h,
        area,
        n_vertices: four.meta.n_vertices,
        n_reduced: four.meta.n_reduced,
        spectrum,
        gap,
        bound,
        budget: a.budget,
        margin: gap - bound,
        verdict,
        equivalence,
        union_deviation,
        timings: Timings {
            mesh_ms,
            assemble_ms,
            solve_ms,
        },
    };
    emit_json(&a.out, &output)?;
    Ok(strict_code(a.strict, verdict == Verdict::Fail))
}

fn run_export(a: ExportArgs) -> Result<i32, CliError> {
    let (spec, curve) = load_domain(&a.domain)?;
    let fam = BoundaryFamily::new(a.eta).map_err(config)?;
    let mesh = triangulate(&curve, a.h).map_err(config)?;
    let prob = match a.form {
        FormArg::Squared => fem::assemble(&mesh, &fam),
        FormArg::FirstOrder => fem::assemble_first_order(&mesh, &fam),
    }
    .map_err(config)?;
    let matrix = match a.matrix {
        MatrixArg::Form => &prob.s,
        MatrixArg::Mass => &prob.m,
        MatrixArg::Reduction => &prob.r,
    };
    let hash = config_hash(&json!({
        "command": "export-matrix", "domain": spec, "eta": a.eta, "h": a.h,
        "form": a.form, "matrix": a.matrix,
    }));
    let form_name = match a.form {
        FormArg::Squared => "squared",
        FormArg::FirstOrder => "first-order",
    };
    let matrix_name = match a.matrix {
        MatrixArg::Form => "form",
        MatrixArg::Mass => "mass",
        MatrixArg::Reduction => "reduction",
    };
    let mut text = format!(
        "# diracgap {VERSION} export-matrix\n# config {hash}\n# domain {} eta {} h {} form {form_name}\n# matrix {matrix_name} rows {} cols {} nnz {}\n# columns: row col re im\n",
        curve.label(),
        fmt_f64(a.eta),
        fmt_f64(a.h),
        matrix.rows,
        matrix.cols,
        matrix.nnz(),
    );
    for i in 0..matrix.rows {
        for (j, v) in matrix.row(i) {
            text.push_str(&format!("{i} {j} {} {}\n", fmt_f64(v.re), fmt_f64(v.im)));
        }
    }
    emit_text(&a.out, &text)?;
    Ok(EXIT_PASS)
}
