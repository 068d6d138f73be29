//! Scenario files and the commands behind the CLI.
//!
//! Exit codes: [`EXIT_SUCCESS`] on success, [`EXIT_FAILURE`] when a hypothesis
//! fails, the bracket does not verify or the iteration does not converge, and
//! [`EXIT_INPUT`] for unreadable or malformed input and I/O errors.

mod scenario;

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{mesh_quality, smallest_eigenvalues, GeometryError, MeshQualityReport};
use crate::iteration::{
    check_bound, iterate_monotone, positivity_check, write_solution_csv, write_solution_json, write_trace_csv,
    BoundCheck, Bracket, IterationError, Sequence,
};
use crate::nonlinearity::{check_alpha1, check_alpha2, Alpha1Report, Alpha2Report, NonlinearityError};

pub use scenario::{
    BracketSpec, Coefficient, DomainSpec, LoadedScenario, NonlinearityPair, NonlinearitySpec, Scenario,
};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const SOLUTION_JSON: &str = "solution.json";
pub const SOLUTION_CSV: &str = "solution.csv";
pub const TRACE_CSV: &str = "trace.csv";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Debug, Error)]
pub enum AppError {
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Failure(_) => EXIT_FAILURE,
            AppError::Input(_) | AppError::Io(_) => EXIT_INPUT,
        }
    }
}

impl From<GeometryError> for AppError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Io(io) => AppError::Io(io),
            other => AppError::Input(other.to_string()),
        }
    }
}

impl From<IterationError> for AppError {
    fn from(e: IterationError) -> Self {
        match e {
            IterationError::Geometry(g) => g.into(),
            IterationError::BadTolerance(_) | IterationError::DomainMismatch => AppError::Input(e.to_string()),
            other => AppError::Failure(other.to_string()),
        }
    }
}

fn hypothesis_error(e: NonlinearityError) -> AppError {
    AppError::Failure(e.to_string())
}

/// Results of the four pre-iteration checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub alpha1: Alpha1Report,
    pub alpha2: Alpha2Report,
    pub lower: BoundCheck,
    pub upper: BoundCheck,
    pub bracket_ordered: bool,
    pub lower_nonzero: bool,
    pub mesh: MeshQualityReport,
    pub passed: bool,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        write!(f, "growth bounds (n = {}, q = {}): {}", self.alpha1.n, self.alpha1.q, mark(self.alpha1.passed))?;
        if let Some(v) = &self.alpha1.violation {
            write!(f, " [{} at t = {}: {} vs bound {}]", v.clause, v.t, v.value, v.bound)?;
        }
        if self.alpha1.q_at_least_one {
            write!(f, " (warning: q >= 1)")?;
        }
        write!(f, "\nsign conditions: {}", mark(self.alpha2.passed))?;
        if let Some(fail) = &self.alpha2.failure {
            write!(f, " [{}", fail.clause)?;
            if let Some(v) = fail.vertex {
                write!(f, " violated at vertex {v}")?;
            }
            write!(f, "]")?;
        }
        for b in [&self.lower, &self.upper] {
            write!(f, "\n{} solution: {}", b.side, mark(b.holds))?;
            if let (Some(v), Some(d)) = (b.failing_vertex, b.failing_defect) {
                write!(f, " [defect {d:e} at vertex {v}, limit {:e}]", b.limit)?;
            }
        }
        if !self.bracket_ordered {
            write!(f, "\nbracket: FAIL [lower > upper somewhere]")?;
        }
        if !self.lower_nonzero {
            write!(f, "\nbracket: FAIL [lower is identically zero]")?;
        }
        if !self.mesh.is_m_matrix_compatible {
            write!(
                f,
                "\nwarning: {} positive off-diagonal stiffness entries; iteration will refuse this domain",
                self.mesh.positive_offdiagonal_count
            )?;
        }
        write!(f, "\n{}", if self.passed { "all checks pass" } else { "checks failed" })
    }
}

fn run_checks(loaded: &LoadedScenario) -> Result<CheckReport, AppError> {
    let domain = loaded.build_domain()?;
    let problem = loaded.build_problem(&domain)?;
    let (lower, upper) = loaded.bracket_fields(&domain)?;
    let s = &loaded.scenario;
    let t_max = s.t_max.unwrap_or(2.0 * upper.max());
    let alpha1 = check_alpha1(problem.nonlinearity_f(), problem.nonlinearity_h(), problem.dimension(), s.q()?, t_max)
        .map_err(hypothesis_error)?;
    let alpha2 = check_alpha2(&problem);
    let tol = s.bracket.verification_tol;
    let lower_check = check_bound(&problem, &lower, tol, Sequence::Lower)?;
    let upper_check = check_bound(&problem, &upper, tol, Sequence::Upper)?;
    let bracket_ordered = lower.values().iter().zip(upper.values()).all(|(l, u)| l <= u);
    let lower_nonzero = lower.max() > 0.0;
    let passed =
        alpha1.passed && alpha2.passed && lower_check.holds && upper_check.holds && bracket_ordered && lower_nonzero;
    Ok(CheckReport {
        alpha1,
        alpha2,
        lower: lower_check,
        upper: upper_check,
        bracket_ordered,
        lower_nonzero,
        mesh: mesh_quality(&domain),
        passed,
    })
}

/// Runs the growth, sign and bracket checks. The caller exits with
/// [`EXIT_FAILURE`] when `passed` is false.
pub fn cmd_check(scenario_path: impl AsRef<Path>) -> Result<CheckReport, AppError> {
    run_checks(&Scenario::load(scenario_path)?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BracketVerified {
    pub lower: bool,
    pub upper: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub alpha1_report: Alpha1Report,
    pub alpha2_report: Alpha2Report,
    pub bracket_verified: BracketVerified,
    pub converged: bool,
    pub steps: usize,
    pub ordering_violations: usize,
    pub residual_lower: f64,
    pub residual_upper: f64,
    pub coincide: bool,
    pub min_u_star: f64,
    pub positive: bool,
    /// Kept out of the JSON so repeated runs produce identical files.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOverrides {
    /// Also sets the linear tolerance to `tol/100`.
    pub tol: Option<f64>,
    pub max_steps: Option<usize>,
}

fn create(path: &Path) -> Result<BufWriter<File>, AppError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Checks, iterates and writes `solution.json`, `solution.csv`, `trace.csv`
/// and `summary.json` into `out_dir`. A run that hits the step cap still
/// writes every artifact, with `converged = false` in the summary.
pub fn cmd_solve(
    scenario_path: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
    overrides: SolveOverrides,
) -> Result<RunSummary, AppError> {
    let start = Instant::now();
    let out_dir = out_dir.as_ref();
    let mut loaded = Scenario::load(scenario_path)?;
    if let Some(tol) = overrides.tol {
        loaded.scenario.solver.tol = tol;
        loaded.scenario.solver.linear_tol = tol / 100.0;
    }
    if let Some(steps) = overrides.max_steps {
        loaded.scenario.solver.max_steps = steps;
    }

    let report = run_checks(&loaded)?;
    if !report.passed {
        return Err(AppError::Failure(report.to_string()));
    }

    let domain = loaded.build_domain()?;
    let problem = loaded.build_problem(&domain)?;
    let (lower, upper) = loaded.bracket_fields(&domain)?;
    let bracket = Bracket::new(&problem, lower, upper, loaded.scenario.bracket.verification_tol)?;
    std::fs::create_dir_all(out_dir)?;

    let (pair, trace) = match iterate_monotone(&problem, &bracket, &loaded.scenario.solver) {
        Ok(result) => result,
        Err(IterationError::OrderingViolation { sequence, step, vertex, amount, trace }) => {
            write_trace_csv(&trace, create(&out_dir.join(TRACE_CSV))?)?;
            return Err(AppError::Failure(format!(
                "ordering violated in the {sequence} sequence at step {step}, vertex {vertex} (by {amount:e}); \
                 partial trace written"
            )));
        }
        Err(e) => return Err(e.into()),
    };

    write_solution_json(&pair, create(&out_dir.join(SOLUTION_JSON))?)?;
    write_solution_csv(&pair, domain.coordinates(), create(&out_dir.join(SOLUTION_CSV))?)?;
    write_trace_csv(&trace, create(&out_dir.join(TRACE_CSV))?)?;

    let summary = RunSummary {
        alpha1_report: report.alpha1,
        alpha2_report: report.alpha2,
        bracket_verified: BracketVerified { lower: report.lower.holds, upper: report.upper.holds },
        converged: trace.converged,
        steps: trace.steps,
        ordering_violations: trace.ordering_violations,
        residual_lower: pair.residual_lower,
        residual_upper: pair.residual_upper,
        coincide: pair.coincide,
        min_u_star: pair.u_star.min(),
        positive: domain.is_connected() && positivity_check(&domain, &pair.u_star),
        wall_time: Duration::ZERO,
    };
    let mut file = create(&out_dir.join(SUMMARY_JSON))?;
    serde_json::to_writer_pretty(&mut file, &summary).map_err(std::io::Error::other)?;
    std::io::Write::flush(&mut file)?;
    Ok(RunSummary { wall_time: start.elapsed(), ..summary })
}

/// The `k` smallest eigenvalues of `Lx = λMx`, ascending.
pub fn cmd_spectrum(scenario_path: impl AsRef<Path>, k: usize) -> Result<Vec<f64>, AppError> {
    let loaded = Scenario::load(scenario_path)?;
    let domain = loaded.build_domain()?;
    match smallest_eigenvalues(&domain, k) {
        Ok(v) => Ok(v),
        Err(GeometryError::EigenNotConverged { .. }) => {
            Err(AppError::Failure("eigenvalue iteration did not converge".into()))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshInfo {
    pub kind: String,
    pub vertex_count: usize,
    pub face_count: Option<usize>,
    pub declared_dimension: usize,
    pub total_mass: f64,
    pub connected: bool,
    pub quality: MeshQualityReport,
}

pub fn cmd_mesh_info(scenario_path: impl AsRef<Path>) -> Result<MeshInfo, AppError> {
    let loaded = Scenario::load(scenario_path)?;
    let domain = loaded.build_domain()?;
    Ok(MeshInfo {
        kind: domain.kind().name().to_owned(),
        vertex_count: domain.vertex_count(),
        face_count: domain.faces().map(<[_]>::len),
        declared_dimension: domain.declared_dimension(),
        total_mass: domain.total_mass(),
        connected: domain.is_connected(),
        quality: mesh_quality(&domain),
    })
}
