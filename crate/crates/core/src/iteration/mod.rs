//! Monotone iteration between a lower and an upper solution.
//!
//! With `J = T ∘ S`, the sequences `u_{k+1} = J(u_k)` from the lower solution
//! and `u^{k+1} = J(u^k)` from the upper solution satisfy
//!
//! ```text
//! lower ≤ u_1 ≤ u_2 ≤ … ≤ u_k ≤ … ≤ u^k ≤ … ≤ u^2 ≤ u^1 ≤ upper
//! ```
//!
//! whenever the system matrix is an M-matrix (nonnegative inverse) and `S` is
//! monotone. Each step is checked against that chain, and the limits are
//! certified by their defect.

mod export;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{mesh_quality, DiscreteDomain, Field, GeometryError};
use crate::krylov::norm_max;
use crate::linear_operator::{solve_t_with, LinearError, SolveOptions};
use crate::nonlinearity::{apply_s, check_alpha2, Alpha2Failure, NonlinearProblem, NonlinearityError};

pub use export::{write_solution_csv, write_solution_json, write_trace_csv, SolutionExport};

/// Relative slack for every ordering comparison.
pub const ORDERING_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum IterationError {
    #[error("field is negative at vertex {vertex} ({value}); lower and upper solutions must be nonnegative")]
    NegativeField { vertex: usize, value: f64 },
    #[error("bracket is not ordered: lower > upper at vertex {vertex}")]
    UnorderedBracket { vertex: usize },
    #[error("lower solution is identically zero")]
    LowerIdenticallyZero,
    #[error("not a lower solution: defect {defect:e} > {limit:e} at vertex {vertex}")]
    NotLowerSolution { vertex: usize, defect: f64, limit: f64 },
    #[error("not an upper solution: defect {defect:e} < -{limit:e} at vertex {vertex}")]
    NotUpperSolution { vertex: usize, defect: f64, limit: f64 },
    #[error("domain has {count} positive off-diagonal stiffness entries; monotone iteration needs an M-matrix")]
    NotMMatrix { count: usize },
    #[error("hypothesis {} fails", .0.clause)]
    Hypothesis(Alpha2Failure),
    #[error(
        "ordering violated in the {sequence} sequence at step {step}, vertex {vertex} (by {amount:e}); \
         the domain may not satisfy the comparison principle or the bracket is not verified"
    )]
    OrderingViolation { sequence: Sequence, step: usize, vertex: usize, amount: f64, trace: Box<IterationTrace> },
    #[error("bracket belongs to a different domain")]
    DomainMismatch,
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Nonlinearity(#[from] NonlinearityError),
}

pub type Result<T, E = IterationError> = std::result::Result<T, E>;

/// Which end of the bracket a sequence starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sequence {
    Lower,
    Upper,
}

impl std::fmt::Display for Sequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sequence::Lower => "lower",
            Sequence::Upper => "upper",
        })
    }
}

fn ordering_slack(a: &[f64], b: &[f64]) -> f64 {
    ORDERING_SLACK * norm_max(a).max(norm_max(b))
}

/// `(L + M·diag(a))v − S(v)`: entry `i` is the weak-form residual tested
/// against the nodal hat `φ_i`.
pub fn defect(problem: &NonlinearProblem<'_>, v: &Field) -> Result<Field> {
    let domain = problem.domain();
    v.ensure_on(domain)?;
    let s = apply_s(problem, v)?;
    let mut out = vec![0.0; v.len()];
    domain.apply_stiffness(v.values(), &mut out);
    let terms = domain.mass().iter().zip(problem.a().values()).zip(v.values()).zip(s.values());
    for (o, (((m, a), v), s)) in out.iter_mut().zip(terms) {
        *o += m * a * v - s;
    }
    Ok(Field::new(domain, out)?)
}

/// `‖M·diag(a)·v‖_∞` plus a machine floor; the reference size for defects.
pub fn defect_scale(problem: &NonlinearProblem<'_>, v: &[f64]) -> f64 {
    let domain = problem.domain();
    let m = v
        .iter()
        .zip(domain.mass())
        .zip(problem.a().values())
        .map(|((v, m), a)| (m * a * v).abs())
        .fold(0.0, f64::max);
    m + f64::EPSILON
}

/// Outcome of testing one bracket end against every nodal hat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub side: Sequence,
    pub holds: bool,
    pub limit: f64,
    /// First vertex where the defect has the wrong sign beyond `limit`.
    pub failing_vertex: Option<usize>,
    pub failing_defect: Option<f64>,
}

/// Tests `v` as a lower (defect ≤ tol·scale everywhere) or upper
/// (defect ≥ −tol·scale) solution. Every nonnegative test function is a
/// nonnegative combination of nodal hats, so nodal tests suffice.
pub fn check_bound(problem: &NonlinearProblem<'_>, v: &Field, tol: f64, side: Sequence) -> Result<BoundCheck> {
    v.ensure_on(problem.domain())?;
    if let Some((vertex, &value)) = v.values().iter().enumerate().find(|(_, &x)| x < 0.0) {
        return Err(IterationError::NegativeField { vertex, value });
    }
    let d = defect(problem, v)?;
    let limit = tol * defect_scale(problem, v.values());
    let failing = d.values().iter().position(|&x| match side {
        Sequence::Lower => x > limit,
        Sequence::Upper => x < -limit,
    });
    Ok(BoundCheck {
        side,
        holds: failing.is_none(),
        limit,
        failing_vertex: failing,
        failing_defect: failing.map(|i| d.values()[i]),
    })
}

pub fn verify_lower(problem: &NonlinearProblem<'_>, v: &Field, tol: f64) -> Result<bool> {
    Ok(check_bound(problem, v, tol, Sequence::Lower)?.holds)
}

pub fn verify_upper(problem: &NonlinearProblem<'_>, v: &Field, tol: f64) -> Result<bool> {
    Ok(check_bound(problem, v, tol, Sequence::Upper)?.holds)
}

/// A verified pair `0 ≤ lower ≤ upper`, `lower ≢ 0`, with `lower` a lower
/// solution and `upper` an upper solution.
#[derive(Debug, Clone)]
pub struct Bracket {
    lower: Field,
    upper: Field,
    verification_tol: f64,
}

impl Bracket {
    pub fn new(problem: &NonlinearProblem<'_>, lower: Field, upper: Field, verification_tol: f64) -> Result<Self> {
        let domain = problem.domain();
        lower.ensure_on(domain)?;
        upper.ensure_on(domain)?;
        if let Some(vertex) = lower.values().iter().zip(upper.values()).position(|(l, u)| l > u) {
            return Err(IterationError::UnorderedBracket { vertex });
        }
        let low = check_bound(problem, &lower, verification_tol, Sequence::Lower)?;
        if !(lower.max() > 0.0) {
            return Err(IterationError::LowerIdenticallyZero);
        }
        if let (Some(vertex), Some(defect)) = (low.failing_vertex, low.failing_defect) {
            return Err(IterationError::NotLowerSolution { vertex, defect, limit: low.limit });
        }
        let up = check_bound(problem, &upper, verification_tol, Sequence::Upper)?;
        if let (Some(vertex), Some(defect)) = (up.failing_vertex, up.failing_defect) {
            return Err(IterationError::NotUpperSolution { vertex, defect, limit: up.limit });
        }
        Ok(Bracket { lower, upper, verification_tol })
    }

    pub fn lower(&self) -> &Field {
        &self.lower
    }

    pub fn upper(&self) -> &Field {
        &self.upper
    }

    pub fn verification_tol(&self) -> f64 {
        self.verification_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterationConfig {
    /// Stop once a sequence moves by at most `tol` in max-norm.
    pub tol: f64,
    /// Relative residual target of each linear solve.
    pub linear_tol: f64,
    pub max_steps: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig { tol: 1e-9, linear_tol: 1e-11, max_steps: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub max_change: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub defect_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IterationTrace {
    pub lower: Vec<StepRecord>,
    pub upper: Vec<StepRecord>,
    pub ordering_violations: usize,
    pub steps: usize,
    pub converged: bool,
}

impl IterationTrace {
    /// Observed per-step contraction `change_{k+1}/change_k` of one sequence.
    pub fn contraction_rates(&self, sequence: Sequence) -> Vec<f64> {
        let records = match sequence {
            Sequence::Lower => &self.lower,
            Sequence::Upper => &self.upper,
        };
        records
            .windows(2)
            .filter(|w| w[0].max_change > 0.0)
            .map(|w| w[1].max_change / w[0].max_change)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair {
    /// Limit of the sequence from below: the minimal solution in the bracket.
    pub u_star: Field,
    /// Limit of the sequence from above: the maximal solution in the bracket.
    pub u_upper_star: Field,
    pub residual_lower: f64,
    pub residual_upper: f64,
    /// `max|u^* − u_*| ≤ 10·tol`.
    pub coincide: bool,
}

impl SolutionPair {
    /// `lower ≤ u_* ≤ u^* ≤ upper` entrywise within the ordering slack.
    pub fn sandwiched_by(&self, bracket: &Bracket) -> bool {
        let chain = [bracket.lower(), &self.u_star, &self.u_upper_star, bracket.upper()];
        chain.windows(2).all(|w| {
            let slack = ordering_slack(w[0].values(), w[1].values());
            w[0].values().iter().zip(w[1].values()).all(|(a, b)| *a <= b + slack)
        })
    }
}

/// Strict positivity of a solution, the discrete counterpart of the strong
/// maximum principle. Meaningful on connected domains only.
pub fn positivity_check(domain: &DiscreteDomain, u: &Field) -> bool {
    debug_assert_eq!(u.len(), domain.vertex_count());
    u.min() > 0.0
}

struct Walker {
    sequence: Sequence,
    current: Field,
    records: Vec<StepRecord>,
    done: bool,
}

/// Runs both monotone sequences in lockstep until each moves by at most
/// `config.tol` and its defect is at most `10·tol·scale`.
///
/// Every step is checked against the chain `u_k ≤ u_{k+1} ≤ u^{k+1} ≤ u^k`
/// within [`ORDERING_SLACK`]; a violation aborts with the partial trace. Hitting
/// `max_steps` is not an error: the trace comes back with `converged = false`.
pub fn iterate_monotone(
    problem: &NonlinearProblem<'_>,
    bracket: &Bracket,
    config: &IterationConfig,
) -> Result<(SolutionPair, IterationTrace)> {
    let domain = problem.domain();
    for tol in [config.tol, config.linear_tol] {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(IterationError::BadTolerance(tol));
        }
    }
    if bracket.lower.ensure_on(domain).is_err() {
        return Err(IterationError::DomainMismatch);
    }
    let quality = mesh_quality(domain);
    if !quality.is_m_matrix_compatible {
        return Err(IterationError::NotMMatrix { count: quality.positive_offdiagonal_count });
    }
    if let Some(failure) = check_alpha2(problem).failure {
        return Err(IterationError::Hypothesis(failure));
    }
    let linear = problem.linear_problem()?;

    let mut walkers = [
        Walker { sequence: Sequence::Lower, current: bracket.lower.clone(), records: Vec::new(), done: false },
        Walker { sequence: Sequence::Upper, current: bracket.upper.clone(), records: Vec::new(), done: false },
    ];
    let mut trace = IterationTrace::default();

    let fail = |trace: &mut IterationTrace, walkers: &[Walker; 2], sequence, step, vertex, amount| {
        trace.ordering_violations += 1;
        trace.lower = walkers[0].records.clone();
        trace.upper = walkers[1].records.clone();
        trace.steps = step;
        IterationError::OrderingViolation { sequence, step, vertex, amount, trace: Box::new(trace.clone()) }
    };

    for step in 1..=config.max_steps {
        let mut violation = None;
        for w in walkers.iter_mut().filter(|w| !w.done) {
            let psi = apply_s(problem, &w.current)?;
            let options = SolveOptions {
                tol: config.linear_tol,
                max_iterations: None,
                initial_guess: Some(w.current.values()),
            };
            let (next, _) = solve_t_with(&linear, &psi, &options)?;

            let cur = w.current.values();
            let nxt = next.values();
            let slack = ordering_slack(cur, nxt);
            // lower sequence must rise, upper must fall
            let worst = cur
                .iter()
                .zip(nxt)
                .map(|(c, n)| match w.sequence {
                    Sequence::Lower => c - n,
                    Sequence::Upper => n - c,
                })
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
            if worst.1 > slack {
                violation = Some((w.sequence, worst.0, worst.1));
                break;
            }

            let max_change = cur.iter().zip(nxt).map(|(c, n)| (c - n).abs()).fold(0.0, f64::max);
            let defect_norm = defect(problem, &next)?.norm_max();
            let scale = defect_scale(problem, nxt);
            w.records.push(StepRecord { step, max_change, min_u: next.min(), max_u: next.max(), defect_norm });
            w.current = next;
            w.done = max_change <= config.tol && defect_norm <= 10.0 * config.tol * scale;
        }

        if let Some((sequence, vertex, amount)) = violation {
            return Err(fail(&mut trace, &walkers, sequence, step, vertex, amount));
        }
        let (lo, up) = (walkers[0].current.values(), walkers[1].current.values());
        let slack = ordering_slack(lo, up);
        if let Some((vertex, amount)) =
            lo.iter().zip(up).map(|(l, u)| l - u).enumerate().find(|&(_, gap)| gap > slack)
        {
            return Err(fail(&mut trace, &walkers, Sequence::Lower, step, vertex, amount));
        }
        trace.steps = step;
        if walkers.iter().all(|w| w.done) {
            break;
        }
    }

    let [lower_walker, upper_walker] = walkers;
    trace.converged = lower_walker.done && upper_walker.done;
    trace.lower = lower_walker.records;
    trace.upper = upper_walker.records;

    let residual_lower = defect(problem, &lower_walker.current)?.norm_max();
    let residual_upper = defect(problem, &upper_walker.current)?.norm_max();
    let gap = lower_walker
        .current
        .values()
        .iter()
        .zip(upper_walker.current.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let pair = SolutionPair {
        u_star: lower_walker.current,
        u_upper_star: upper_walker.current,
        residual_lower,
        residual_upper,
        coincide: gap <= 10.0 * config.tol,
    };
    Ok((pair, trace))
}
