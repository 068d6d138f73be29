//! The linear solution operator `T`: given a functional `ψ`, the unique `u`
//! with `(L + M·diag(a)) u = ψ`.
//!
//! `u` is obtained by minimizing the energy
//! `I(u) = ½uᵀLu + ½uᵀM·diag(a)u − uᵀψ` with Jacobi-preconditioned conjugate
//! gradients. The system matrix is symmetric positive definite whenever
//! `a > 0`, with coercivity constant `C = min{1, min a}` relative to the
//! discrete `H¹` form `L + M`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{mesh_quality, DiscreteDomain, DomainId, Field, GeometryError};
use crate::krylov::{self, norm2, norm_max};

/// Default relative residual tolerance for [`solve_t`].
pub const DEFAULT_SOLVE_TOL: f64 = 1e-10;

/// Relative slack allowed by [`check_comparison`].
pub const COMPARISON_SLACK: f64 = 1e-9;

/// Largest domain for which dense dual norms are computed.
pub const MAX_DENSE_VERTICES: usize = 2000;

#[derive(Debug, Error)]
pub enum LinearError {
    #[error("coefficient a must be positive; a[{vertex}] = {value}")]
    NonPositiveCoefficient { vertex: usize, value: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error(
        "conjugate gradients stopped after {iterations} iterations with residual {residual:e} \
         (target {target:e}); the system may be nearly singular or badly conditioned"
    )]
    NotConverged { iterations: usize, residual: f64, target: f64 },
    #[error("comparison requires psi1 <= psi2, violated at vertex {vertex}")]
    Unordered { vertex: usize },
    #[error("domain has {count} positive off-diagonal stiffness entries; the comparison principle is unavailable")]
    NotMMatrix { count: usize },
    #[error("{vertex_count} vertices exceeds the dense limit of {max}")]
    TooLarge { vertex_count: usize, max: usize },
    #[error("dense factorization failed")]
    Factorization,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T, E = LinearError> = std::result::Result<T, E>;

/// A functional on the discrete space: entry `i` is `⟨ψ, φ_i⟩` for the nodal
/// hat function `φ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    values: Vec<f64>,
    domain: DomainId,
}

impl DualVector {
    pub fn new(domain: &DiscreteDomain, values: Vec<f64>) -> Result<Self> {
        // same validation as a field
        let field = Field::new(domain, values)?;
        Ok(DualVector { domain: field.domain_id(), values: field.into_values() })
    }

    pub fn zeros(domain: &DiscreteDomain) -> Self {
        DualVector { values: vec![0.0; domain.vertex_count()], domain: domain.id() }
    }

    pub(crate) fn from_parts(values: Vec<f64>, domain: DomainId) -> Self {
        DualVector { values, domain }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain_id(&self) -> DomainId {
        self.domain
    }

    pub fn ensure_on(&self, domain: &DiscreteDomain) -> Result<()> {
        if self.domain != domain.id() {
            return Err(GeometryError::DomainMismatch.into());
        }
        Ok(())
    }
}

/// `⟨ψ, φ⟩ = ∫ψφ dV`: the functional represented by a function, i.e. `M·field`.
pub fn embed_function(domain: &DiscreteDomain, field: &Field) -> Result<DualVector> {
    field.ensure_on(domain)?;
    let values = field.values().iter().zip(domain.mass()).map(|(v, m)| v * m).collect();
    Ok(DualVector::from_parts(values, domain.id()))
}

/// `Δu + a u = ψ` on a fixed domain with a positive coefficient `a`.
#[derive(Debug, Clone)]
pub struct LinearProblem<'d> {
    domain: &'d DiscreteDomain,
    a: Field,
    /// Diagonal `M·a` added to the stiffness.
    reaction: Vec<f64>,
    /// Jacobi preconditioner: diagonal of the system matrix.
    jacobi: Vec<f64>,
    coercivity: f64,
}

impl<'d> LinearProblem<'d> {
    pub fn new(domain: &'d DiscreteDomain, a: Field) -> Result<Self> {
        a.ensure_on(domain)?;
        if let Some((vertex, &value)) = a.values().iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(LinearError::NonPositiveCoefficient { vertex, value });
        }
        let reaction: Vec<f64> = a.values().iter().zip(domain.mass()).map(|(a, m)| a * m).collect();
        let l = domain.stiffness();
        let jacobi = (0..domain.vertex_count())
            .map(|i| {
                let row = l.row(i);
                let lii: f64 = row
                    .col_indices()
                    .iter()
                    .zip(row.values())
                    .filter(|(&j, _)| j == i)
                    .map(|(_, v)| v)
                    .sum();
                lii + reaction[i]
            })
            .collect();
        let coercivity = a.min().min(1.0);
        Ok(LinearProblem { domain, a, reaction, jacobi, coercivity })
    }

    pub fn domain(&self) -> &'d DiscreteDomain {
        self.domain
    }

    pub fn coefficient(&self) -> &Field {
        &self.a
    }

    /// `C = min{1, min a}`.
    pub fn coercivity_constant(&self) -> f64 {
        self.coercivity
    }

    /// `out = (L + M·diag(a))·u`.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        self.domain.apply_stiffness(u, out);
        for ((o, r), v) in out.iter_mut().zip(&self.reaction).zip(u) {
            *o += r * v;
        }
    }

    /// `uᵀ(L + M·diag(a))u`.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        let mut out = vec![0.0; u.len()];
        self.apply(u, &mut out);
        krylov::dot(u, &out)
    }

    /// `I(u) = ½uᵀA u − uᵀψ`.
    pub fn energy(&self, u: &[f64], psi: &DualVector) -> f64 {
        0.5 * self.quadratic_form(u) - krylov::dot(u, psi.values())
    }

    /// Dense copy of the system matrix, for test-scale checks.
    pub fn system_matrix_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.domain.vertex_count();
        if n > MAX_DENSE_VERTICES {
            return Err(LinearError::TooLarge { vertex_count: n, max: MAX_DENSE_VERTICES });
        }
        let mut a = DMatrix::from(self.domain.stiffness());
        for i in 0..n {
            a[(i, i)] += self.reaction[i];
        }
        Ok(a)
    }
}

/// Per-solve diagnostics; serializes as
/// `{iterations, final_residual_norm, energy_history}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub energy_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions<'a> {
    /// Relative residual target; absolute when `ψ = 0`.
    pub tol: f64,
    /// Defaults to `10·vertex_count`.
    pub max_iterations: Option<usize>,
    pub initial_guess: Option<&'a [f64]>,
}

impl Default for SolveOptions<'_> {
    fn default() -> Self {
        SolveOptions { tol: DEFAULT_SOLVE_TOL, max_iterations: None, initial_guess: None }
    }
}

/// Applies `T`: returns `u` with `‖A u − ψ‖₂ ≤ tol·‖ψ‖₂` (absolute `tol` if
/// `ψ = 0`), starting from zero.
pub fn solve_t(problem: &LinearProblem<'_>, psi: &DualVector, tol: f64) -> Result<(Field, SolveReport)> {
    solve_t_with(problem, psi, &SolveOptions { tol, ..Default::default() })
}

pub fn solve_t_with(
    problem: &LinearProblem<'_>,
    psi: &DualVector,
    options: &SolveOptions<'_>,
) -> Result<(Field, SolveReport)> {
    psi.ensure_on(problem.domain)?;
    if !(options.tol > 0.0 && options.tol.is_finite()) {
        return Err(LinearError::BadTolerance(options.tol));
    }
    let n = problem.domain.vertex_count();
    let mut u = match options.initial_guess {
        Some(x0) => {
            let x0 = Field::new(problem.domain, x0.to_vec())?;
            x0.into_values()
        }
        None => vec![0.0; n],
    };
    let psi_norm = norm2(psi.values());
    let target = if psi_norm > 0.0 { options.tol * psi_norm } else { options.tol };
    let max_iterations = options.max_iterations.unwrap_or(10 * n);
    let outcome = krylov::pcg(
        |x, out| problem.apply(x, out),
        &problem.jacobi,
        psi.values(),
        &mut u,
        target,
        max_iterations,
    );
    if !outcome.converged {
        return Err(LinearError::NotConverged {
            iterations: outcome.iterations,
            residual: outcome.residual_norm,
            target,
        });
    }
    let report = SolveReport {
        iterations: outcome.iterations,
        final_residual_norm: outcome.residual_norm,
        energy_history: outcome.energy_history,
    };
    Ok((Field::from_parts(u, problem.domain.id()), report))
}

/// Discrete weak comparison: solves for both functionals and reports whether
/// `T(ψ₁) ≤ T(ψ₂)` entrywise within `1e-9·max(‖u₁‖_∞, ‖u₂‖_∞)`.
///
/// Refuses domains whose stiffness has positive off-diagonal entries, and
/// rejects inputs with `ψ₁ ≰ ψ₂`.
pub fn check_comparison(problem: &LinearProblem<'_>, psi1: &DualVector, psi2: &DualVector) -> Result<bool> {
    psi1.ensure_on(problem.domain)?;
    psi2.ensure_on(problem.domain)?;
    let quality = mesh_quality(problem.domain);
    if !quality.is_m_matrix_compatible {
        return Err(LinearError::NotMMatrix { count: quality.positive_offdiagonal_count });
    }
    if let Some(vertex) = psi1.values().iter().zip(psi2.values()).position(|(a, b)| a > b) {
        return Err(LinearError::Unordered { vertex });
    }
    let (u1, _) = solve_t(problem, psi1, 1e-13)?;
    let (u2, _) = solve_t(problem, psi2, 1e-13)?;
    let slack = COMPARISON_SLACK * u1.norm_max().max(u2.norm_max());
    Ok(u1.values().iter().zip(u2.values()).all(|(a, b)| *a <= b + slack))
}

/// `vᵀ(L + M)v`, the squared discrete `H¹` norm.
pub fn h1_norm_squared(domain: &DiscreteDomain, v: &[f64]) -> f64 {
    let mut lv = vec![0.0; v.len()];
    domain.apply_stiffness(v, &mut lv);
    v.iter().zip(&lv).zip(domain.mass()).map(|((x, l), m)| x * (l + m * x)).sum()
}

fn h1_matrix_dense(domain: &DiscreteDomain) -> Result<DMatrix<f64>> {
    let n = domain.vertex_count();
    if n > MAX_DENSE_VERTICES {
        return Err(LinearError::TooLarge { vertex_count: n, max: MAX_DENSE_VERTICES });
    }
    let mut g = DMatrix::from(domain.stiffness());
    for (i, m) in domain.mass().iter().enumerate() {
        g[(i, i)] += m;
    }
    Ok(g)
}

/// `rᵀ(L + M)⁻¹r`, the squared dual norm, by dense Cholesky.
pub fn dual_norm_squared(domain: &DiscreteDomain, r: &[f64]) -> Result<f64> {
    let g = h1_matrix_dense(domain)?;
    let chol = g.cholesky().ok_or(LinearError::Factorization)?;
    let rv = DVector::from_column_slice(r);
    let y = chol.solve(&rv);
    Ok(rv.dot(&y))
}

/// Returns `(‖u₁ − u₂‖_{H¹}, ‖ψ₁ − ψ₂‖_* / C)` for `u_i = T(ψ_i)`; the
/// continuity estimate of `T` says the first never exceeds the second.
pub fn lipschitz_certificate(
    problem: &LinearProblem<'_>,
    psi1: &DualVector,
    psi2: &DualVector,
) -> Result<(f64, f64)> {
    psi1.ensure_on(problem.domain)?;
    psi2.ensure_on(problem.domain)?;
    let n = problem.domain.vertex_count();
    if n > MAX_DENSE_VERTICES {
        return Err(LinearError::TooLarge { vertex_count: n, max: MAX_DENSE_VERTICES });
    }
    let r: Vec<f64> = psi1.values().iter().zip(psi2.values()).map(|(a, b)| a - b).collect();
    if r.iter().all(|&x| x == 0.0) {
        return Ok((0.0, 0.0));
    }
    // T is linear, so u₁ − u₂ = T(ψ₁ − ψ₂); one solve avoids cancellation.
    let (du, _) = solve_t(problem, &DualVector::from_parts(r.clone(), problem.domain.id()), 1e-12)?;
    let lhs = h1_norm_squared(problem.domain, du.values()).max(0.0).sqrt();
    let rhs = dual_norm_squared(problem.domain, &r)?.max(0.0).sqrt() / problem.coercivity;
    Ok((lhs, rhs))
}

/// Max-norm of the residual `A u − ψ`, useful for verifying a solve.
pub fn residual_max(problem: &LinearProblem<'_>, u: &Field, psi: &DualVector) -> f64 {
    let mut out = vec![0.0; u.len()];
    problem.apply(u.values(), &mut out);
    for (o, p) in out.iter_mut().zip(psi.values()) {
        *o -= p;
    }
    norm_max(&out)
}
