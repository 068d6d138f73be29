//! Monotone sub/supersolution iteration for semilinear elliptic equations
//!
//! ```text
//!     Δu + a(x) u = f(x) F(u) + h(x) H(u)
//! ```
//!
//! on discretized compact manifolds (closed triangle surfaces and flat
//! periodic grids). `Δ` is the nonnegative Laplacian, so the discrete system
//! matrix is `L + M·diag(a)` with `L` the stiffness matrix and `M` the lumped
//! mass matrix.
//!
//! Given a verified lower/upper solution pair, [`iteration::iterate_monotone`]
//! runs `u_{k+1} = T(S(u_k))` from both ends of the bracket, where
//! [`linear_operator::solve_t`] inverts the linear part and
//! [`nonlinearity::apply_s`] evaluates the right-hand side. The two sequences
//! converge monotonically to the minimal and maximal solutions inside the
//! bracket.
//!
//! Module map:
//!
//! - [`geometry`]: domains, fields, stiffness/mass assembly, mesh quality, spectra.
//! - [`linear_operator`]: the SPD solve `T`, comparison and Lipschitz checks.
//! - [`nonlinearity`]: the substitution operator `S`, hypothesis checkers,
//!   coefficient expressions.
//! - [`iteration`]: defect, bracket verification, the monotone driver.
//! - [`app`]: JSON scenarios and the command implementations behind the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the matrix formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod app;
pub mod geometry;
pub mod iteration;
mod krylov;
pub mod linear_operator;
pub mod nonlinearity;

pub use geometry::{DiscreteDomain, DomainKind, Field};
pub use iteration::{iterate_monotone, Bracket, IterationConfig, IterationTrace, SolutionPair};
pub use linear_operator::{solve_t, DualVector, LinearProblem, SolveReport};
pub use nonlinearity::{apply_s, NonlinearProblem, ScalarNonlinearity};
