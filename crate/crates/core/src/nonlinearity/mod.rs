//! The right-hand side `f(x)F(u) + h(x)H(u)` and its substitution operator
//! `S`, with checkers for the growth and sign hypotheses.

mod expr;
mod hypotheses;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DiscreteDomain, Field, GeometryError};
use crate::linear_operator::{DualVector, LinearError, LinearProblem};

pub use expr::{parse_coefficient, Expr, ExprError};
pub use hypotheses::{
    check_alpha1, check_alpha2, Alpha1Clause, Alpha1Report, Alpha1Violation, Alpha2Clause, Alpha2Failure,
    Alpha2Report, ALPHA1_SAMPLES,
};

#[derive(Debug, Error)]
pub enum NonlinearityError {
    #[error("power exponent must be positive and finite, got {0}")]
    BadExponent(f64),
    #[error("table needs at least two rows")]
    TableTooShort,
    #[error("table t column must be strictly increasing (row {row})")]
    TableNotIncreasing { row: usize },
    #[error("table values must be non-decreasing (row {row})")]
    TableNotMonotone { row: usize },
    #[error("table entry at row {row} is not finite")]
    TableNonFinite { row: usize },
    #[error("table CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("table CSV header must be 't,value'")]
    TableHeader,
    #[error("critical exponent needs n >= 3, got n = {0}")]
    DimensionTooSmall(usize),
    #[error("q must satisfy 0 < q < 2*-1 = {upper}, got {q}")]
    QOutOfRange { q: f64, upper: f64 },
    #[error("t_max must be positive and finite, got {0}")]
    BadTMax(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Linear(#[from] LinearError),
}

pub type Result<T, E = NonlinearityError> = std::result::Result<T, E>;

/// A non-decreasing scalar nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarNonlinearity {
    /// `t^p` for `t ≥ 0`, `0` for `t < 0`.
    Power { exponent: f64 },
    /// Piecewise-linear interpolation through `(t, value)` knots, held
    /// constant outside the knot range. Not truncated at zero: a table is
    /// evaluated as given, and the vanishing on `t < 0` is a hypothesis
    /// checked by [`check_alpha1`].
    Table { t: Vec<f64>, values: Vec<f64> },
}

impl ScalarNonlinearity {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(NonlinearityError::BadExponent(exponent));
        }
        Ok(ScalarNonlinearity::Power { exponent })
    }

    /// Validates a table: at least two knots, finite, strictly increasing `t`,
    /// non-decreasing values.
    pub fn table(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != values.len() {
            return Err(NonlinearityError::TableTooShort);
        }
        for row in 0..t.len() {
            if !t[row].is_finite() || !values[row].is_finite() {
                return Err(NonlinearityError::TableNonFinite { row });
            }
            if row > 0 && !(t[row] > t[row - 1]) {
                return Err(NonlinearityError::TableNotIncreasing { row });
            }
            if row > 0 && values[row] < values[row - 1] {
                return Err(NonlinearityError::TableNotMonotone { row });
            }
        }
        Ok(ScalarNonlinearity::Table { t, values })
    }

    /// Reads a CSV table with header `t,value`.
    pub fn table_from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
            return Err(NonlinearityError::TableHeader);
        }
        let mut t = Vec::new();
        let mut values = Vec::new();
        for record in reader.deserialize::<(f64, f64)>() {
            let (ti, vi) = record?;
            t.push(ti);
            values.push(vi);
        }
        Self::table(t, values)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ScalarNonlinearity::Power { exponent } => {
                if s > 0.0 {
                    s.powf(*exponent)
                } else {
                    0.0
                }
            }
            ScalarNonlinearity::Table { t, values } => {
                let last = t.len() - 1;
                if s <= t[0] {
                    return values[0];
                }
                if s >= t[last] {
                    return values[last];
                }
                let k = t.partition_point(|&ti| ti <= s) - 1;
                let w = (s - t[k]) / (t[k + 1] - t[k]);
                values[k] + w * (values[k + 1] - values[k])
            }
        }
    }
}

/// `2* = 2n/(n−2)`, defined for `n ≥ 3`.
pub fn critical_exponent(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(NonlinearityError::DimensionTooSmall(n));
    }
    Ok(2.0 * n as f64 / (n as f64 - 2.0))
}

/// `Δu + a u = f F(u) + h H(u)` on a domain with declared dimension `n`.
///
/// Construction only checks that the fields live on `domain`; the sign
/// conditions are reported by [`check_alpha2`] and the growth bounds by
/// [`check_alpha1`].
#[derive(Debug, Clone)]
pub struct NonlinearProblem<'d> {
    domain: &'d DiscreteDomain,
    a: Field,
    f: Field,
    h: Field,
    nonlinearity_f: ScalarNonlinearity,
    nonlinearity_h: ScalarNonlinearity,
    dimension: usize,
}

impl<'d> NonlinearProblem<'d> {
    pub fn new(
        domain: &'d DiscreteDomain,
        a: Field,
        f: Field,
        h: Field,
        nonlinearity_f: ScalarNonlinearity,
        nonlinearity_h: ScalarNonlinearity,
    ) -> Result<Self> {
        a.ensure_on(domain)?;
        f.ensure_on(domain)?;
        h.ensure_on(domain)?;
        Ok(NonlinearProblem {
            domain,
            a,
            f,
            h,
            nonlinearity_f,
            nonlinearity_h,
            dimension: domain.declared_dimension(),
        })
    }

    pub fn domain(&self) -> &'d DiscreteDomain {
        self.domain
    }

    pub fn a(&self) -> &Field {
        &self.a
    }

    pub fn f(&self) -> &Field {
        &self.f
    }

    pub fn h(&self) -> &Field {
        &self.h
    }

    pub fn nonlinearity_f(&self) -> &ScalarNonlinearity {
        &self.nonlinearity_f
    }

    pub fn nonlinearity_h(&self) -> &ScalarNonlinearity {
        &self.nonlinearity_h
    }

    /// Declared dimension `n`, taken from the domain.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The linear part `Δ + a`; fails unless `a > 0` everywhere.
    pub fn linear_problem(&self) -> Result<LinearProblem<'d>> {
        Ok(LinearProblem::new(self.domain, self.a.clone())?)
    }

    /// Pointwise `f_i F(v_i) + h_i H(v_i)`.
    pub fn source_values(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.f.values())
            .zip(self.h.values())
            .map(|((&vi, fi), hi)| fi * self.nonlinearity_f.eval(vi) + hi * self.nonlinearity_h.eval(vi))
            .collect()
    }
}

/// `S(v) = M·(f ⊙ F(v) + h ⊙ H(v))`, the functional
/// `φ ↦ ∫ f F(v) φ + h H(v) φ dV` in the nodal basis.
pub fn apply_s(problem: &NonlinearProblem<'_>, v: &Field) -> Result<DualVector> {
    v.ensure_on(problem.domain)?;
    let values = problem
        .source_values(v.values())
        .into_iter()
        .zip(problem.domain.mass())
        .map(|(s, m)| s * m)
        .collect();
    Ok(DualVector::from_parts(values, problem.domain.id()))
}
