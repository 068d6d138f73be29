//! Sampled checks of the growth bounds on `F`, `H` and the sign conditions on
//! `a`, `f`, `h`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{critical_exponent, NonlinearProblem, NonlinearityError, Result, ScalarNonlinearity};

/// Number of sample points on `[−1, t_max]`.
pub const ALPHA1_SAMPLES: usize = 1000;

/// Relative slack on the growth bounds, so that `F(t) = t^(2*−1)` passes.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alpha1Clause {
    #[serde(rename = "F(t) = 0 if t < 0")]
    FVanishesBelowZero,
    #[serde(rename = "H(t) = 0 if t < 0")]
    HVanishesBelowZero,
    #[serde(rename = "F(t) >= 0")]
    FNonNegative,
    #[serde(rename = "F(t) <= t^(2*-1)")]
    FGrowth,
    #[serde(rename = "H(t) >= 0")]
    HNonNegative,
    #[serde(rename = "H(t) <= t^q")]
    HGrowth,
}

impl fmt::Display for Alpha1Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alpha1Violation {
    pub clause: Alpha1Clause,
    pub t: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alpha1Report {
    pub passed: bool,
    pub n: usize,
    pub critical_exponent: f64,
    pub q: f64,
    pub t_max: f64,
    pub violation: Option<Alpha1Violation>,
    /// `q ≥ 1`: allowed by the growth condition but outside the sublinear
    /// range `0 < q < 1` of the power-law model problem.
    pub q_at_least_one: bool,
}

/// Samples `F` and `H` at [`ALPHA1_SAMPLES`] evenly spaced points of
/// `[−1, t_max]` and reports the first point where `F`, `H` fail to vanish
/// for `t < 0`, go negative, or exceed `t^(2*−1)` and `t^q` respectively.
pub fn check_alpha1(
    big_f: &ScalarNonlinearity,
    big_h: &ScalarNonlinearity,
    n: usize,
    q: f64,
    t_max: f64,
) -> Result<Alpha1Report> {
    let two_star = critical_exponent(n)?;
    let f_exponent = two_star - 1.0;
    if !(q > 0.0 && q < f_exponent) {
        return Err(NonlinearityError::QOutOfRange { q, upper: f_exponent });
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(NonlinearityError::BadTMax(t_max));
    }

    let step = (t_max + 1.0) / (ALPHA1_SAMPLES - 1) as f64;
    let mut violation = None;
    for i in 0..ALPHA1_SAMPLES {
        let t = if i == ALPHA1_SAMPLES - 1 { t_max } else { -1.0 + i as f64 * step };
        let fv = big_f.eval(t);
        let hv = big_h.eval(t);
        let found = if t < 0.0 {
            if fv != 0.0 {
                Some((Alpha1Clause::FVanishesBelowZero, fv, 0.0))
            } else if hv != 0.0 {
                Some((Alpha1Clause::HVanishesBelowZero, hv, 0.0))
            } else {
                None
            }
        } else {
            let f_bound = t.powf(f_exponent);
            let h_bound = t.powf(q);
            if !(fv >= 0.0) {
                Some((Alpha1Clause::FNonNegative, fv, 0.0))
            } else if fv > f_bound * (1.0 + BOUND_SLACK) {
                Some((Alpha1Clause::FGrowth, fv, f_bound))
            } else if !(hv >= 0.0) {
                Some((Alpha1Clause::HNonNegative, hv, 0.0))
            } else if hv > h_bound * (1.0 + BOUND_SLACK) {
                Some((Alpha1Clause::HGrowth, hv, h_bound))
            } else {
                None
            }
        };
        if let Some((clause, value, bound)) = found {
            violation = Some(Alpha1Violation { clause, t, value, bound });
            break;
        }
    }
    Ok(Alpha1Report {
        passed: violation.is_none(),
        n,
        critical_exponent: two_star,
        q,
        t_max,
        violation,
        q_at_least_one: q >= 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alpha2Clause {
    #[serde(rename = "a > 0")]
    APositive,
    #[serde(rename = "f >= 0")]
    FNonNegative,
    #[serde(rename = "f ≢ 0")]
    FNotIdenticallyZero,
    #[serde(rename = "h >= 0")]
    HNonNegative,
    #[serde(rename = "h ≢ 0")]
    HNotIdenticallyZero,
}

impl fmt::Display for Alpha2Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alpha2Clause::APositive => "a > 0",
            Alpha2Clause::FNonNegative => "f >= 0",
            Alpha2Clause::FNotIdenticallyZero => "f ≢ 0",
            Alpha2Clause::HNonNegative => "h >= 0",
            Alpha2Clause::HNotIdenticallyZero => "h ≢ 0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alpha2Failure {
    pub clause: Alpha2Clause,
    /// Offending vertex; absent for the "not identically zero" clauses.
    pub vertex: Option<usize>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alpha2Report {
    pub passed: bool,
    pub failure: Option<Alpha2Failure>,
}

/// `min a > 0`, `f ≥ 0` with `max f > 0`, `h ≥ 0` with `max h > 0`.
pub fn check_alpha2(problem: &NonlinearProblem<'_>) -> Alpha2Report {
    let first = |values: &[f64], bad: fn(f64) -> bool| values.iter().position(|&v| bad(v)).map(|i| (i, values[i]));
    let failure = if let Some((i, v)) = first(problem.a().values(), |v| !(v > 0.0)) {
        Some(Alpha2Failure { clause: Alpha2Clause::APositive, vertex: Some(i), value: Some(v) })
    } else if let Some((i, v)) = first(problem.f().values(), |v| !(v >= 0.0)) {
        Some(Alpha2Failure { clause: Alpha2Clause::FNonNegative, vertex: Some(i), value: Some(v) })
    } else if !(problem.f().max() > 0.0) {
        Some(Alpha2Failure { clause: Alpha2Clause::FNotIdenticallyZero, vertex: None, value: None })
    } else if let Some((i, v)) = first(problem.h().values(), |v| !(v >= 0.0)) {
        Some(Alpha2Failure { clause: Alpha2Clause::HNonNegative, vertex: Some(i), value: Some(v) })
    } else if !(problem.h().max() > 0.0) {
        Some(Alpha2Failure { clause: Alpha2Clause::HNotIdenticallyZero, vertex: None, value: None })
    } else {
        None
    };
    Alpha2Report { passed: failure.is_none(), failure }
}
