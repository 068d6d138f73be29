//! JSON scenario files.
//!
//! ```json
//! {
//!   "domain": { "flat_torus": { "dims": [ { "cells": 8, "length": 1.0 }, … ] } },
//!   "dimension": 3,
//!   "a": 2.0, "f": 0.5, "h": "0.5 + 0*x",
//!   "nonlinearity": { "F": { "power": { "p": 5.0 } }, "H": { "table": { "path": "h.csv" } } },
//!   "q": 0.5,
//!   "bracket": { "lower": 0.01, "upper": 1.0 },
//!   "solver": { "tol": 1e-9, "linear_tol": 1e-11, "max_steps": 500 }
//! }
//! ```
//!
//! Coefficients and bracket ends are numbers or expression strings. Relative
//! paths resolve against the scenario file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::AppError;
use crate::geometry::{build_flat_torus, build_icosphere, DiscreteDomain, Field, GridAxis};
use crate::iteration::IterationConfig;
use crate::nonlinearity::{parse_coefficient, NonlinearProblem, ScalarNonlinearity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Icosphere { subdivisions: u32, radius: f64 },
    FlatTorus { dims: Vec<GridAxis> },
    OffFile { path: PathBuf },
}

/// A number, or an expression in `x`, `y`, `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    Expression(String),
}

impl Coefficient {
    pub fn to_field(&self, domain: &DiscreteDomain) -> Result<Field, AppError> {
        match self {
            Coefficient::Constant(c) => Ok(Field::constant(domain, *c)?),
            Coefficient::Expression(e) => parse_coefficient(e, domain).map_err(|err| AppError::Input(format!("{e:?}: {err}"))),
        }
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

impl From<&str> for Coefficient {
    fn from(e: &str) -> Self {
        Coefficient::Expression(e.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    Power { p: f64 },
    Table { path: PathBuf },
}

impl NonlinearitySpec {
    pub fn build(&self, base: &Path) -> Result<ScalarNonlinearity, AppError> {
        let built = match self {
            NonlinearitySpec::Power { p } => ScalarNonlinearity::power(*p),
            NonlinearitySpec::Table { path } => ScalarNonlinearity::table_from_csv(base.join(path)),
        };
        built.map_err(|e| AppError::Input(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityPair {
    #[serde(rename = "F")]
    pub big_f: NonlinearitySpec,
    #[serde(rename = "H")]
    pub big_h: NonlinearitySpec,
}

fn default_verification_tol() -> f64 {
    1e-10
}

fn is_default_verification_tol(t: &f64) -> bool {
    *t == default_verification_tol()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub lower: Coefficient,
    pub upper: Coefficient,
    #[serde(default = "default_verification_tol", skip_serializing_if = "is_default_verification_tol")]
    pub verification_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub domain: DomainSpec,
    /// Dimension used by the growth bounds; defaults to 2 on surfaces and to
    /// the axis count on tori.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    pub a: Coefficient,
    pub f: Coefficient,
    pub h: Coefficient,
    pub nonlinearity: NonlinearityPair,
    /// Growth exponent of `H`; defaults to the exponent of a power-law `H`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Upper end of the sampled growth check; defaults to `2·max(upper)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    pub bracket: BracketSpec,
    #[serde(default)]
    pub solver: IterationConfig,
}

/// A scenario with the directory its relative paths resolve against.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub base: PathBuf,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, AppError> {
        serde_json::from_str(text).map_err(|e| AppError::Input(format!("scenario: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<LoadedScenario, AppError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Input(format!("cannot read {}: {e}", path.display())))?;
        let scenario = Scenario::parse(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedScenario { scenario, base })
    }

    pub fn q(&self) -> Result<f64, AppError> {
        match (self.q, &self.nonlinearity.big_h) {
            (Some(q), _) => Ok(q),
            (None, NonlinearitySpec::Power { p }) => Ok(*p),
            (None, NonlinearitySpec::Table { .. }) => {
                Err(AppError::Input("q is required when H is a table".into()))
            }
        }
    }
}

impl LoadedScenario {
    pub fn build_domain(&self) -> Result<DiscreteDomain, AppError> {
        let domain = match &self.scenario.domain {
            DomainSpec::Icosphere { subdivisions, radius } => build_icosphere(*subdivisions, *radius)?,
            DomainSpec::FlatTorus { dims } => {
                let dims: Vec<_> = dims.iter().map(|a| (a.cells, a.length)).collect();
                build_flat_torus(&dims)?
            }
            DomainSpec::OffFile { path } => DiscreteDomain::from_off_file(self.base.join(path), 2)?,
        };
        Ok(match self.scenario.dimension {
            Some(n) => domain.with_declared_dimension(n)?,
            None => domain,
        })
    }

    pub fn build_problem<'d>(&self, domain: &'d DiscreteDomain) -> Result<NonlinearProblem<'d>, AppError> {
        let s = &self.scenario;
        NonlinearProblem::new(
            domain,
            s.a.to_field(domain)?,
            s.f.to_field(domain)?,
            s.h.to_field(domain)?,
            s.nonlinearity.big_f.build(&self.base)?,
            s.nonlinearity.big_h.build(&self.base)?,
        )
        .map_err(|e| AppError::Input(e.to_string()))
    }

    pub fn bracket_fields(&self, domain: &DiscreteDomain) -> Result<(Field, Field), AppError> {
        Ok((self.scenario.bracket.lower.to_field(domain)?, self.scenario.bracket.upper.to_field(domain)?))
    }
}
