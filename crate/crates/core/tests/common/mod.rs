//! Oracles shared by the integration tests. Everything here is computed
//! independently of the library's solvers: dense factorizations and scalar
//! root finding.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use monotone_elliptic::geometry::DiscreteDomain;
use nalgebra::{DMatrix, DVector};

/// Root of `2c = ½c⁵ + ½√c` in `(0.01, 1)`.
pub fn bisect_constant_root() -> f64 {
    let g = |c: f64| 2.0 * c - 0.5 * c.powi(5) - 0.5 * c.sqrt();
    let (mut lo, mut hi) = (0.01_f64, 1.0_f64);
    assert!(g(lo) < 0.0 && g(hi) > 0.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `L + M·diag(a)` as a dense matrix, rebuilt from the stiffness triplets.
pub fn dense_system(domain: &DiscreteDomain, a: &[f64]) -> DMatrix<f64> {
    let n = domain.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    for (i, j, v) in domain.stiffness().triplet_iter() {
        m[(i, j)] += *v;
    }
    for i in 0..n {
        m[(i, i)] += domain.mass()[i] * a[i];
    }
    m
}

/// Cholesky-backed solver for a fixed dense SPD matrix.
pub struct DenseSolver {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl DenseSolver {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        DenseSolver { chol: matrix.cholesky().expect("system matrix is SPD") }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.chol.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec()
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm_max(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `a ≤ b` entrywise within `1e-9·max(‖a‖, ‖b‖)`.
pub fn ordered(a: &[f64], b: &[f64]) -> bool {
    let slack = 1e-9 * norm_max(a).max(norm_max(b));
    a.iter().zip(b).all(|(x, y)| *x <= y + slack)
}

pub const TORUS_8: &str = r#"{
  "domain": { "flat_torus": { "dims": [
    { "cells": 8, "length": 1.0 }, { "cells": 8, "length": 1.0 }, { "cells": 8, "length": 1.0 } ] } },
  "dimension": 3,
  "a": 2.0, "f": 0.5, "h": 0.5,
  "nonlinearity": { "F": { "power": { "p": 5.0 } }, "H": { "power": { "p": 0.5 } } },
  "bracket": { "lower": 0.01, "upper": 1.0 }
}"#;

pub const SPHERE_3: &str = r#"{
  "domain": { "icosphere": { "subdivisions": 3, "radius": 1.0 } },
  "dimension": 3,
  "a": "2+0.5*z", "f": 0.5, "h": 0.5,
  "nonlinearity": { "F": { "power": { "p": 5.0 } }, "H": { "power": { "p": 0.5 } } },
  "bracket": { "lower": 0.01, "upper": 1.0 }
}"#;

pub fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}
