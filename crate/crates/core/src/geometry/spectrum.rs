//! Smallest eigenvalues of the generalized problem `L x = λ M x`.
//!
//! Because `M` is diagonal the problem is symmetrized as
//! `B = M^{-1/2} L M^{-1/2}`. Small problems use a dense symmetric eigensolve;
//! larger ones use block shifted-inverse subspace iteration with a
//! Rayleigh–Ritz step each sweep, where the shifted solves run CG on
//! `B + σI`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};

use super::{DiscreteDomain, GeometryError, Result};
use crate::krylov;

pub const MAX_SPECTRUM_VERTICES: usize = 5000;

const DENSE_LIMIT: usize = 400;
const MAX_SWEEPS: usize = 300;
const RITZ_TOL: f64 = 1e-10;

struct Symmetrized<'a> {
    domain: &'a DiscreteDomain,
    inv_sqrt_mass: Vec<f64>,
}

impl Symmetrized<'_> {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let scaled: Vec<f64> = x.iter().zip(&self.inv_sqrt_mass).map(|(v, s)| v * s).collect();
        self.domain.apply_stiffness(&scaled, out);
        for (o, s) in out.iter_mut().zip(&self.inv_sqrt_mass) {
            *o *= s;
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let mut b = DMatrix::from(self.domain.stiffness());
        let s = &self.inv_sqrt_mass;
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                b[(i, j)] *= s[i] * s[j];
            }
        }
        b
    }
}

fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (values, vectors)
}

/// The `k` smallest generalized eigenvalues of `(L, M)` in ascending order.
/// The first is zero up to rounding, since constants span the null space.
pub fn smallest_eigenvalues(domain: &DiscreteDomain, k: usize) -> Result<Vec<f64>> {
    let n = domain.vertex_count();
    if n > MAX_SPECTRUM_VERTICES {
        return Err(GeometryError::TooLarge {
            what: "the spectrum",
            vertex_count: n,
            max: MAX_SPECTRUM_VERTICES,
        });
    }
    if k > n {
        return Err(GeometryError::TooManyEigenvalues { requested: k, vertex_count: n });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let op = Symmetrized {
        domain,
        inv_sqrt_mass: domain.mass().iter().map(|m| m.sqrt().recip()).collect(),
    };
    let block = (2 * k).max(k + 8);
    if n <= DENSE_LIMIT || 3 * block >= n {
        let (values, _) = sorted_eigen(op.dense());
        return Ok(values[..k].to_vec());
    }

    let diag: Vec<f64> = {
        let l = domain.stiffness();
        (0..n)
            .map(|i| {
                let row = l.row(i);
                let lii: f64 = row.col_indices().iter().zip(row.values()).filter(|(&j, _)| j == i).map(|(_, v)| v).sum();
                lii * op.inv_sqrt_mass[i] * op.inv_sqrt_mass[i]
            })
            .collect()
    };
    // Gershgorin bound on ‖B‖, used to scale the Ritz residual test.
    let norm_b = {
        let l = domain.stiffness();
        (0..n)
            .map(|i| {
                let row = l.row(i);
                row.col_indices()
                    .iter()
                    .zip(row.values())
                    .map(|(&j, v)| (v * op.inv_sqrt_mass[i] * op.inv_sqrt_mass[j]).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    };
    let shift = 1e-3 * diag.iter().sum::<f64>() / n as f64;
    let shifted_diag: Vec<f64> = diag.iter().map(|d| d + shift).collect();
    let apply_shifted = |x: &[f64], out: &mut [f64]| {
        op.apply(x, out);
        for (o, v) in out.iter_mut().zip(x) {
            *o += shift * v;
        }
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let start = DMatrix::from_fn(n, block, |_, _| rng.gen_range(-1.0..1.0));
    let mut basis = start.qr().q();
    let mut ritz: Vec<f64> = vec![0.0; block];

    for sweep in 0..MAX_SWEEPS {
        let mut next = DMatrix::zeros(n, block);
        for j in 0..block {
            let rhs: Vec<f64> = basis.column(j).iter().copied().collect();
            let mut y: Vec<f64> = if sweep == 0 {
                vec![0.0; n]
            } else {
                rhs.iter().map(|v| v / (ritz[j] + shift)).collect()
            };
            krylov::pcg(apply_shifted, &shifted_diag, &rhs, &mut y, 1e-12, 20 * n);
            next.set_column(j, &DVector::from_vec(y));
        }
        basis = next.qr().q();

        let mut image = DMatrix::zeros(n, block);
        let mut out = vec![0.0; n];
        for j in 0..block {
            let col: Vec<f64> = basis.column(j).iter().copied().collect();
            op.apply(&col, &mut out);
            image.set_column(j, &DVector::from_column_slice(&out));
        }
        let h = basis.transpose() * &image;
        let h = (&h + h.transpose()) * 0.5;
        let (values, rotation) = sorted_eigen(h);
        basis = &basis * &rotation;
        image = &image * &rotation;
        ritz = values;

        let worst = (0..k)
            .map(|j| (image.column(j) - basis.column(j) * ritz[j]).norm())
            .fold(0.0, f64::max);
        if worst <= RITZ_TOL * norm_b {
            return Ok(ritz[..k].to_vec());
        }
    }
    Err(GeometryError::EigenNotConverged { iterations: MAX_SWEEPS })
}
