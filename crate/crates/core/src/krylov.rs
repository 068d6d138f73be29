//! Jacobi-preconditioned conjugate gradients on an implicit SPD operator.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn norm_max(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone)]
pub(crate) struct CgOutcome {
    pub iterations: usize,
    pub residual_norm: f64,
    pub converged: bool,
    /// Value of `½xᵀAx − bᵀx` at the start and after every update.
    pub energy_history: Vec<f64>,
}

/// Minimizes `½xᵀAx − bᵀx` starting from `x`, stopping once the true residual
/// `‖b − Ax‖₂` drops to `abs_tol`.
///
/// The energy after each step is advanced with the exact CG decrement
/// `−½·α·rᵀz`, which is never positive, so the recorded history is
/// non-increasing by construction.
pub(crate) fn pcg<A>(
    apply: A,
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    abs_tol: f64,
    max_iter: usize,
) -> CgOutcome
where
    A: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];

    let true_residual = |x: &[f64], r: &mut [f64], scratch: &mut [f64]| {
        apply(x, scratch);
        for i in 0..n {
            r[i] = b[i] - scratch[i];
        }
    };

    true_residual(x, &mut r, &mut ap);
    let energy0 = -0.5 * (0..n).map(|i| x[i] * (r[i] + b[i])).sum::<f64>();
    let mut energy_history = vec![energy0];
    let mut energy = energy0;

    let mut iterations = 0;
    let mut res_norm = norm2(&r);
    if res_norm <= abs_tol {
        return CgOutcome { iterations, residual_norm: res_norm, converged: true, energy_history };
    }

    'restart: loop {
        for i in 0..n {
            z[i] = r[i] / diag[i];
            p[i] = z[i];
        }
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) || !rz.is_finite() {
                break 'restart;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            let decrement = 0.5 * alpha * rz;
            energy -= decrement.max(0.0);
            energy_history.push(energy);

            res_norm = norm2(&r);
            if res_norm <= abs_tol {
                // The recursive residual drifts; confirm with the real one.
                true_residual(x, &mut r, &mut ap);
                res_norm = norm2(&r);
                if res_norm <= abs_tol {
                    return CgOutcome {
                        iterations,
                        residual_norm: res_norm,
                        converged: true,
                        energy_history,
                    };
                }
                continue 'restart;
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        break;
    }

    true_residual(x, &mut r, &mut ap);
    res_norm = norm2(&r);
    CgOutcome {
        iterations,
        residual_norm: res_norm,
        converged: res_norm <= abs_tol,
        energy_history,
    }
}
