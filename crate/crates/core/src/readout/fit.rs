//! Least squares over the probability simplex.
//!
//! Primal active-set method: each iteration solves the equality-constrained
//! problem on the current face, steps toward it until a coordinate hits
//! zero, and releases the bound with the most negative multiplier once the
//! face optimum is reached.

use nalgebra::{DMatrix, DVector};

/// Solution of `min ‖A x − y‖₂` subject to `x ≥ 0`, `Σ x = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexLsq {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub const MAX_ITERATIONS: usize = 100_000;

/// `a` is `m × k` (rows are samples), `y` has length `m`.
pub fn simplex_least_squares(a: &DMatrix<f64>, y: &DVector<f64>, max_iter: usize) -> SimplexLsq {
    let k = a.ncols();
    assert!(k > 0 && a.nrows() == y.len());

    let scale = 1.0 + (a.transpose() * y).amax();
    let mult_tol = 1e-12 * scale;

    let mut x = DVector::from_element(k, 1.0 / k as f64);
    let mut free = vec![true; k];
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        let idx: Vec<usize> = (0..k).filter(|&i| free[i]).collect();
        let target = face_optimum(a, y, &idx);

        let mut alpha = 1.0f64;
        let mut blocking = None;
        for (pos, &i) in idx.iter().enumerate() {
            let d = target[pos] - x[i];
            if d < 0.0 {
                let r = -x[i] / d;
                if r < alpha {
                    alpha = r;
                    blocking = Some(i);
                }
            }
        }
        for (pos, &i) in idx.iter().enumerate() {
            x[i] += alpha * (target[pos] - x[i]);
        }
        // Keep Σx = 1 exact against round-off.
        if let Some(i) = blocking {
            x[i] = 0.0;
            free[i] = false;
            let sum: f64 = x.iter().sum();
            x /= sum;
            continue;
        }
        let sum: f64 = x.iter().sum();
        x /= sum;

        // Optimal on this face: release the bound with the most negative multiplier.
        let grad = a.transpose() * (a * &x - y);
        let nu = idx.iter().map(|&i| grad[i]).sum::<f64>() / idx.len() as f64;
        let release = (0..k)
            .filter(|&i| !free[i])
            .map(|i| (i, grad[i] - nu))
            .filter(|&(_, lambda)| lambda < -mult_tol)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match release {
            Some((i, _)) => free[i] = true,
            None => {
                return SimplexLsq {
                    x: x.iter().copied().collect(),
                    iterations,
                    converged: true,
                }
            }
        }
    }

    SimplexLsq {
        x: x.iter().copied().collect(),
        iterations,
        converged: false,
    }
}

/// Minimizer of `‖A_F z − y‖` with `Σ z = 1` over the free columns `idx`,
/// by eliminating the last free coordinate.
fn face_optimum(a: &DMatrix<f64>, y: &DVector<f64>, idx: &[usize]) -> Vec<f64> {
    let last = *idx.last().expect("nonempty face");
    if idx.len() == 1 {
        return vec![1.0];
    }
    let rest = &idx[..idx.len() - 1];
    let pivot = a.column(last);
    let b = DMatrix::from_fn(a.nrows(), rest.len(), |r, c| a[(r, rest[c])] - pivot[r]);
    let rhs = y - pivot;
    let w = b
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .expect("SVD computed with both factors");
    let mut z: Vec<f64> = w.iter().copied().collect();
    z.push(1.0 - w.sum());
    z
}
