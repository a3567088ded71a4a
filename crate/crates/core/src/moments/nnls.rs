//! Lawson–Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    /// `||A x - b||_2`.
    pub residual: f64,
    /// `A^T (A x - b)`.
    pub gradient: Vec<f64>,
    pub iterations: usize,
    /// The active-set loop ended without hitting the iteration cap.
    pub converged: bool,
    /// `x_j = 0 => g_j >= -tol` and `x_j > 0 => |g_j| <= tol`.
    pub kkt_satisfied: bool,
    /// `||A x - b||^2 / 2` after each outer step, starting from `x = 0`.
    pub objective_history: Vec<f64>,
}

fn objective(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    0.5 * (a * x - b).norm_squared()
}

/// Unconstrained least squares on the columns in `passive`; other entries
/// are zero.
fn subset_solve(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..a.ncols()).filter(|&j| passive[j]).collect();
    let mut out = DVector::zeros(a.ncols());
    if cols.is_empty() {
        return out;
    }
    let sub = a.select_columns(&cols);
    let svd = sub.svd(true, true);
    let cutoff = 1e-13 * svd.singular_values.max();
    let s = svd.solve(b, cutoff).expect("u and v were computed");
    for (k, &j) in cols.iter().enumerate() {
        out[j] = s[k];
    }
    out
}

pub(crate) fn lawson_hanson(a: &DMatrix<f64>, b: &[f64], tol: f64, max_iter: usize) -> Result<NnlsSolution> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    let n = a.ncols();
    let b = DVector::from_column_slice(b);
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    // columns that re-entered without moving x; cleared on progress
    let mut blocked = vec![false; n];
    let mut history = vec![objective(a, &x, &b)];
    let mut iterations = 0;
    let mut converged = true;

    'outer: loop {
        let w = a.tr_mul(&(&b - a * &x));
        let candidate =
            (0..n).filter(|&j| !passive[j] && !blocked[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = candidate else { break };
        passive[t] = true;
        let before = x.clone();
        loop {
            iterations += 1;
            if iterations > max_iter {
                converged = false;
                break 'outer;
            }
            let s = subset_solve(a, &b, &passive);
            if (0..n).filter(|&j| passive[j]).all(|j| s[j] > 0.0) {
                x = s;
                break;
            }
            let alpha = (0..n)
                .filter(|&j| passive[j] && s[j] <= 0.0)
                .map(|j| x[j] / (x[j] - s[j]))
                .fold(f64::INFINITY, f64::min);
            x += (&s - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= 0.0 {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
        if x == before {
            blocked[t] = true;
        } else {
            blocked.iter_mut().for_each(|v| *v = false);
        }
        history.push(objective(a, &x, &b));
    }

    let r = a * &x - &b;
    let g = a.tr_mul(&r);
    let kkt_satisfied = (0..n).all(|j| if x[j] > 0.0 { g[j].abs() <= tol } else { g[j] >= -tol });
    Ok(NnlsSolution {
        x: x.iter().copied().collect(),
        residual: r.norm(),
        gradient: g.iter().copied().collect(),
        iterations,
        converged,
        kkt_satisfied,
        objective_history: history,
    })
}

/// `argmin_{x >= 0} ||A x - b||_2`. Fails with [`Error::IterationCap`] when
/// the active-set loop does not finish within `max_iter` least-squares
/// solves.
pub fn nnls(a: &DMatrix<f64>, b: &[f64], tol: f64, max_iter: usize) -> Result<NnlsSolution> {
    let sol = lawson_hanson(a, b, tol, max_iter)?;
    if !sol.converged {
        return Err(Error::IterationCap(max_iter));
    }
    Ok(sol)
}
