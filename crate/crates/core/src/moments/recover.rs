use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::nnls::lawson_hanson;
use super::{AtomicMeasure, MomentFunctional, CONDITIONING_DEGREE};
use crate::error::{Error, Result};
use crate::topologies::Region;

const MAX_ITER_FACTOR: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    /// Atoms with positive weight.
    pub measure: AtomicMeasure,
    /// 2-norm of the moment mismatch.
    pub residual: f64,
    pub support: usize,
    pub grid: usize,
    pub success: bool,
    pub converged: bool,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Nonnegative weights on the samples of `k` whose moments match `L` in
/// least squares. `success` means residual `<= tol`; a residual bounded
/// away from zero suggests `L` has no representing measure on `k`.
pub fn measure_recover(l: &MomentFunctional, k: &Region, tol: f64) -> Result<Recovery> {
    if k.n() != l.n() {
        return Err(Error::DimensionMismatch { expected: l.n(), got: k.n() });
    }
    let grid = k.samples();
    if grid.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let rows: Vec<_> = l.moments().collect();
    let a = DMatrix::from_fn(rows.len(), grid.len(), |i, j| rows[i].0.eval(&grid[j]));
    let b: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max) * b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let kkt_tol = 1e-12 * (1.0 + scale) * (rows.len() as f64).sqrt();
    let sol = lawson_hanson(&a, &b, kkt_tol, MAX_ITER_FACTOR * (grid.len() + rows.len()))?;

    let (atoms, weights): (Vec<_>, Vec<_>) =
        sol.x.iter().zip(grid).filter(|(w, _)| **w > 0.0).map(|(w, x)| (x.clone(), *w)).unzip();
    let support = atoms.len();
    let mut warnings = Vec::new();
    if l.degree() > CONDITIONING_DEGREE {
        warnings.push(format!(
            "moment degree {} exceeds {CONDITIONING_DEGREE}; the monomial system is badly conditioned",
            l.degree()
        ));
    }
    if !sol.converged {
        warnings.push("iteration cap reached; returning the last iterate".into());
    }
    Ok(Recovery {
        measure: AtomicMeasure::new(atoms, weights)?,
        residual: sol.residual,
        support,
        grid: grid.len(),
        success: sol.residual <= tol,
        converged: sol.converged,
        iterations: sol.iterations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{from_measure, MeasureSpec};

    #[test]
    fn dirac_on_grid() {
        let l = from_measure(&MeasureSpec::Atomic { atoms: vec![vec![0.5]], weights: vec![1.0] }, 6).unwrap();
        let k = Region::cube(&[[-1.0, 1.0]], 1e-2).unwrap();
        let r = measure_recover(&l, &k, 1e-9).unwrap();
        assert!(r.success, "{}", r.residual);
        assert!(r.residual < 1e-9);
        let mass_near: f64 = r
            .measure
            .atoms()
            .iter()
            .zip(r.measure.weights())
            .filter(|(x, _)| (x[0] - 0.5).abs() < 1e-9)
            .map(|(_, w)| w)
            .sum();
        assert!((mass_near - 1.0).abs() < 1e-6, "{mass_near}");
    }

    #[test]
    fn uniform_quadrature() {
        let l = from_measure(&MeasureSpec::Uniform { bounds: vec![[-1.0, 1.0]] }, 8).unwrap();
        let k = Region::cube(&[[-1.0, 1.0]], 1e-2).unwrap();
        assert_eq!(k.samples().len(), 101);
        let r = measure_recover(&l, &k, 1e-6).unwrap();
        assert!(r.residual < 1e-6, "{}", r.residual);
        assert!(r.measure.weights().iter().all(|&w| w >= 0.0));
        assert!(r.support <= 9);
    }

    #[test]
    fn indefinite_has_no_measure() {
        let l = MomentFunctional::from_values(1, 2, &[1.0, 0.0, -1.0]).unwrap();
        let k = Region::cube(&[[-1.0, 1.0]], 1e-2).unwrap();
        let r = measure_recover(&l, &k, 1e-6).unwrap();
        assert!(!r.success);
        assert!(r.residual > 0.1);
    }
}
