//! The three families of seminorms on `R[X]`: point evaluations
//! `rho_alpha(f) = |f(alpha)|`, the sup-norm over a compact region, and the
//! weighted l1 norms `||f||_phi`.

mod region;
mod weight;

use serde::{Deserialize, Serialize};

pub use region::{IneqRef, Region, RegionFile, INEQ_TOL, MAX_SAMPLES};
pub use weight::{lasserre_weight_exact, WeightEntry, WeightFile, WeightFunction};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// `|f(alpha)|`.
pub fn rho_alpha(f: &Polynomial, alpha: &[f64]) -> Result<f64> {
    Ok(f.eval(alpha)?.abs())
}

/// Sampled sup-norm. `value` is a lower bound on `sup_K |f|`; it converges
/// to the true value as the region's resolution goes to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub resolution: f64,
    pub samples: usize,
}

pub fn sup_norm(f: &Polynomial, k: &Region) -> Result<SupNorm> {
    if f.n() != k.n() {
        return Err(Error::DimensionMismatch { expected: k.n(), got: f.n() });
    }
    let f = f.to_float();
    let mut best: Option<(f64, usize)> = None;
    for (i, x) in k.samples().iter().enumerate() {
        let v = f.eval_unchecked(x).abs();
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, i));
        }
    }
    let (value, i) = best.ok_or(Error::EmptyRegion)?;
    Ok(SupNorm { value, argmax: k.samples()[i].clone(), resolution: k.resolution(), samples: k.samples().len() })
}

/// `sum_s |f_s| phi(s)` over the stored terms.
pub fn phi_norm(f: &Polynomial, phi: &WeightFunction) -> Result<f64> {
    phi.check_dim(f.n())?;
    let mut total = 0.0;
    for (m, c) in f.terms() {
        total += c.to_f64().abs() * phi.weight(m)?;
    }
    Ok(total)
}

/// Outcome of comparing `M^k / k!` against 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LasserreThreshold {
    /// Bound `M = max_i max_{x in K} |x_i|` read off the box.
    pub m: f64,
    /// Least `N <= max_degree` with `M^N / N! < 1`, if any.
    pub threshold: Option<u32>,
    /// `ratios[k] = M^k / k!` for `k = 0..=max_degree`.
    pub ratios: Vec<f64>,
}

/// Degree beyond which the Lasserre weight `w(s) >= |s|!` dominates the
/// monomial bound `||X^s||_K <= M^{|s|}`.
pub fn lasserre_threshold(k: &Region, max_degree: u32) -> Result<LasserreThreshold> {
    if max_degree < 1 {
        return Err(Error::InvalidArgument("max_degree must be at least 1".into()));
    }
    let m = k.max_abs_coordinate();
    let mut ratios = Vec::with_capacity(max_degree as usize + 1);
    let mut r = 1.0;
    ratios.push(r);
    for j in 1..=max_degree {
        r *= m / j as f64;
        ratios.push(r);
    }
    let threshold = ratios.iter().position(|&v| v < 1.0).map(|p| p as u32);
    Ok(LasserreThreshold { m, threshold, ratios })
}
