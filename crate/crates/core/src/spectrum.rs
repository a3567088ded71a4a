//! Gelfand spectra of weighted l1 norms and the Zariski-density test for
//! point sets.
//!
//! `K_phi = {x : |x^s| <= phi(s) for all s}` is only ever probed through
//! finite-degree membership queries and outer boxes. Zariski density of a
//! finite point sample is certified degree by degree: the sample is dense
//! up to degree `D` exactly when no nonzero polynomial of degree `<= D`
//! vanishes on it, i.e. when the evaluation matrix has trivial right
//! kernel.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};
use crate::topologies::WeightFunction;

/// Default relative singular-value cutoff.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    /// First exponent (graded-lex) with `|x^s| > phi(s)`.
    pub violated_at: Option<Vec<u32>>,
}

/// Degree-`D` outer test for `x in K_phi`.
pub fn kphi_contains(x: &[f64], phi: &WeightFunction, degree: u32) -> Result<Membership> {
    if degree < 1 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    phi.check_dim(x.len())?;
    for m in Monomial::all_up_to(x.len(), degree) {
        let lhs = m.eval(x).abs();
        let rhs = phi.weight(&m)?;
        if lhs > rhs * (1.0 + 1e-12) {
            return Ok(Membership { inside: false, violated_at: Some(m.exponents().to_vec()) });
        }
    }
    Ok(Membership { inside: true, violated_at: None })
}

/// Per-variable radii `r_i = min_{1<=k<=D} phi(k e_i)^{1/k}`; the box
/// `prod [-r_i, r_i]` contains `K_phi`.
pub fn kphi_box(phi: &WeightFunction, n: usize, degree: u32) -> Result<Vec<f64>> {
    if degree < 1 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    phi.check_dim(n)?;
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = f64::INFINITY;
        for k in 1..=degree {
            let mut e = vec![0; n];
            e[i] = k;
            let w = phi.weight(&Monomial::new(e))?;
            r = r.min(w.powf(1.0 / k as f64));
        }
        radii.push(r);
    }
    Ok(radii)
}

/// Numerical right kernel of the evaluation map on polynomials of degree
/// `<= D`, i.e. the degree-`D` part of the vanishing ideal of the points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VanishingBasis {
    pub degree: u32,
    pub basis: Vec<Polynomial>,
    /// Singular values of the column-scaled evaluation matrix (descending),
    /// padded with zeros up to the number of monomials.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub tol: f64,
    /// `C(n + D, D)`.
    pub columns: usize,
}

pub fn vanishing_ideal_basis(points: &[Vec<f64>], degree: u32, tol: f64) -> Result<VanishingBasis> {
    let n = points.first().map(Vec::len).ok_or_else(|| Error::InvalidArgument("no points given".into()))?;
    if n == 0 {
        return Err(Error::InvalidArgument("points must have at least one coordinate".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    if degree < 1 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let monomials = Monomial::all_up_to(n, degree);
    let cols = monomials.len();
    let rows = points.len().max(cols);

    let mut a = DMatrix::<f64>::zeros(rows, cols);
    for (i, x) in points.iter().enumerate() {
        for (j, m) in monomials.iter().enumerate() {
            a[(i, j)] = m.eval(x);
        }
    }
    // column scaling by the largest magnitude each monomial attains
    let scale: Vec<f64> = (0..cols)
        .map(|j| {
            let s = a.column(j).amax();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol * sigma_max;
    let rank = sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();

    // kernel directions in scaled coordinates, mapped back to monomial
    // coefficients and re-orthonormalized
    let mut kernel: Vec<DVector<f64>> = Vec::new();
    for &i in order.iter().skip(rank) {
        let v_hat = v_t.row(i).transpose();
        let v = DVector::from_iterator(cols, v_hat.iter().zip(&scale).map(|(x, s)| x / s));
        kernel.push(v);
    }
    let basis_vectors = orthonormalize(kernel);
    let basis = basis_vectors.iter().map(|v| Polynomial::from_dense(n, &monomials, v.as_slice())).collect();

    let mut singular_values = sigma;
    singular_values.resize(cols, 0.0);
    singular_values.truncate(cols);
    Ok(VanishingBasis { degree, basis, singular_values, rank, tol, columns: cols })
}

fn orthonormalize(vectors: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        let mut w = v;
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w -= q * c;
            }
        }
        let norm = w.norm();
        if norm > 1e-300 {
            out.push(w / norm);
        }
    }
    out
}

/// Degree-`D` certificate of Zariski density: true iff no nonzero
/// polynomial of degree `<= D` vanishes on the points (numerically).
/// `false` is conclusive at that degree; `true` says nothing about higher
/// degrees.
pub fn is_hausdorff(points: &[Vec<f64>], degree: u32, tol: f64) -> Result<bool> {
    Ok(vanishing_ideal_basis(points, degree, tol)?.basis.is_empty())
}
