use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::topologies::Region;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatteningRow {
    pub eps: f64,
    pub min: f64,
    pub argmin: Vec<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatteningReport {
    pub rows: Vec<FatteningRow>,
    /// Nonnegative on the smallest fattening.
    pub member: bool,
}

/// Minimum of `f` over each fattening of `k`. Membership in the cone of
/// polynomials nonnegative on some open neighbourhood of `k` is read off
/// the smallest `eps`.
pub fn psd_on_fattening(f: &Polynomial, k: &Region, eps_list: &[f64]) -> Result<FatteningReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("eps list is empty".into()));
    }
    if eps_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("eps list must be strictly increasing".into()));
    }
    if f.n() != k.n() {
        return Err(Error::DimensionMismatch { expected: k.n(), got: f.n() });
    }
    let f = f.to_float();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let fat = k.fatten(eps)?;
        let (i, min) = fat
            .samples()
            .iter()
            .map(|x| f.eval_unchecked(x))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::EmptyRegion)?;
        rows.push(FatteningRow { eps, min, argmin: fat.samples()[i].clone(), samples: fat.samples().len() });
    }
    let member = rows[0].min >= 0.0;
    Ok(FatteningReport { rows, member })
}
