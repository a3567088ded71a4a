use serde::{Deserialize, Serialize};

use super::MomentFunctional;
use crate::error::{Error, Result};
use crate::poly::Monomial;
use crate::topologies::WeightFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// `C_D = max_{|s| <= D} |L(X^s)| / phi(s)`.
    pub constant: f64,
    pub argmax: Vec<u32>,
    /// `trend[k] = C_k`, nondecreasing.
    pub trend: Vec<f64>,
    /// `C_D == C_{D-1}`: the constant stopped growing at the truncation.
    pub bounded: bool,
}

/// Continuity constant of `L` against `||.||_phi` on polynomials of degree
/// at most `D`: `|L(f)| <= C_D ||f||_phi`.
pub fn phi_continuity(l: &MomentFunctional, phi: &WeightFunction) -> Result<ContinuityReport> {
    phi.check_dim(l.n())?;
    let mut per_degree = vec![(0.0f64, Monomial::one(l.n())); l.degree() as usize + 1];
    for (s, v) in l.moments() {
        let w = phi.weight(s)?;
        if w == 0.0 {
            return Err(Error::Invariant {
                invariant: "phi(s) > 0 for every |s| <= D",
                detail: format!("phi({:?}) = 0", s.exponents()),
            });
        }
        let ratio = v.abs() / w;
        let slot = &mut per_degree[s.degree() as usize];
        if ratio > slot.0 {
            *slot = (ratio, s.clone());
        }
    }
    let mut trend = Vec::with_capacity(per_degree.len());
    let mut best = (0.0f64, Monomial::one(l.n()));
    for (ratio, s) in per_degree {
        if ratio > best.0 {
            best = (ratio, s);
        }
        trend.push(best.0);
    }
    let bounded = trend.len() < 2 || trend[trend.len() - 1] == trend[trend.len() - 2];
    Ok(ContinuityReport { constant: best.0, argmax: best.1.exponents().to_vec(), trend, bounded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{from_measure, MeasureSpec};

    fn dirac(x: f64, degree: u32) -> MomentFunctional {
        from_measure(&MeasureSpec::Atomic { atoms: vec![vec![x]], weights: vec![1.0] }, degree).unwrap()
    }

    #[test]
    fn inside_spectrum() {
        for d in 1..10 {
            let r = phi_continuity(&dirac(-0.7, d), &WeightFunction::Constant).unwrap();
            assert!(r.constant <= 1.0);
            assert!(r.bounded);
        }
    }

    #[test]
    fn outside_spectrum_diverges() {
        let r = phi_continuity(&dirac(2.0, 8), &WeightFunction::Constant).unwrap();
        assert_eq!(r.constant, 256.0);
        assert_eq!(r.argmax, vec![8]);
        assert_eq!(r.trend, (0..=8).map(|k| 2f64.powi(k)).collect::<Vec<_>>());
        assert!(!r.bounded);
    }

    #[test]
    fn boundary_radius() {
        let phi = WeightFunction::geometric(vec![2.0]).unwrap();
        let r = phi_continuity(&dirac(2.0, 8), &phi).unwrap();
        assert!(r.trend.iter().all(|&c| c == 1.0));
        assert!(r.bounded);
    }
}
