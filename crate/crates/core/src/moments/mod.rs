//! Truncated moment functionals `L: R[X]_{<=D} -> R`, given by their values
//! on monomials.

mod continuity;
mod nnls;
mod psd;
mod recover;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};

pub use continuity::{phi_continuity, ContinuityReport};
pub use nnls::{nnls, NnlsSolution};
pub use psd::{hankel_psd_check, power_psd_check, HankelVerdict, PowerOutcome, PowerVerdict};
pub use recover::{measure_recover, Recovery};

/// Degrees above this make the monomial moment matrix too ill-conditioned
/// for the default tolerances to mean much.
pub const CONDITIONING_DEGREE: u32 = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct MomentFunctional {
    n: usize,
    degree: u32,
    moments: BTreeMap<Monomial, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentEntry {
    pub exp: Vec<u32>,
    pub val: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentFile {
    pub n: usize,
    #[serde(rename = "D")]
    pub degree: u32,
    pub moments: Vec<MomentEntry>,
}

impl MomentFunctional {
    /// Validates completeness: every exponent of degree `<= degree` must be
    /// present and nothing else.
    pub fn new(n: usize, degree: u32, moments: BTreeMap<Monomial, f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invariant { invariant: "variable count n >= 1", detail: "n = 0".into() });
        }
        for (m, v) in &moments {
            if m.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.n() });
            }
            if m.degree() > degree {
                return Err(Error::Invariant {
                    invariant: "moments only up to degree D",
                    detail: format!("exponent {:?} has degree {} > {degree}", m.exponents(), m.degree()),
                });
            }
            if !v.is_finite() {
                return Err(Error::Invariant {
                    invariant: "moments are finite",
                    detail: format!("L(X^{:?}) = {v}", m.exponents()),
                });
            }
        }
        if let Some(missing) = Monomial::all_up_to(n, degree).into_iter().find(|m| !moments.contains_key(m)) {
            return Err(Error::Invariant {
                invariant: "every moment of degree <= D is present",
                detail: format!("missing exponent {:?}", missing.exponents()),
            });
        }
        Ok(MomentFunctional { n, degree, moments })
    }

    /// Builds a functional from values listed in graded order.
    pub fn from_values(n: usize, degree: u32, values: &[f64]) -> Result<Self> {
        let basis = Monomial::all_up_to(n, degree);
        if values.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: values.len() });
        }
        MomentFunctional::new(n, degree, basis.into_iter().zip(values.iter().copied()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn moments(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.moments.iter().map(|(m, v)| (m, *v))
    }

    /// `L(X^s)`; `None` beyond the truncation degree.
    pub fn get(&self, s: &Monomial) -> Option<f64> {
        self.moments.get(s).copied()
    }

    /// `L(f) = sum_s f_s L(X^s)`. `deg f` must not exceed `D`.
    pub fn apply(&self, f: &Polynomial) -> Result<f64> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: f.n() });
        }
        if f.degree() > self.degree {
            return Err(Error::InvalidArgument(format!(
                "L is known up to degree {}, polynomial has degree {}",
                self.degree,
                f.degree()
            )));
        }
        Ok(f.terms().map(|(m, c)| c.to_f64() * self.moments[m]).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.moments.values().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn from_file(file: MomentFile) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in file.moments {
            if e.exp.len() != file.n {
                return Err(Error::Parse(format!(
                    "moment exponent {:?} has length {}, expected {}",
                    e.exp,
                    e.exp.len(),
                    file.n
                )));
            }
            let m = Monomial::new(e.exp);
            if map.insert(m.clone(), e.val).is_some() {
                return Err(Error::Parse(format!("duplicate moment for exponent {:?}", m.exponents())));
            }
        }
        MomentFunctional::new(file.n, file.degree, map)
    }

    pub fn to_file(&self) -> MomentFile {
        MomentFile {
            n: self.n,
            degree: self.degree,
            moments: self.moments.iter().map(|(m, v)| MomentEntry { exp: m.exponents().to_vec(), val: *v }).collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        MomentFunctional::from_file(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("moment files serialize")
    }
}

/// Finitely supported nonnegative measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), got: weights.len() });
        }
        if let Some(n) = atoms.first().map(Vec::len) {
            if let Some(a) = atoms.iter().find(|a| a.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, got: a.len() });
            }
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::Invariant {
                invariant: "atomic weights are nonnegative",
                detail: format!("weight {i} = {w}"),
            });
        }
        Ok(AtomicMeasure { atoms, weights })
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Measures with known moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    Atomic {
        atoms: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    /// Normalized Lebesgue measure on a box.
    Uniform {
        #[serde(rename = "box")]
        bounds: Vec<[f64; 2]>,
    },
}

/// Normalized `int_l^u x^k dx / (u - l)`; a point mass when `l == u`.
fn uniform_moment(l: f64, u: f64, k: u32) -> f64 {
    if u == l {
        return l.powi(k as i32);
    }
    let e = k as i32 + 1;
    (u.powi(e) - l.powi(e)) / ((k as f64 + 1.0) * (u - l))
}

/// Moments up to degree `degree` of a measure.
pub fn from_measure(mu: &MeasureSpec, degree: u32) -> Result<MomentFunctional> {
    match mu {
        MeasureSpec::Atomic { atoms, weights } => {
            let m = AtomicMeasure::new(atoms.clone(), weights.clone())?;
            let n = m
                .atoms
                .first()
                .map(Vec::len)
                .ok_or_else(|| Error::InvalidArgument("atomic measure needs at least one atom".into()))?;
            let moments = Monomial::all_up_to(n, degree)
                .into_iter()
                .map(|s| {
                    let v = m.atoms.iter().zip(&m.weights).map(|(a, w)| w * s.eval(a)).sum();
                    (s, v)
                })
                .collect();
            MomentFunctional::new(n, degree, moments)
        }
        MeasureSpec::Uniform { bounds } => {
            if bounds.is_empty() {
                return Err(Error::InvalidArgument("uniform measure needs a box".into()));
            }
            if let Some(b) = bounds.iter().find(|b| !(b[0] <= b[1]) || !b[0].is_finite() || !b[1].is_finite()) {
                return Err(Error::InvalidArgument(format!("bad interval {b:?}")));
            }
            let n = bounds.len();
            let moments = Monomial::all_up_to(n, degree)
                .into_iter()
                .map(|s| {
                    let v = s.exponents().iter().zip(bounds).map(|(&k, b)| uniform_moment(b[0], b[1], k)).product();
                    (s, v)
                })
                .collect();
            MomentFunctional::new(n, degree, moments)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_at_origin() {
        let l = from_measure(&MeasureSpec::Atomic { atoms: vec![vec![0.0, 0.0]], weights: vec![1.0] }, 4).unwrap();
        for (m, v) in l.moments() {
            assert_eq!(v, if m.degree() == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn uniform_interval() {
        let l = from_measure(&MeasureSpec::Uniform { bounds: vec![[-1.0, 1.0]] }, 4).unwrap();
        let got: Vec<f64> = (0..=4).map(|k| l.get(&Monomial::new(vec![k])).unwrap()).collect();
        // oracle: int_{-1}^{1} x^k dx / 2
        let want: Vec<f64> = (0..=4).map(|k| if k % 2 == 1 { 0.0 } else { 1.0 / (k as f64 + 1.0) }).collect();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_atoms() {
        let mu = MeasureSpec::Atomic { atoms: vec![vec![-1.0], vec![1.0]], weights: vec![0.5, 0.5] };
        let l = from_measure(&mu, 6).unwrap();
        for k in 0..=6u32 {
            let want = if k % 2 == 0 { 1.0 } else { 0.0 };
            assert_eq!(l.get(&Monomial::new(vec![k])).unwrap(), want);
        }
    }

    #[test]
    fn negative_weight_rejected() {
        let mu = MeasureSpec::Atomic { atoms: vec![vec![0.0]], weights: vec![-1.0] };
        assert!(matches!(from_measure(&mu, 2), Err(Error::Invariant { .. })));
    }

    #[test]
    fn completeness_enforced() {
        let mut map = BTreeMap::new();
        map.insert(Monomial::new(vec![0]), 1.0);
        map.insert(Monomial::new(vec![2]), 1.0);
        assert!(MomentFunctional::new(1, 2, map.clone()).is_err());
        map.insert(Monomial::new(vec![1]), 0.0);
        let l = MomentFunctional::new(1, 2, map).unwrap();
        let f = Polynomial::var(1, 0).pow(2).add(&Polynomial::constant(1, 3.0)).unwrap();
        assert_eq!(l.apply(&f).unwrap(), 4.0);
        assert!(l.apply(&Polynomial::var(1, 0).pow(3)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"n":1, "D":2, "moments":[{"exp":[0],"val":1.0},{"exp":[1],"val":0.0},{"exp":[2],"val":-1.0}]}"#;
        let l = MomentFunctional::from_json(s).unwrap();
        assert_eq!(MomentFunctional::from_json(&l.to_json()).unwrap(), l);
        let dup = r#"{"n":1, "D":0, "moments":[{"exp":[0],"val":1.0},{"exp":[0],"val":2.0}]}"#;
        assert!(matches!(MomentFunctional::from_json(dup), Err(Error::Parse(_))));
    }
}
