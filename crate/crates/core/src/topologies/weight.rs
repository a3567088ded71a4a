use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Monomial;

/// Weight `phi: N^n -> R+` defining the weighted l1 norm
/// `||f||_phi = sum |f_s| phi(s)`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFunction {
    /// `phi = 1` everywhere: the plain l1 norm.
    Constant,
    /// `phi(s) = prod_i radii[i]^{s_i}`.
    Geometric { radii: Vec<f64> },
    /// `w(s) = (2 ceil(|s|/2))!`.
    Lasserre,
    /// Explicit weights up to some degree.
    Table { n: usize, entries: BTreeMap<Monomial, f64>, absolute_value: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub exp: Vec<u32>,
    pub val: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightFile {
    Constant,
    Geometric {
        radii: Vec<f64>,
    },
    Lasserre,
    Table {
        entries: Vec<WeightEntry>,
        #[serde(default)]
        absolute_value: bool,
    },
}

/// `(2 ceil(k/2))!` exactly.
pub fn lasserre_weight_exact(degree: u32) -> BigUint {
    let top = 2 * degree.div_ceil(2);
    (1..=top as u64).fold(BigUint::one(), |acc, k| acc * k)
}

impl WeightFunction {
    pub fn geometric(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidArgument(format!("geometric radii must be positive and finite, got {radii:?}")));
        }
        Ok(WeightFunction::Geometric { radii })
    }

    /// Table weight. `phi(0) = 1` is required; when `absolute_value` is set,
    /// `phi(s+t) <= phi(s) phi(t)` is checked for every pair whose sum is in
    /// the table.
    pub fn table(entries: BTreeMap<Monomial, f64>, absolute_value: bool) -> Result<Self> {
        let n = entries
            .keys()
            .next()
            .map(Monomial::n)
            .ok_or_else(|| Error::InvalidArgument("empty weight table".into()))?;
        if entries.keys().any(|m| m.n() != n) {
            return Err(Error::Invariant {
                invariant: "table exponents share one length",
                detail: "mixed exponent lengths".into(),
            });
        }
        if let Some((m, v)) = entries.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Invariant {
                invariant: "weights are nonnegative reals",
                detail: format!("phi({:?}) = {v}", m.exponents()),
            });
        }
        let w = WeightFunction::Table { n, entries, absolute_value };
        w.check_normalized()?;
        if absolute_value {
            w.check_submultiplicative()?;
        }
        Ok(w)
    }

    pub fn from_file(file: WeightFile) -> Result<Self> {
        match file {
            WeightFile::Constant => Ok(WeightFunction::Constant),
            WeightFile::Lasserre => Ok(WeightFunction::Lasserre),
            WeightFile::Geometric { radii } => WeightFunction::geometric(radii),
            WeightFile::Table { entries, absolute_value } => {
                let mut map = BTreeMap::new();
                for e in entries {
                    let m = Monomial::new(e.exp);
                    if map.insert(m.clone(), e.val).is_some() {
                        return Err(Error::Parse(format!("duplicate weight for exponent {:?}", m.exponents())));
                    }
                }
                WeightFunction::table(map, absolute_value)
            }
        }
    }

    pub fn to_file(&self) -> WeightFile {
        match self {
            WeightFunction::Constant => WeightFile::Constant,
            WeightFunction::Lasserre => WeightFile::Lasserre,
            WeightFunction::Geometric { radii } => WeightFile::Geometric { radii: radii.clone() },
            WeightFunction::Table { entries, absolute_value, .. } => WeightFile::Table {
                entries: entries.iter().map(|(m, v)| WeightEntry { exp: m.exponents().to_vec(), val: *v }).collect(),
                absolute_value: *absolute_value,
            },
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        WeightFunction::from_file(serde_json::from_str(s)?)
    }

    /// Variable count, if the kind fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            WeightFunction::Constant | WeightFunction::Lasserre => None,
            WeightFunction::Geometric { radii } => Some(radii.len()),
            WeightFunction::Table { n, .. } => Some(*n),
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::DimensionMismatch { expected: d, got: n }),
            _ => Ok(()),
        }
    }

    pub fn is_absolute_value(&self) -> bool {
        match self {
            WeightFunction::Constant | WeightFunction::Geometric { .. } => true,
            WeightFunction::Lasserre => false,
            WeightFunction::Table { absolute_value, .. } => *absolute_value,
        }
    }

    pub fn weight(&self, s: &Monomial) -> Result<f64> {
        match self {
            WeightFunction::Constant => Ok(1.0),
            WeightFunction::Geometric { radii } => {
                if radii.len() != s.n() {
                    return Err(Error::DimensionMismatch { expected: radii.len(), got: s.n() });
                }
                Ok(radii.iter().zip(s.exponents()).map(|(r, &e)| r.powi(e as i32)).product())
            }
            WeightFunction::Lasserre => Ok(lasserre_weight_exact(s.degree()).to_f64().unwrap_or(f64::INFINITY)),
            WeightFunction::Table { entries, .. } => {
                entries.get(s).copied().ok_or_else(|| Error::MissingWeight { exponent: s.exponents().to_vec() })
            }
        }
    }

    fn check_normalized(&self) -> Result<()> {
        if let WeightFunction::Table { n, .. } = self {
            let w0 = self.weight(&Monomial::one(*n))?;
            if w0 != 1.0 {
                return Err(Error::Invariant { invariant: "phi(0) = 1", detail: format!("phi(0) = {w0}") });
            }
        }
        Ok(())
    }

    /// Checks `phi(s+t) <= phi(s) phi(t)` for one pair.
    pub fn check_pair(&self, s: &Monomial, t: &Monomial) -> Result<()> {
        let sum = s.mul(t);
        let lhs = self.weight(&sum)?;
        let rhs = self.weight(s)? * self.weight(t)?;
        if lhs > rhs * (1.0 + 1e-12) {
            return Err(Error::NotSubmultiplicative {
                s: s.exponents().to_vec(),
                t: t.exponents().to_vec(),
                sum: sum.exponents().to_vec(),
                lhs,
                rhs,
            });
        }
        Ok(())
    }

    fn check_submultiplicative(&self) -> Result<()> {
        if let WeightFunction::Table { entries, .. } = self {
            for s in entries.keys() {
                for t in entries.keys() {
                    if entries.contains_key(&s.mul(t)) {
                        self.check_pair(s, t)?;
                    }
                }
            }
        }
        Ok(())
    }
}
