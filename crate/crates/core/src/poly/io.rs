//! JSON polynomial format:
//! `{"n": 2, "terms": [{"coeff": "5/2^4", "exp": [1,0]}, {"coeff": 2.5, "exp": [0,2]}]}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Coefficient, Dyadic, Monomial, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    Exact(String),
    Float(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: CoeffRepr,
    pub exp: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

impl TryFrom<PolynomialFile> for Polynomial {
    type Error = Error;

    fn try_from(file: PolynomialFile) -> Result<Polynomial> {
        if file.n == 0 {
            return Err(Error::Invariant { invariant: "variable count n >= 1", detail: "n = 0".into() });
        }
        let mut seen = BTreeSet::new();
        let mut p = Polynomial::zero(file.n);
        for (idx, t) in file.terms.into_iter().enumerate() {
            if t.exp.len() != file.n {
                return Err(Error::Parse(format!(
                    "term {idx}: exponent vector {:?} has length {}, expected {}",
                    t.exp,
                    t.exp.len(),
                    file.n
                )));
            }
            if !seen.insert(t.exp.clone()) {
                return Err(Error::Parse(format!("term {idx}: duplicate exponent vector {:?}", t.exp)));
            }
            let c = match t.coeff {
                CoeffRepr::Exact(s) => {
                    Coefficient::Dyadic(s.parse::<Dyadic>().map_err(|e| Error::Parse(format!("term {idx}: {e}")))?)
                }
                CoeffRepr::Float(v) if v.is_finite() => Coefficient::Float(v),
                CoeffRepr::Float(v) => return Err(Error::Parse(format!("term {idx}: non-finite coefficient {v}"))),
            };
            p.insert(Monomial::new(t.exp), c);
        }
        Ok(p)
    }
}

impl From<&Polynomial> for PolynomialFile {
    fn from(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| TermRecord {
                coeff: match c {
                    Coefficient::Dyadic(d) => CoeffRepr::Exact(d.to_string()),
                    Coefficient::Float(v) => CoeffRepr::Float(*v),
                },
                exp: m.exponents().to_vec(),
            })
            .collect();
        PolynomialFile { n: p.n(), terms }
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = PolynomialFile::deserialize(d)?;
        Polynomial::try_from(file).map_err(serde::de::Error::custom)
    }
}

impl Polynomial {
    pub fn from_json(s: &str) -> Result<Polynomial> {
        let file: PolynomialFile = serde_json::from_str(s)?;
        Polynomial::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serializes")
    }
}
