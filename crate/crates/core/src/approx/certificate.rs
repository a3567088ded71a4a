use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Coefficient, Dyadic, Polynomial};
use crate::topologies::{Region, WeightFile, WeightFunction};

use super::series::measured_error;

/// Agreement required between stored and recomputed residuals.
pub const VERIFY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Tk,
    Sup,
    Series,
    Module,
    Witness,
}

/// One summand `weight * p^{2d} * scale * g` of a module combination,
/// where `g` is generator `generator` or the unit when `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleTerm {
    pub multiplicity: usize,
    pub weight: f64,
    pub p: Polynomial,
    pub scale: f64,
    pub generator: Option<usize>,
}

/// How the constructed element is assembled from stored pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Decomposition {
    /// `(2^m c)^{2d}` with exact dyadic `c`.
    ScaledPower { m: u32, c: Polynomial, d: u32 },
    /// `b^{2d}`.
    Power { b: Polynomial, d: u32 },
    /// `q^{2d}` with `q = sum_i lambdas[i] a^i`.
    Series { q: Polynomial, a: Polynomial, r: f64, sign: i8, d: u32, lambdas: Vec<f64>, phi: WeightFile },
    /// `sum_j weight_j p_j^{2d} scale_j g_j`.
    Module {
        d: u32,
        generators: Vec<Polynomial>,
        terms: Vec<ModuleTerm>,
        /// Whether the coordinate functions joined the `t_l` in the
        /// separating products.
        #[serde(default)]
        coordinates_separate: bool,
    },
    /// A single polynomial, with the separated sample it was built around.
    Witness { a: Polynomial, beta: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResidual {
    pub point: Vec<f64>,
    pub target: f64,
    pub value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupResidual {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub samples: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointResidual>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup: Option<SupResidual>,
    /// Weighted l1 distance to the target (series certificates).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
}

impl Residuals {
    /// Largest recorded residual of any kind.
    pub fn max(&self) -> f64 {
        let p = self.points.iter().map(|r| r.residual).fold(0.0, f64::max);
        let s = self.sup.as_ref().map_or(0.0, |s| s.value);
        p.max(s).max(self.norm.unwrap_or(0.0))
    }
}

/// Echo of the parameters a certificate was produced with.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub success: bool,
    pub decomposition: Decomposition,
    /// The polynomial being approximated, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Polynomial>,
    pub residuals: Residuals,
    pub params: Params,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VERIFY_TOL * a.abs().max(b.abs()).max(1.0)
}

fn mismatch(what: &str, stored: f64, got: f64) -> Error {
    Error::Invariant {
        invariant: "certificate residuals reproduce from the decomposition",
        detail: format!("{what}: stored {stored}, recomputed {got}"),
    }
}

impl Decomposition {
    /// Expands the constructed element. Exact for `ScaledPower`; this can
    /// be large for high `d`.
    pub fn element(&self) -> Polynomial {
        match self {
            Decomposition::ScaledPower { m, c, d } => {
                let scaled = c.scale(&Coefficient::Dyadic(Dyadic::pow2(*m as i64)));
                scaled.pow(2 * d)
            }
            Decomposition::Power { b, d } => b.pow(2 * d),
            Decomposition::Series { q, d, .. } => q.pow(2 * d),
            Decomposition::Module { d, generators, terms, .. } => {
                let n = terms.first().map_or(1, |t| t.p.n());
                let mut out = Polynomial::zero(n);
                for t in terms {
                    let g = match t.generator {
                        Some(i) => generators[i].clone(),
                        None => Polynomial::one(n),
                    };
                    let piece =
                        t.p.pow(2 * d).mul(&g).expect("same dimension").scale(&Coefficient::Float(t.weight * t.scale));
                    out = out.add(&piece).expect("same dimension");
                }
                out
            }
            Decomposition::Witness { a, .. } => a.clone(),
        }
    }

    /// Value of the element at `x` computed from the factors, without
    /// expanding.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Decomposition::ScaledPower { m, c, d } => {
                let xs = x.iter().map(|&v| Dyadic::from_f64(v)).collect::<Result<Vec<_>>>()?;
                let v = &Dyadic::pow2(*m as i64) * &c.eval_exact(&xs)?;
                v.pow(2 * d).to_f64()
            }
            Decomposition::Power { b, d } => b.eval(x)?.powi(2 * *d as i32),
            Decomposition::Series { q, d, .. } => q.eval(x)?.powi(2 * *d as i32),
            Decomposition::Module { d, generators, terms, .. } => {
                let mut total = 0.0;
                for t in terms {
                    let g = match t.generator {
                        Some(i) => generators[i].eval(x)?,
                        None => 1.0,
                    };
                    total += t.weight * t.p.eval(x)?.powi(2 * *d as i32) * t.scale * g;
                }
                total
            }
            Decomposition::Witness { a, .. } => a.eval(x)?,
        })
    }

    /// Checks the syntactic cone-membership claims of the decomposition.
    pub fn check_structure(&self) -> Result<()> {
        let fail = |detail: String| Error::Invariant { invariant: "decomposition certifies cone membership", detail };
        match self {
            Decomposition::ScaledPower { c, d, .. } => {
                if *d == 0 {
                    return Err(fail("power exponent 2d must be positive".into()));
                }
                if !c.is_exact() {
                    return Err(fail("c has non-dyadic coefficients".into()));
                }
            }
            Decomposition::Power { d, .. } | Decomposition::Series { d, .. } if *d == 0 => {
                return Err(fail("power exponent 2d must be positive".into()));
            }
            Decomposition::Module { d, generators, terms, .. } => {
                if *d == 0 {
                    return Err(fail("power exponent 2d must be positive".into()));
                }
                let mut counted = std::collections::BTreeMap::new();
                for (j, t) in terms.iter().enumerate() {
                    if !(t.scale >= 0.0 && t.weight >= 0.0) {
                        return Err(fail(format!("term {j} has a negative multiplier")));
                    }
                    if t.multiplicity == 0 || (t.weight - 1.0 / t.multiplicity as f64).abs() > 1e-15 {
                        return Err(fail(format!("term {j} weight is not 1/multiplicity")));
                    }
                    if let Some(g) = t.generator {
                        if g >= generators.len() {
                            return Err(fail(format!("term {j} names generator {g}")));
                        }
                    }
                    *counted.entry(t.multiplicity).or_insert(0usize) += 1;
                }
                // each class of size lambda contributes lambda terms
                for (lambda, count) in counted {
                    if count % lambda != 0 {
                        return Err(fail(format!("{count} terms share multiplicity {lambda}")));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

impl Certificate {
    /// The constructed element.
    pub fn element(&self) -> Polynomial {
        self.decomposition.element()
    }

    /// Recomputes every stored residual from the decomposition and checks
    /// it against the stored value. Sampled sup residuals are only checked
    /// when the region is supplied.
    pub fn verify(&self, region: Option<&Region>) -> Result<()> {
        self.decomposition.check_structure()?;
        if let Decomposition::ScaledPower { m, c, d } = &self.decomposition {
            let target = self.target.as_ref().ok_or_else(|| Error::InvalidArgument("missing target".into()))?;
            for r in &self.residuals.points {
                let got = super::tk::exact_residual(target, *m, c, *d, &r.point)?;
                if got.to_f64() != r.residual {
                    return Err(mismatch("exact residual", r.residual, got.to_f64()));
                }
            }
        } else {
            for r in &self.residuals.points {
                let value = self.decomposition.eval(&r.point)?;
                let target = match &self.target {
                    Some(t) => t.eval(&r.point)?,
                    None => r.target,
                };
                let residual = match self.kind {
                    CertificateKind::Witness => value.abs(),
                    _ => (target - value).abs(),
                };
                if !close(value, r.value) {
                    return Err(mismatch("value", r.value, value));
                }
                if !close(residual, r.residual) {
                    return Err(mismatch("residual", r.residual, residual));
                }
            }
        }
        if let (Some(sup), Some(k)) = (&self.residuals.sup, region) {
            let got = self.sampled_sup(k)?;
            if !close(got.value, sup.value) {
                return Err(mismatch("sup residual", sup.value, got.value));
            }
        }
        if let (Some(norm), Decomposition::Series { a, r, sign, d, lambdas, phi, .. }) =
            (self.residuals.norm, &self.decomposition)
        {
            let phi = WeightFunction::from_file(phi.clone())?;
            let terms = lambdas.len().saturating_sub(1) as u32;
            let got = measured_error(*r, a, *d, *sign, terms, &phi)?;
            if !close(got, norm) {
                return Err(mismatch("norm residual", norm, got));
            }
        }
        Ok(())
    }

    /// Sup over `k`'s samples of `|target - element|` (or `|element|` for
    /// witnesses).
    pub(crate) fn sampled_sup(&self, k: &Region) -> Result<SupResidual> {
        let target = self.target.as_ref().map(Polynomial::to_float);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, x) in k.samples().iter().enumerate() {
            let v = self.decomposition.eval(x)?;
            let r = match &target {
                Some(t) => (t.eval(x)? - v).abs(),
                None => v.abs(),
            };
            if r > best.0 {
                best = (r, i);
            }
        }
        if k.samples().is_empty() {
            return Err(Error::EmptyRegion);
        }
        Ok(SupResidual { value: best.0, argmax: k.samples()[best.1].clone(), samples: k.samples().len() })
    }
}
