//! Sparse multivariate polynomials over the reals with exact dyadic or
//! double coefficients.

mod dyadic;
mod io;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub use dyadic::{Coefficient, Dyadic, FLOAT_ZERO};
pub use io::{PolynomialFile, TermRecord};

use crate::error::{Error, Result};

/// Exponent vector `s` of the monomial `X^s`, with its cached total degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn one(n: usize) -> Self {
        Monomial { exps: vec![0; n], degree: 0 }
    }

    /// The variable `X_i` (zero-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial { exps, degree: 1 }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn n(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps, degree: self.degree + other.degree }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.exps.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product()
    }

    /// All exponent vectors in `n` variables with total degree `<= max_degree`,
    /// in graded-lex order.
    pub fn all_up_to(n: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for deg in 0..=max_degree {
            let mut block = Vec::new();
            let mut cur = vec![0u32; n];
            compositions(deg, 0, &mut cur, &mut block);
            block.sort();
            out.extend(block);
        }
        out
    }
}

fn compositions(rest: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    let n = cur.len();
    if i + 1 == n {
        cur[i] = rest;
        out.push(Monomial::new(cur.clone()));
        return;
    }
    for e in 0..=rest {
        cur[i] = e;
        compositions(rest - e, i + 1, cur, out);
    }
    cur[i] = 0;
}

/// Graded lexicographic: total degree first, then exponent vectors compared
/// lexicographically.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of `R[X_1, ..., X_n]`.
///
/// Terms are kept in graded-lex order with no stored zeros. Arithmetic
/// between two dyadic coefficients is exact; any operation that mixes a
/// dyadic with a float coefficient produces a float and sets the
/// `demoted` flag on the result.
#[derive(Clone, Debug)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, Coefficient>,
    demoted: bool,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new(), demoted: false }
    }

    pub fn constant(n: usize, c: impl Into<Coefficient>) -> Self {
        let mut p = Polynomial::zero(n);
        p.insert(Monomial::one(n), c.into());
        p
    }

    pub fn one(n: usize) -> Self {
        Polynomial::constant(n, Dyadic::one())
    }

    /// The variable `X_i` (zero-based) with coefficient 1.
    pub fn var(n: usize, i: usize) -> Self {
        let mut p = Polynomial::zero(n);
        p.insert(Monomial::var(n, i), Dyadic::one().into());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<C: Into<Coefficient>>(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Result<Self> {
        let mut p = Polynomial::zero(n);
        for (exps, c) in terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: exps.len() });
            }
            p.accumulate(Monomial::new(exps), c.into());
        }
        Ok(p)
    }

    /// Float-coefficient polynomial from a dense coefficient list over
    /// `monomials`.
    pub fn from_dense(n: usize, monomials: &[Monomial], coeffs: &[f64]) -> Self {
        let mut p = Polynomial::zero(n);
        for (m, &c) in monomials.iter().zip(coeffs) {
            p.accumulate(m.clone(), Coefficient::Float(c));
        }
        p
    }

    fn insert(&mut self, m: Monomial, c: Coefficient) {
        if !c.is_zero() {
            self.terms.insert(m, c);
        }
    }

    fn accumulate(&mut self, m: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let (sum, demoted) = old.add(&c);
                self.demoted |= demoted;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some operation mixed dyadic and float coefficients.
    pub fn demoted(&self) -> bool {
        self.demoted
    }

    /// True when every coefficient is an exact dyadic.
    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coefficient::is_dyadic)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Option<&Coefficient> {
        self.terms.get(&Monomial::new(exps.to_vec()))
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Coefficient 2-norm.
    pub fn coeff_norm2(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    fn check_dim(&self, other: &Polynomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    /// Evaluation at a real point: the ring homomorphism `f -> f(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c.to_f64() * m.eval(x)).sum()
    }

    /// Exact evaluation at a dyadic point. Float coefficients are read as
    /// the dyadic they represent exactly.
    pub fn eval_exact(&self, x: &[Dyadic]) -> Result<Dyadic> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let mut acc = Dyadic::zero();
        for (m, c) in &self.terms {
            let mut term = c.to_dyadic()?;
            for (xi, &e) in x.iter().zip(m.exponents()) {
                if e > 0 {
                    term = &term * &xi.pow(e);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        out.demoted |= other.demoted;
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
            demoted: self.demoted,
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.n);
        out.demoted = self.demoted || other.demoted;
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let (c, demoted) = ca.mul(cb);
                out.demoted |= demoted;
                out.accumulate(ma.mul(mb), c);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        out.demoted = self.demoted;
        for (m, ci) in &self.terms {
            let (v, demoted) = ci.mul(c);
            out.demoted |= demoted;
            out.insert(m.clone(), v);
        }
        out
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(self.n);
        result.demoted = self.demoted;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same dimension");
            }
        }
        result
    }

    /// Integer power with a signed exponent; negative exponents are rejected.
    pub fn power(&self, e: i64) -> Result<Polynomial> {
        if e < 0 {
            return Err(Error::InvalidArgument(format!("negative power {e}")));
        }
        let e = u32::try_from(e).map_err(|_| Error::InvalidArgument(format!("power {e} too large")))?;
        Ok(self.pow(e))
    }

    /// `q(self)` for a univariate coefficient list `q = sum coeffs[j] t^j`,
    /// via Horner's scheme.
    pub fn compose_univariate(&self, coeffs: &[Coefficient]) -> Polynomial {
        let mut acc = Polynomial::zero(self.n);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self).expect("same dimension");
            acc = acc.add(&Polynomial::constant(self.n, c.clone())).expect("same dimension");
        }
        acc
    }

    /// Replaces every coefficient by the nearest dyadic `m / 2^k` with
    /// `k = ceil(log2(1/delta))`. Each coefficient moves by at most
    /// `delta / 2`.
    pub fn dyadic_round(&self, delta: f64) -> Result<Polynomial> {
        let k = dyadic_precision(delta)?;
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            let d = c.to_dyadic()?.round_to(k);
            out.insert(m.clone(), Coefficient::Dyadic(d));
        }
        Ok(out)
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_coeff_distance(&self, other: &Polynomial) -> f64 {
        let mut keys: Vec<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|m| {
                let a = self.terms.get(m).map_or(0.0, Coefficient::to_f64);
                let b = other.terms.get(m).map_or(0.0, Coefficient::to_f64);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Same polynomial with float coefficients.
    pub fn to_float(&self) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), Coefficient::Float(c.to_f64())))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            demoted: self.demoted,
        }
    }

    /// Same polynomial with exact dyadic coefficients (floats convert
    /// exactly).
    pub fn to_exact(&self) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            out.insert(m.clone(), Coefficient::Dyadic(c.to_dyadic()?));
        }
        Ok(out)
    }
}

/// Bits of precision `k = ceil(log2(1/delta))` for dyadic rounding.
pub fn dyadic_precision(delta: f64) -> Result<i64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let mut k = (1.0 / delta).log2().ceil() as i64;
    // guard against log2 rounding: need 2^-k <= delta
    while Dyadic::pow2(-k).to_f64() > delta {
        k += 1;
    }
    while Dyadic::pow2(-(k - 1)).to_f64() <= delta {
        k -= 1;
    }
    Ok(k)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match c {
                Coefficient::Dyadic(d) => write!(f, "({d})")?,
                Coefficient::Float(v) => write!(f, "{v}")?,
            }
            for (i, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*X{}", i + 1)?,
                    _ => write!(f, "*X{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}
