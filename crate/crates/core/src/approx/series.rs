//! Truncated binomial series for `(r ± a)^{1/2d}` in a weighted l1
//! algebra.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::certificate::{Certificate, CertificateKind, Decomposition, Params, Residuals};
use crate::error::{Error, Result};
use crate::poly::{Coefficient, Polynomial};
use crate::topologies::{phi_norm, WeightFunction};

/// `binom(1/2d, i)` for `i = 0..=n`, exactly.
fn binomials(d: u32, n: u32) -> Vec<BigRational> {
    let alpha = BigRational::new(BigInt::one(), BigInt::from(2 * d));
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = BigRational::one();
    out.push(c.clone());
    for i in 0..n {
        let i = BigRational::from_integer(BigInt::from(i));
        c = c * (&alpha - &i) / (&i + BigRational::one());
        out.push(c.clone());
    }
    out
}

fn rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {v}")))
}

/// Coefficients `lambda_i`, `i = 0..=n`, of `(r + sign t)^{1/2d}` about
/// `t = 0`.
pub fn series_coefficients(r: f64, d: u32, sign: i8, n: u32) -> Result<Vec<f64>> {
    check_args(r, d, sign)?;
    let ratio = rational(sign as f64 / r)?;
    let root = r.powf(1.0 / (2 * d) as f64);
    let mut pow = BigRational::one();
    let mut out = Vec::with_capacity(n as usize + 1);
    for b in binomials(d, n) {
        out.push(root * (b * &pow).to_f64().unwrap_or(0.0));
        pow *= &ratio;
    }
    Ok(out)
}

fn check_args(r: f64, d: u32, sign: i8) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}")));
    }
    Ok(())
}

/// `||q_n^{2d} - (r + sign a)||_phi` where `q_n` is the degree-`n`
/// truncation.
///
/// With `P(u) = sum_{i<=n} binom(1/2d, i) u^i` we have
/// `q_n^{2d} - (r + sign a) = r (P(u)^{2d} - 1 - u)` at `u = sign a / r`.
/// The univariate remainder is formed over the rationals, so the low-order
/// cancellation is exact and only the final substitution is rounded.
pub(crate) fn measured_error(r: f64, a: &Polynomial, d: u32, sign: i8, n: u32, phi: &WeightFunction) -> Result<f64> {
    let p = binomials(d, n);
    let mut power = vec![BigRational::one()];
    for _ in 0..2 * d {
        let mut next = vec![BigRational::zero(); power.len() + p.len() - 1];
        for (i, x) in power.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in p.iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        power = next;
    }
    power[0] -= BigRational::one();
    if power.len() > 1 {
        power[1] -= BigRational::one();
    }
    let coeffs: Vec<Coefficient> = power.iter().map(|c| Coefficient::Float(c.to_f64().unwrap_or(0.0))).collect();
    let u = a.to_float().scale(&Coefficient::Float(sign as f64 / r));
    let rem = u.compose_univariate(&coeffs);
    Ok(r * phi_norm(&rem, phi)?)
}

/// Degree-`n` truncation `q_n` of `(r + sign a)^{1/2d}` with its measured
/// error and an a-priori bound.
///
/// The tail `T_n = sum_{i>n} |lambda_i| ||a||^i` is bounded by the
/// geometric majorant `|lambda_{n+1}| ||a||^{n+1} / (1 - ||a||/r)`, using
/// `|lambda_{i+1} / lambda_i| <= 1/r`. The reported `error_bound`
/// propagates it through the `2d`-th power:
/// `T_n * 2d * (S_n + T_n)^{2d-1}` with `S_n = sum_{i<=n} |lambda_i| ||a||^i`.
pub fn series_root(r: f64, a: &Polynomial, d: u32, n: u32, phi: &WeightFunction, sign: i8) -> Result<Certificate> {
    check_args(r, d, sign)?;
    if !phi.is_absolute_value() {
        return Err(Error::InvalidArgument("series_root needs a submultiplicative weight (an absolute value)".into()));
    }
    let a_norm = phi_norm(a, phi)?;
    if a_norm >= r {
        return Err(Error::RadiusViolation { norm: a_norm, radius: r });
    }
    let lambdas = series_coefficients(r, d, sign, n + 1)?;
    let next = lambdas[n as usize + 1].abs();
    let lambdas = lambdas[..=n as usize].to_vec();

    let tail = if a_norm == 0.0 { 0.0 } else { next * a_norm.powi(n as i32 + 1) / (1.0 - a_norm / r) };
    let partial: f64 = lambdas.iter().enumerate().map(|(i, l)| l.abs() * a_norm.powi(i as i32)).sum();
    let error_bound = tail * (2 * d) as f64 * (partial + tail).powi(2 * d as i32 - 1);

    let coeffs: Vec<Coefficient> = lambdas.iter().map(|&l| Coefficient::Float(l)).collect();
    let q = a.to_float().compose_univariate(&coeffs);
    let measured = measured_error(r, a, d, sign, n, phi)?;
    let target = Polynomial::constant(a.n(), r).add(&a.to_float().scale(&Coefficient::Float(sign as f64)))?;
    Ok(Certificate {
        kind: CertificateKind::Series,
        success: measured <= error_bound,
        decomposition: Decomposition::Series { q, a: a.clone(), r, sign, d, lambdas, phi: phi.to_file() },
        target: Some(target),
        residuals: Residuals { norm: Some(measured), ..Default::default() },
        params: Params {
            terms: Some(n),
            a_norm: Some(a_norm),
            tail_bound: Some(tail),
            error_bound: Some(error_bound),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Dyadic;

    #[test]
    fn textbook_coefficients() {
        let l = series_coefficients(1.0, 1, 1, 3).unwrap();
        assert_eq!(l, vec![1.0, 0.5, -0.125, 0.0625]);
        let l = series_coefficients(1.0, 1, -1, 2).unwrap();
        assert_eq!(l, vec![1.0, -0.5, -0.125]);
        // (1 + t)^{1/4}: 1, 1/4, -3/32
        let l = series_coefficients(1.0, 2, 1, 2).unwrap();
        assert_eq!(l, vec![1.0, 0.25, -3.0 / 32.0]);
    }

    #[test]
    fn zero_argument() {
        let a = Polynomial::zero(1);
        let cert = series_root(3.0, &a, 2, 4, &WeightFunction::Constant, 1).unwrap();
        let Decomposition::Series { q, .. } = &cert.decomposition else { panic!() };
        assert_eq!(*q, Polynomial::constant(1, 3f64.powf(0.25)));
        assert_eq!(cert.params.tail_bound, Some(0.0));
    }

    #[test]
    fn radius_is_strict() {
        let a = Polynomial::var(1, 0);
        match series_root(1.0, &a, 1, 2, &WeightFunction::Constant, 1) {
            Err(Error::RadiusViolation { norm, radius }) => assert_eq!((norm, radius), (1.0, 1.0)),
            other => panic!("{other:?}"),
        }
        assert!(series_root(1.0, &a, 1, 2, &WeightFunction::Lasserre, 1).is_err());
    }

    #[test]
    fn sqrt_two_plus_x() {
        let a = Polynomial::var(1, 0);
        let mut last = f64::INFINITY;
        for n in [5, 10, 20, 30] {
            let cert = series_root(2.0, &a, 1, n, &WeightFunction::Constant, 1).unwrap();
            let e = cert.residuals.norm.unwrap();
            assert!(e < last);
            assert!(e <= cert.params.error_bound.unwrap());
            cert.verify(None).unwrap();
            last = e;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn measured_matches_expansion() {
        // float expansion of q^2 - (2 - a) agrees with the exact route at low N
        let a = Polynomial::from_terms(2, [(vec![1, 0], Dyadic::new(1, 2)), (vec![0, 1], Dyadic::new(-1, 3))]).unwrap();
        let phi = WeightFunction::geometric(vec![1.5, 2.0]).unwrap();
        let cert = series_root(2.0, &a, 1, 4, &phi, -1).unwrap();
        let direct = cert.element().sub(cert.target.as_ref().unwrap()).unwrap();
        let direct = phi_norm(&direct, &phi).unwrap();
        assert!((direct - cert.residuals.norm.unwrap()).abs() < 1e-12);
    }
}
