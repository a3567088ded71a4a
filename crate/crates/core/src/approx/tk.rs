//! Approximation in the topology generated by finitely many point
//! evaluations.
//!
//! The construction runs exactly in `Z[1/2]`: `f` and the points are read
//! as dyadics (every finite `f64` is one), interpolation is done over the
//! rationals, and only the final rounding step chooses a precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::certificate::{Certificate, CertificateKind, Decomposition, Params, PointResidual, Residuals};
use crate::error::{Error, Result};
use crate::poly::{dyadic_precision, Coefficient, Dyadic, Polynomial};

/// Node values closer than this are treated as one node.
pub const NODE_TIE: f64 = 1e-12;

fn to_rational(d: &Dyadic) -> BigRational {
    BigRational::new(d.numerator().clone(), BigInt::one() << d.exponent())
}

/// Nearest multiple of `2^-k` to `x`, ties away from zero.
fn round_rational(x: &BigRational, k: i64) -> Dyadic {
    let scaled = if k >= 0 {
        x * BigRational::from_integer(BigInt::one() << k as u64)
    } else {
        x / BigRational::from_integer(BigInt::one() << (-k) as u64)
    };
    let (num, den) = (scaled.numer().abs(), scaled.denom().clone());
    let mut m = (num * 2u32 + &den).div_floor(&(den * 2u32));
    if scaled.is_negative() {
        m = -m;
    }
    if k >= 0 {
        Dyadic::new(m, k as u32)
    } else {
        Dyadic::new(m << (-k) as u64, 0)
    }
}

/// Monomial coefficients of the interpolant through `(xs[i], ys[i])`,
/// via Newton divided differences.
fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let k = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..k {
        for i in (level..k).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // expand sum_j dd[j] prod_{i<j} (t - xs[i]) from the inside out
    let mut poly = vec![dd[k - 1].clone()];
    for j in (0..k - 1).rev() {
        let mut next = vec![BigRational::zero(); poly.len() + 1];
        for (e, c) in poly.iter().enumerate() {
            next[e + 1] += c;
            next[e] -= c * &xs[j];
        }
        next[0] += &dd[j];
        poly = next;
    }
    poly
}

/// `|f(x) - (2^m c(x))^{2d}|`, exactly.
pub(crate) fn exact_residual(f: &Polynomial, m: u32, c: &Polynomial, d: u32, x: &[f64]) -> Result<Dyadic> {
    let xs = x.iter().map(|&v| Dyadic::from_f64(v)).collect::<Result<Vec<_>>>()?;
    let target = f.to_exact()?.eval_exact(&xs)?;
    let value = (&Dyadic::pow2(m as i64) * &c.eval_exact(&xs)?).pow(2 * d);
    Ok((&target - &value).abs())
}

/// Builds `c` with dyadic coefficients such that `(2^m c)^{2d}` agrees
/// with `f` to within `eps` at every point.
///
/// Fails with [`Error::NonMembership`] when `f` is too negative at a point
/// for a dyadic shift of at most `eps/2` to make it positive.
pub fn tk_approximate(f: &Polynomial, points: &[Vec<f64>], d: u32, eps: f64) -> Result<Certificate> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("at least one point is required".into()));
    }
    for p in points {
        if p.len() != f.n() {
            return Err(Error::DimensionMismatch { expected: f.n(), got: p.len() });
        }
    }
    let fx = f.to_exact()?;
    let n = fx.n();
    let exact_points = points
        .iter()
        .map(|p| p.iter().map(|&v| Dyadic::from_f64(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let values = exact_points.iter().map(|p| fx.eval_exact(p)).collect::<Result<Vec<_>>>()?;

    // (1) shift into strict positivity
    let (imin, vmin) = values.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).expect("nonempty");
    let mut shift = Dyadic::zero();
    let mut shift_bits = None;
    if !vmin.is_negative() && !vmin.is_zero() {
        // already positive
    } else {
        let k = dyadic_precision(eps / 2.0)?;
        shift = Dyadic::pow2(-k);
        shift_bits = Some(k);
        if (vmin + &shift).is_negative() || (vmin + &shift).is_zero() {
            return Err(Error::NonMembership {
                point: points[imin].clone(),
                value: vmin.to_f64(),
                tolerance: shift.to_f64(),
            });
        }
    }
    let shifted: Vec<Dyadic> = values.iter().map(|v| v + &shift).collect();
    let fs = fx.add(&Polynomial::constant(n, shift.clone()))?;

    // (2) scale into (0, 1)
    let vmax = shifted.iter().max().expect("nonempty");
    let mut m: u32 = 0;
    while *vmax >= Dyadic::pow2(2 * d as i64 * m as i64) {
        m += 1;
    }
    let inv_scale = Dyadic::pow2(-(2 * d as i64 * m as i64));
    let b = fs.scale(&Coefficient::Dyadic(inv_scale.clone()));
    let nodes: Vec<Dyadic> = shifted.iter().map(|v| v * &inv_scale).collect();

    // (3) distinct node values and their 2d-th roots
    let mut sorted = nodes.clone();
    sorted.sort();
    let mut distinct: Vec<Dyadic> = Vec::new();
    for v in sorted {
        match distinct.last() {
            Some(last) if (&v - last).to_f64() <= NODE_TIE => {}
            _ => distinct.push(v),
        }
    }
    let root = 1.0 / (2 * d) as f64;
    let xs: Vec<BigRational> = distinct.iter().map(to_rational).collect();
    let ys: Vec<BigRational> =
        distinct.iter().map(|v| BigRational::from_float(v.to_f64().powf(root)).expect("finite root")).collect();
    let p = interpolate(&xs, &ys);

    // (4) round the interpolant's coefficients
    let scale_f = 2f64.powi((2 * d * m) as i32);
    let delta = eps / ((2 * d) as f64 * scale_f * (distinct.len() + 1) as f64);
    let k = dyadic_precision(delta)?;
    let p_round: Vec<Coefficient> = p.iter().map(|c| Coefficient::Dyadic(round_rational(c, k))).collect();

    // (5) compose
    let c = b.compose_univariate(&p_round);

    let mut residuals = Vec::with_capacity(points.len());
    for (x, v) in points.iter().zip(&values) {
        let value = (&Dyadic::pow2(m as i64) * &c.eval_exact(&exact_points[residuals.len()])?).pow(2 * d);
        residuals.push(PointResidual {
            point: x.clone(),
            target: v.to_f64(),
            value: value.to_f64(),
            residual: (v - &value).abs().to_f64(),
        });
    }
    let success = residuals.iter().all(|r| r.residual < eps);
    Ok(Certificate {
        kind: CertificateKind::Tk,
        success,
        decomposition: Decomposition::ScaledPower { m, c, d },
        target: Some(fx),
        residuals: Residuals { points: residuals, ..Default::default() },
        params: Params {
            eps: Some(eps),
            delta: Some(delta),
            precision_bits: Some(k),
            shift: shift_bits.map(|_| shift.to_f64()),
            nodes: Some(distinct.len()),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x1() -> Polynomial {
        Polynomial::var(1, 0)
    }

    #[test]
    fn perfect_power() {
        let f = Polynomial::constant(1, Dyadic::from_int(4));
        let cert = tk_approximate(&f, &[vec![0.3]], 1, 0.1).unwrap();
        assert!(cert.success);
        assert_eq!(cert.residuals.points[0].residual, 0.0);
        let v = cert.residuals.points[0].value;
        assert!(v > 3.9 && v < 4.1);
        match &cert.decomposition {
            Decomposition::ScaledPower { m, c, .. } => {
                // strict bound 4 < 2^{2m} gives m = 2, so c = 1/2
                assert_eq!(*m, 2);
                assert_eq!(*c, Polynomial::constant(1, Dyadic::new(1, 1)));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(cert.element(), f);
        cert.verify(None).unwrap();
    }

    #[test]
    fn square_two_nodes() {
        let f = x1().pow(2);
        let cert = tk_approximate(&f, &[vec![1.0], vec![2.0]], 1, 1e-3).unwrap();
        assert!(cert.success);
        for r in &cert.residuals.points {
            assert!(r.residual < 1e-3);
        }
        // independent check on the expanded element
        let e = cert.element();
        assert!(e.is_exact());
        for (x, t) in [(1.0, 1.0), (2.0, 4.0)] {
            assert!((e.eval(&[x]).unwrap() - t).abs() < 1e-3);
        }
        cert.verify(None).unwrap();
    }

    #[test]
    fn negative_value_is_reported() {
        let f = Polynomial::constant(1, Dyadic::from_int(-1));
        match tk_approximate(&f, &[vec![0.0]], 1, 0.1) {
            Err(Error::NonMembership { point, value, .. }) => {
                assert_eq!(point, vec![0.0]);
                assert_eq!(value, -1.0);
            }
            other => panic!("expected non-membership, got {other:?}"),
        }
    }

    #[test]
    fn zero_is_shifted() {
        let f = x1();
        let cert = tk_approximate(&f, &[vec![0.0], vec![0.5]], 2, 0.01).unwrap();
        assert!(cert.success);
        assert!(cert.params.shift.unwrap() <= 0.005);
        // slightly negative within the shift is still accepted
        let g = x1().sub(&Polynomial::constant(1, Dyadic::pow2(-12))).unwrap();
        assert!(tk_approximate(&g, &[vec![0.0]], 1, 0.01).is_ok());
        assert!(tk_approximate(&g, &[vec![0.0]], 1, 1e-4).is_err());
    }

    #[test]
    fn float_coefficients_and_ties() {
        let f = Polynomial::from_terms(2, [(vec![2, 0], 0.3), (vec![0, 2], 0.7), (vec![0, 0], 0.1)]).unwrap();
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.5, 0.25], vec![0.0, 3.0]];
        let cert = tk_approximate(&f, &pts, 3, 1e-4).unwrap();
        assert!(cert.success);
        assert_eq!(cert.params.nodes, Some(3));
        cert.verify(None).unwrap();
    }

    #[test]
    fn interpolation_oracle() {
        let xs: Vec<BigRational> = [1, 2, 4].iter().map(|&v| BigRational::from_integer(v.into())).collect();
        let ys: Vec<BigRational> = [3, 7, 21].iter().map(|&v| BigRational::from_integer(v.into())).collect();
        // t^2 + t + 1
        let p = interpolate(&xs, &ys);
        assert_eq!(p, vec![BigRational::one(), BigRational::one(), BigRational::one()]);
    }

    #[test]
    fn rational_rounding() {
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(round_rational(&third, 10), Dyadic::new(341, 10));
        assert_eq!(round_rational(&-third, 10), Dyadic::new(-341, 10));
        let x = BigRational::new(3.into(), 1.into());
        assert_eq!(round_rational(&x, -1), Dyadic::from_int(4));
    }
}
