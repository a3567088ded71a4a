use super::certificate::{Certificate, CertificateKind, Decomposition, Params, Residuals, SupResidual};
use super::fit::{ChebyshevBasis, LeastSquares};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::topologies::Region;

fn sampled_residual(f: &[f64], b: &Polynomial, d: u32, samples: &[Vec<f64>]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, (x, fx)) in samples.iter().zip(f).enumerate() {
        let r = (fx - b.eval_unchecked(x).powi(2 * d as i32)).abs();
        if r > best.0 {
            best = (r, i);
        }
    }
    best
}

/// Sup-norm approximation of `f` by a single `2d`-power on the samples of
/// `k`.
///
/// Fits `b` to `(f + eps/2)^{1/2d}` by least squares for each degree up to
/// `max_fit_degree` and keeps the degree with the smallest sampled
/// `||f - b^{2d}||`. The certificate is a failure certificate when that
/// residual is not below `eps`.
pub fn sup_approximate(f: &Polynomial, k: &Region, d: u32, eps: f64, max_fit_degree: u32) -> Result<Certificate> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if f.n() != k.n() {
        return Err(Error::DimensionMismatch { expected: k.n(), got: f.n() });
    }
    let samples = k.samples();
    if samples.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let ff = f.to_float();
    let values: Vec<f64> = samples.iter().map(|x| ff.eval_unchecked(x)).collect();
    let (imin, vmin) = values.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
    if vmin < -eps / 4.0 {
        return Err(Error::NonMembership { point: samples[imin].clone(), value: vmin, tolerance: eps / 4.0 });
    }
    let root = 1.0 / (2 * d) as f64;
    let target: Vec<f64> = values.iter().map(|v| (v + eps / 2.0).powf(root)).collect();

    let basis = ChebyshevBasis::new(&k.bounds(), max_fit_degree);
    let ls = LeastSquares::new(&basis, samples, &target);
    let mut best: Option<(f64, usize, super::fit::Fit)> = None;
    for degree in 0..=max_fit_degree {
        let fit = ls.solve(degree);
        if fit.rank < fit.columns {
            if best.is_none() {
                return Err(Error::RankDeficient {
                    degree,
                    rank: fit.rank,
                    columns: fit.columns,
                    condition: fit.condition,
                });
            }
            break;
        }
        let (res, arg) = sampled_residual(&values, &fit.polynomial, d, samples);
        if best.as_ref().is_none_or(|(r, _, _)| res < *r) {
            best = Some((res, arg, fit));
        }
    }
    let (residual, arg, fit) = best.expect("degree 0 is always attempted");
    Ok(Certificate {
        kind: CertificateKind::Sup,
        success: residual < eps,
        decomposition: Decomposition::Power { b: fit.polynomial, d },
        target: Some(ff),
        residuals: Residuals {
            sup: Some(SupResidual { value: residual, argmax: samples[arg].clone(), samples: samples.len() }),
            ..Default::default()
        },
        params: Params {
            eps: Some(eps),
            degree: Some(fit.degree),
            max_degree: Some(max_fit_degree),
            resolution: Some(k.resolution()),
            rank: Some(fit.rank),
            condition: Some(fit.condition),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Dyadic;

    fn x() -> Polynomial {
        Polynomial::var(1, 0)
    }

    #[test]
    fn exact_square_is_shift_dominated() {
        let f = x().sub(&Polynomial::constant(1, Dyadic::new(1, 1))).unwrap().pow(2);
        let k = Region::cube(&[[0.0, 1.0]], 1e-2).unwrap();
        let cert = sup_approximate(&f, &k, 1, 0.1, 10).unwrap();
        assert!(cert.success);
        let r = cert.residuals.sup.as_ref().unwrap().value;
        assert!(r <= 0.06, "{r}");
        cert.verify(Some(&k)).unwrap();
    }

    #[test]
    fn root_of_parabola() {
        let f = Polynomial::one(1).sub(&x().pow(2)).unwrap();
        let k = Region::cube(&[[-1.0, 1.0]], 1e-3).unwrap();
        let cert = sup_approximate(&f, &k, 1, 0.1, 20).unwrap();
        assert!(cert.success);
        assert!(cert.residuals.sup.as_ref().unwrap().value < 0.1);
        // element is a square, hence nonnegative on samples
        let Decomposition::Power { b, d } = &cert.decomposition else { panic!() };
        assert_eq!(*d, 1);
        assert!(b.degree() <= 20);
        cert.verify(Some(&k)).unwrap();
    }

    #[test]
    fn negative_function_rejected() {
        let k = Region::cube(&[[-1.0, 1.0]], 1e-2).unwrap();
        match sup_approximate(&x(), &k, 1, 0.1, 5) {
            Err(Error::NonMembership { point, value, .. }) => {
                assert_eq!(point, vec![-1.0]);
                assert_eq!(value, -1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tiny_budget_gives_failure_certificate() {
        let f = Polynomial::one(1).sub(&x().pow(2)).unwrap();
        let k = Region::cube(&[[-1.0, 1.0]], 1e-2).unwrap();
        let cert = sup_approximate(&f, &k, 2, 1e-6, 3).unwrap();
        assert!(!cert.success);
        assert!(cert.params.degree.unwrap() <= 3);
    }

    #[test]
    fn rank_deficiency_reported() {
        let k = Region::from_points(&[[0.0, 1.0], [0.0, 1.0]], vec![], vec![vec![0.5, 0.5]], 0.1).unwrap();
        let f = Polynomial::one(2);
        // a single sample supports the constant fit only
        let cert = sup_approximate(&f, &k, 1, 0.1, 3).unwrap();
        assert_eq!(cert.params.degree, Some(0));
        let k = Region::from_points(&[[0.0, 1.0], [0.0, 1.0]], vec![], vec![vec![0.0, 0.0]], 0.1).unwrap();
        assert!(sup_approximate(&f, &k, 1, 0.1, 3).is_ok());
    }
}
