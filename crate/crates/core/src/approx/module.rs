use super::certificate::{Certificate, CertificateKind, Decomposition, ModuleTerm, Params, PointResidual, Residuals};
use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Relative tolerance under which two node values count as equal.
pub const VALUE_TIE: f64 = 1e-12;

/// Residuals at or below this (relative to the target) count as exact.
pub const EXACT_TOL: f64 = 1e-9;

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= VALUE_TIE * x.abs().max(y.abs()).max(1.0)
}

/// An element `p` of the module generated by `1` and `generators` over the
/// sums of `2d`-powers with `p(alpha_i) = a(alpha_i)` at every point.
///
/// Each point gets `t_i`, a nonnegative multiple of `1` or of the first
/// generator negative there, with `t_i(alpha_i) = a(alpha_i)`. Lagrange-type
/// products `p_i` in the values of the `t_l` then isolate each class of
/// points the `t_l` cannot tell apart, and
/// `p = sum_j (1/lambda_j) p_j^{2d} t_j` with `lambda_j` the class size.
pub fn module_interpolate(
    a: &Polynomial,
    generators: &[Polynomial],
    points: &[Vec<f64>],
    d: u32,
) -> Result<Certificate> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("at least one point is required".into()));
    }
    let n = a.n();
    for g in generators {
        if g.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.n() });
        }
    }
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
    }
    let a = a.to_float();
    let generators: Vec<Polynomial> = generators.iter().map(Polynomial::to_float).collect();
    let targets: Vec<f64> = points.iter().map(|p| a.eval_unchecked(p)).collect();

    // t_i = scale_i * g_i
    let mut choice: Vec<(f64, Option<usize>)> = Vec::with_capacity(points.len());
    for (p, &v) in points.iter().zip(&targets) {
        if v >= 0.0 {
            choice.push((v, None));
            continue;
        }
        let neg = generators.iter().enumerate().map(|(j, g)| (j, g.eval_unchecked(p))).find(|(_, s)| *s < 0.0);
        match neg {
            Some((j, s)) => choice.push((v / s, Some(j))),
            None => return Err(Error::ModuleContradiction { point: p.clone(), value: v }),
        }
    }
    let t: Vec<Polynomial> = choice
        .iter()
        .map(|&(scale, g)| match g {
            Some(j) => generators[j].scale(&scale.into()),
            None => Polynomial::constant(n, scale),
        })
        .collect();
    // tv[l][j] = t_l(alpha_j)
    let mut separators = t.clone();
    let mut tv: Vec<Vec<f64>> =
        separators.iter().map(|tl| points.iter().map(|p| tl.eval_unchecked(p)).collect()).collect();
    let k = points.len();
    let class = |tv: &[Vec<f64>], i: usize, m: usize| tv.iter().all(|row| same(row[i], row[m]));
    // The t_l alone may fail to tell apart points where a differs (for
    // instance when every t_l is a constant); the coordinates always do.
    let coordinates_separate = (0..k).any(|i| (0..k).any(|m| class(&tv, i, m) && !same(targets[i], targets[m])));
    if coordinates_separate {
        for v in 0..n {
            separators.push(Polynomial::var(n, v));
            tv.push(points.iter().map(|p| p[v]).collect());
        }
    }

    let mut terms = Vec::with_capacity(k);
    for i in 0..k {
        let mut pi = Polynomial::one(n);
        for (sl, row) in separators.iter().zip(&tv) {
            for &vj in row {
                let vi = row[i];
                if same(vi, vj) {
                    continue;
                }
                let factor = sl.sub(&Polynomial::constant(n, vj))?.scale(&(1.0 / (vi - vj)).into());
                pi = pi.mul(&factor)?;
            }
        }
        let lambda = (0..k).filter(|&m| class(&tv, i, m)).count();
        terms.push(ModuleTerm {
            multiplicity: lambda,
            weight: 1.0 / lambda as f64,
            p: pi,
            scale: choice[i].0,
            generator: choice[i].1,
        });
    }

    let decomposition = Decomposition::Module { d, generators, terms, coordinates_separate };
    let mut residuals = Vec::with_capacity(k);
    for (p, &target) in points.iter().zip(&targets) {
        let value = decomposition.eval(p)?;
        residuals.push(PointResidual { point: p.clone(), target, value, residual: (target - value).abs() });
    }
    let success = residuals.iter().all(|r| r.residual <= EXACT_TOL * r.target.abs().max(1.0));
    Ok(Certificate {
        kind: CertificateKind::Module,
        success,
        decomposition,
        target: Some(a),
        residuals: Residuals { points: residuals, ..Default::default() },
        params: Params { nodes: Some(k), ..Default::default() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_nonnegative_point() {
        let a = Polynomial::constant(1, 4.0);
        let cert = module_interpolate(&a, &[], &[vec![0.7]], 1).unwrap();
        let Decomposition::Module { terms, .. } = &cert.decomposition else { panic!() };
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].scale, 4.0);
        assert_eq!(terms[0].p, Polynomial::one(1));
        assert_eq!(terms[0].multiplicity, 1);
        assert_eq!(cert.element(), Polynomial::constant(1, 4.0));
        assert_eq!(cert.residuals.points[0].residual, 0.0);
    }

    #[test]
    fn identity_on_three_points() {
        let x = Polynomial::var(1, 0);
        let pts = vec![vec![-1.0], vec![1.0], vec![2.0]];
        for d in [1, 2] {
            let cert = module_interpolate(&x, std::slice::from_ref(&x), &pts, d).unwrap();
            assert!(cert.success);
            for r in &cert.residuals.points {
                assert!(r.residual < 1e-9);
            }
            let Decomposition::Module { terms, coordinates_separate, .. } = &cert.decomposition else { panic!() };
            assert_eq!(terms[0].generator, Some(0));
            assert_eq!(terms[0].scale, 1.0);
            assert!(terms.iter().all(|t| t.multiplicity == 1));
            assert!(!coordinates_separate);
            // expanded element agrees too
            let e = cert.element();
            for p in &pts {
                assert!((e.eval(p).unwrap() - p[0]).abs() < 1e-9);
            }
            cert.verify(None).unwrap();
        }
    }

    #[test]
    fn constant_t_need_coordinates() {
        // every t_i is a constant, so the t's separate nothing
        let x = Polynomial::var(1, 0);
        let a = x.pow(2);
        let pts = vec![vec![-1.0], vec![1.0], vec![3.0]];
        let cert = module_interpolate(&a, &[], &pts, 1).unwrap();
        let Decomposition::Module { terms, coordinates_separate, .. } = &cert.decomposition else { panic!() };
        assert!(*coordinates_separate);
        let lambdas: Vec<usize> = terms.iter().map(|t| t.multiplicity).collect();
        assert_eq!(lambdas, vec![1, 1, 1]);
        assert!(cert.success);
        cert.verify(None).unwrap();
    }

    #[test]
    fn repeated_points_share_weight() {
        let x = Polynomial::var(1, 0);
        let pts = vec![vec![-1.0], vec![2.0], vec![-1.0]];
        let cert = module_interpolate(&x, std::slice::from_ref(&x), &pts, 1).unwrap();
        let Decomposition::Module { terms, .. } = &cert.decomposition else { panic!() };
        let lambdas: Vec<usize> = terms.iter().map(|t| t.multiplicity).collect();
        assert_eq!(lambdas, vec![2, 1, 2]);
        assert!(cert.success);
        cert.verify(None).unwrap();
    }

    #[test]
    fn contradiction_without_generators() {
        let a = Polynomial::var(1, 0);
        match module_interpolate(&a, &[], &[vec![1.0], vec![-0.5]], 1) {
            Err(Error::ModuleContradiction { point, value }) => {
                assert_eq!(point, vec![-0.5]);
                assert_eq!(value, -0.5);
            }
            other => panic!("{other:?}"),
        }
    }
}
