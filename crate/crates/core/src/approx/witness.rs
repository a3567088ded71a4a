use super::certificate::{Certificate, CertificateKind, Decomposition, Params, PointResidual, Residuals};
use super::fit::{ChebyshevBasis, LeastSquares};
use crate::error::{Error, Result};
use crate::topologies::Region;

fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// A polynomial that is small at every given point but has sampled
/// sup-norm close to 1 on `k`.
///
/// The far sample `beta` (the one farthest from the points) anchors a bump
/// `h(x) = min(1, dist(x, A) / dist(beta, A))`; `a` is the least-squares fit
/// to `h` under the exact constraints `a = 0` on the points and
/// `a(beta) = 1`. Degrees `1..=fit_degree` are tried in order.
pub fn strictness_witness(points: &[Vec<f64>], k: &Region, eps: f64, fit_degree: u32) -> Result<Certificate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("at least one point is required".into()));
    }
    for p in points {
        if p.len() != k.n() {
            return Err(Error::DimensionMismatch { expected: k.n(), got: p.len() });
        }
    }
    let samples = k.samples();
    let dist: Vec<f64> =
        samples.iter().map(|x| points.iter().map(|a| distance(x, a)).fold(f64::INFINITY, f64::min)).collect();
    let (ib, db) = dist
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if samples.is_empty() || db <= k.max_step() {
        return Err(Error::NoSeparatedPoint { resolution: k.max_step() });
    }
    let beta = samples[ib].clone();
    let bump: Vec<f64> = dist.iter().map(|v| (v / db).min(1.0)).collect();

    let basis = ChebyshevBasis::new(&k.bounds(), fit_degree.max(1));
    let ls = LeastSquares::new(&basis, samples, &bump);
    let mut constraints = points.to_vec();
    constraints.push(beta.clone());
    let mut values = vec![0.0; points.len()];
    values.push(1.0);

    let mut best = None;
    for degree in 1..=fit_degree.max(1) {
        let fit = ls.solve_constrained(degree, &constraints, &values);
        let a = fit.polynomial;
        let at_points: Vec<f64> = points.iter().map(|p| a.eval_unchecked(p)).collect();
        let worst = at_points.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut cert = Certificate {
            kind: CertificateKind::Witness,
            success: false,
            decomposition: Decomposition::Witness { a, beta: beta.clone() },
            target: None,
            residuals: Residuals {
                points: points
                    .iter()
                    .zip(&at_points)
                    .map(|(p, v)| PointResidual { point: p.clone(), target: 0.0, value: *v, residual: v.abs() })
                    .collect(),
                ..Default::default()
            },
            params: Params {
                eps: Some(eps),
                degree: Some(degree),
                max_degree: Some(fit_degree),
                resolution: Some(k.resolution()),
                ..Default::default()
            },
        };
        let sup = cert.sampled_sup(k)?;
        let excess = (worst - eps).max(1.0 - eps - sup.value);
        cert.success = worst <= eps && sup.value >= 1.0 - eps;
        cert.residuals.sup = Some(sup);
        if cert.success {
            return Ok(cert);
        }
        if best.as_ref().is_none_or(|(e, _)| excess < *e) {
            best = Some((excess, cert));
        }
    }
    Ok(best.expect("at least one degree is tried").1)
}
