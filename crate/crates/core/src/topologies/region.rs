use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, PolynomialFile};

/// Inequality values at or above this count as satisfied.
pub const INEQ_TOL: f64 = -1e-12;

/// Hard cap on generated grid sizes.
pub const MAX_SAMPLES: usize = 4_000_000;

/// Compact subset of `R^n`: a box, optionally cut down by polynomial
/// inequalities `g_j >= 0`, represented by a deterministic sample set.
#[derive(Clone, Debug)]
pub struct Region {
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    ineqs: Vec<Polynomial>,
    resolution: f64,
    /// Grid step per axis; the lattice is `anchor + j * step`.
    steps: Vec<f64>,
    anchor: Vec<f64>,
    samples: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IneqRef {
    Inline(PolynomialFile),
    Path(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionFile {
    pub n: usize,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub ineqs: Vec<IneqRef>,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// Explicit sample points; when present they replace the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

fn default_resolution() -> f64 {
    1e-2
}

fn axis_step(lo: f64, hi: f64, resolution: f64) -> (f64, usize) {
    if hi > lo {
        let intervals = (1.0 / resolution).ceil().max(1.0) as usize;
        ((hi - lo) / intervals as f64, intervals + 1)
    } else {
        (0.0, 1)
    }
}

impl Region {
    /// Grid-sampled box (and inequalities). `resolution` is the grid step
    /// relative to each side length; both endpoints of every side are
    /// sampled.
    pub fn new(bounds: &[[f64; 2]], ineqs: Vec<Polynomial>, resolution: f64) -> Result<Region> {
        let n = bounds.len();
        validate_box(bounds, resolution)?;
        for g in &ineqs {
            if g.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.n() });
            }
        }
        let lower: Vec<f64> = bounds.iter().map(|b| b[0]).collect();
        let upper: Vec<f64> = bounds.iter().map(|b| b[1]).collect();
        let mut steps = Vec::with_capacity(n);
        let mut counts = Vec::with_capacity(n);
        for i in 0..n {
            let (s, c) = axis_step(lower[i], upper[i], resolution);
            steps.push(s);
            counts.push(c);
        }
        let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
        match total {
            Some(t) if t <= MAX_SAMPLES => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "grid with {counts:?} points per axis exceeds {MAX_SAMPLES} samples"
                )))
            }
        }
        let mut samples = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<f64> = (0..n)
                .map(|i| if idx[i] + 1 == counts[i] { upper[i] } else { lower[i] + idx[i] as f64 * steps[i] })
                .collect();
            if ineqs.iter().all(|g| g.eval_unchecked(&x) >= INEQ_TOL) {
                samples.push(x);
            }
            // odometer, last axis fastest
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < counts[i] {
                    break;
                }
                idx[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
        if samples.is_empty() {
            return Err(Error::EmptyRegion);
        }
        Ok(Region { n, anchor: lower.clone(), lower, upper, ineqs, resolution, steps, samples })
    }

    /// Plain box `prod [l_i, u_i]`.
    pub fn cube(bounds: &[[f64; 2]], resolution: f64) -> Result<Region> {
        Region::new(bounds, Vec::new(), resolution)
    }

    /// Region given by an explicit point set inside a box. Every point must
    /// satisfy the box bounds and the inequalities.
    pub fn from_points(
        bounds: &[[f64; 2]],
        ineqs: Vec<Polynomial>,
        points: Vec<Vec<f64>>,
        resolution: f64,
    ) -> Result<Region> {
        let n = bounds.len();
        validate_box(bounds, resolution)?;
        if points.is_empty() {
            return Err(Error::EmptyRegion);
        }
        for (k, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            if p.iter().zip(bounds).any(|(x, b)| *x < b[0] || *x > b[1] || !x.is_finite()) {
                return Err(Error::Invariant {
                    invariant: "samples lie in the box",
                    detail: format!("point {k} = {p:?}"),
                });
            }
            for (j, g) in ineqs.iter().enumerate() {
                if g.n() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: g.n() });
                }
                let v = g.eval_unchecked(p);
                if v < INEQ_TOL {
                    return Err(Error::Invariant {
                        invariant: "samples satisfy every inequality g_j >= 0",
                        detail: format!("g_{j}(point {k} = {p:?}) = {v}"),
                    });
                }
            }
        }
        let lower: Vec<f64> = bounds.iter().map(|b| b[0]).collect();
        let upper: Vec<f64> = bounds.iter().map(|b| b[1]).collect();
        let steps = (0..n).map(|i| axis_step(lower[i], upper[i], resolution).0).collect();
        Ok(Region { n, anchor: lower.clone(), lower, upper, ineqs, resolution, steps, samples: points })
    }

    /// Loads a region file; string inequality entries are polynomial file
    /// paths relative to `base_dir`.
    pub fn from_file(file: RegionFile, base_dir: Option<&Path>) -> Result<Region> {
        if file.bounds.len() != file.n {
            return Err(Error::DimensionMismatch { expected: file.n, got: file.bounds.len() });
        }
        let mut ineqs = Vec::new();
        for r in file.ineqs {
            let p = match r {
                IneqRef::Inline(pf) => Polynomial::try_from(pf)?,
                IneqRef::Path(path) => {
                    let full = match base_dir {
                        Some(b) => b.join(&path),
                        None => path.into(),
                    };
                    Polynomial::from_json(&std::fs::read_to_string(&full)?)?
                }
            };
            ineqs.push(p);
        }
        match file.points {
            Some(points) => Region::from_points(&file.bounds, ineqs, points, file.resolution),
            None => Region::new(&file.bounds, ineqs, file.resolution),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bounds(&self) -> Vec<[f64; 2]> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| [*l, *u]).collect()
    }

    pub fn ineqs(&self) -> &[Polynomial] {
        &self.ineqs
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Largest grid step over all axes.
    pub fn max_step(&self) -> f64 {
        self.steps.iter().copied().fold(0.0, f64::max)
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// `max_i max(|l_i|, |u_i|)`.
    pub fn max_abs_coordinate(&self) -> f64 {
        self.lower.iter().chain(&self.upper).map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Grid surrogate of the closed fattening `cl(U_{x in K} N_eps(x))`: the
    /// box grows by `eps` per side and the sample set gains every lattice
    /// point within Euclidean distance `eps` of an original sample.
    ///
    /// Axes of zero length use the resolution itself as an absolute step, so
    /// the lattice does not depend on `eps` and fattenings are nested.
    pub fn fatten(&self, eps: f64) -> Result<Region> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let n = self.n;
        let steps: Vec<f64> = self.steps.iter().map(|&s| if s > 0.0 { s } else { self.resolution }).collect();
        let reach: Vec<i64> = steps.iter().map(|s| (eps / s).floor() as i64).collect();
        let per_sample: f64 = reach.iter().map(|r| (2 * r + 1) as f64).product();
        if per_sample * self.samples.len() as f64 > 50.0 * MAX_SAMPLES as f64 {
            return Err(Error::InvalidArgument(format!(
                "fattening by {eps} at this resolution visits too many lattice points"
            )));
        }

        let lattice_index =
            |x: &[f64]| -> Vec<i64> { (0..n).map(|i| ((x[i] - self.anchor[i]) / steps[i]).round() as i64).collect() };
        let coord = |idx: &[i64]| -> Vec<f64> { (0..n).map(|i| self.anchor[i] + idx[i] as f64 * steps[i]).collect() };

        let mut taken: HashSet<Vec<i64>> = HashSet::new();
        for x in &self.samples {
            let idx = lattice_index(x);
            let on_lattice = coord(&idx)
                .iter()
                .zip(x)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * steps.iter().cloned().fold(1.0, f64::max));
            if on_lattice {
                taken.insert(idx);
            }
        }
        let eps2 = eps * eps * (1.0 + 1e-12);
        let mut added: Vec<Vec<i64>> = Vec::new();
        let mut offset = vec![0i64; n];
        for x in &self.samples {
            let base = lattice_index(x);
            for (i, o) in offset.iter_mut().enumerate() {
                *o = -reach[i];
            }
            loop {
                let idx: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
                if !taken.contains(&idx) {
                    let p = coord(&idx);
                    let d2: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 <= eps2 {
                        taken.insert(idx.clone());
                        added.push(idx);
                    }
                }
                let mut i = n;
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    offset[i] += 1;
                    if offset[i] <= reach[i] {
                        done = false;
                        break;
                    }
                    offset[i] = -reach[i];
                }
                if done {
                    break;
                }
            }
        }
        added.sort();
        let mut samples = self.samples.clone();
        samples.extend(added.iter().map(|idx| coord(idx)));
        Ok(Region {
            n,
            lower: self.lower.iter().map(|l| l - eps).collect(),
            upper: self.upper.iter().map(|u| u + eps).collect(),
            ineqs: Vec::new(),
            resolution: self.resolution,
            steps,
            anchor: self.anchor.clone(),
            samples,
        })
    }
}

fn validate_box(bounds: &[[f64; 2]], resolution: f64) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::Invariant { invariant: "variable count n >= 1", detail: "n = 0".into() });
    }
    if let Some(b) = bounds.iter().find(|b| !(b[0].is_finite() && b[1].is_finite() && b[0] <= b[1])) {
        return Err(Error::Invariant {
            invariant: "box sides satisfy l_i <= u_i and are finite",
            detail: format!("{b:?}"),
        });
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::InvalidArgument(format!("resolution must lie in (0, 1], got {resolution}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Dyadic;

    #[test]
    fn grid_includes_endpoints() {
        let k = Region::cube(&[[-1.0, 1.0]], 1e-2).unwrap();
        assert_eq!(k.samples().len(), 101);
        assert_eq!(k.samples()[0], vec![-1.0]);
        assert_eq!(k.samples()[100], vec![1.0]);
        assert!(k.samples().iter().any(|x| (x[0] - 0.5).abs() < 1e-12));
    }

    #[test]
    fn deterministic() {
        let a = Region::cube(&[[0.0, 1.0], [-2.0, 3.0]], 0.05).unwrap();
        let b = Region::cube(&[[0.0, 1.0], [-2.0, 3.0]], 0.05).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_eq!(a.samples().len(), 21 * 21);
    }

    #[test]
    fn semialgebraic_filter() {
        // unit disc: 1 - x^2 - y^2 >= 0
        let g =
            Polynomial::one(2).sub(&Polynomial::var(2, 0).pow(2)).unwrap().sub(&Polynomial::var(2, 1).pow(2)).unwrap();
        let k = Region::new(&[[-1.0, 1.0], [-1.0, 1.0]], vec![g.clone()], 0.05).unwrap();
        assert!(k.samples().len() < 41 * 41);
        for x in k.samples() {
            assert!(g.eval(x).unwrap() >= INEQ_TOL);
        }
        assert!(k.samples().contains(&vec![1.0, 0.0]));
    }

    #[test]
    fn empty_region() {
        let g = Polynomial::constant(1, Dyadic::from_int(-1));
        assert!(matches!(Region::new(&[[0.0, 1.0]], vec![g], 0.1), Err(Error::EmptyRegion)));
    }

    #[test]
    fn explicit_points_checked() {
        let g = Polynomial::var(1, 0);
        let err = Region::from_points(&[[-1.0, 1.0]], vec![g], vec![vec![-0.5]], 0.1).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }));
        assert!(Region::from_points(&[[0.0, 1.0]], vec![], vec![vec![2.0]], 0.1).is_err());
    }

    #[test]
    fn fatten_point() {
        let k = Region::cube(&[[0.0, 0.0]], 0.01).unwrap();
        let f = k.fatten(1.0).unwrap();
        let xs: Vec<f64> = f.samples().iter().map(|x| x[0]).collect();
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((min + 1.0).abs() < 1e-9 && (max - 1.0).abs() < 1e-9);
        assert_eq!(xs.len(), 201);
        assert_eq!(f.bounds(), vec![[-1.0, 1.0]]);
    }

    #[test]
    fn fatten_monotone_and_superset() {
        let k = Region::cube(&[[-1.0, 1.0], [0.0, 0.5]], 0.1).unwrap();
        let f1 = k.fatten(0.1).unwrap();
        let f2 = k.fatten(0.25).unwrap();
        for x in k.samples() {
            assert!(f1.samples().contains(x));
        }
        for x in f1.samples() {
            assert!(f2.samples().iter().any(|y| y.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-12)));
        }
    }

    #[test]
    fn fatten_circle_gains_interior() {
        // oracle: count lattice points in the closed annulus 0.9 <= r <= 1.1 vs on the curve
        let pts: Vec<Vec<f64>> = (0..200)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 200.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let k = Region::from_points(&[[-1.0, 1.0], [-1.0, 1.0]], vec![], pts, 0.02).unwrap();
        let f = k.fatten(0.1).unwrap();
        let step = 0.04;
        // a full grid cell: all four corners of some lattice square present
        let has = |x: f64, y: f64| f.samples().iter().any(|p| (p[0] - x).abs() < 1e-9 && (p[1] - y).abs() < 1e-9);
        let mut found = false;
        for i in 0..50 {
            for j in 0..50 {
                let x = -1.0 + i as f64 * step;
                let y = -1.0 + j as f64 * step;
                let r = (x * x + y * y).sqrt();
                if r > 0.95 && r < 1.0 && has(x, y) && has(x + step, y) && has(x, y + step) && has(x + step, y + step) {
                    found = true;
                }
            }
        }
        assert!(found, "no full grid cell in the fattened annulus");
        // lattice points of the closed annulus 0.9 <= r <= 1.1 number about
        // 2 pi * 0.2 / 0.04^2 ~ 785, against 200 points on the curve
        let annulus = f
            .samples()
            .iter()
            .filter(|p| {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                (0.9..=1.1).contains(&r)
            })
            .count();
        assert!(annulus > 600, "annulus count {annulus}");
        assert!(f.samples().len() > 3 * k.samples().len());
    }
}
