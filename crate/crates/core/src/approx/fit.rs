//! Discrete least squares on sample sets in a tensor Chebyshev basis.
//!
//! Columns are `prod_i T_{s_i}(u_i(x))` with `u_i` the affine map of the
//! box side onto `[-1, 1]`, ordered by total degree so that every degree
//! prefix is itself a basis of the polynomials of that degree.

use nalgebra::{DMatrix, DVector};

use crate::poly::{Monomial, Polynomial};

/// Relative eigenvalue cutoff on the Gram matrix.
const GRAM_RANK_TOL: f64 = 1e-13;

pub(crate) struct ChebyshevBasis {
    n: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    max_degree: u32,
    indices: Vec<Monomial>,
}

pub(crate) struct Fit {
    pub degree: u32,
    pub polynomial: Polynomial,
    pub rank: usize,
    pub columns: usize,
    pub condition: f64,
}

impl ChebyshevBasis {
    pub fn new(bounds: &[[f64; 2]], max_degree: u32) -> Self {
        let n = bounds.len();
        ChebyshevBasis {
            n,
            lower: bounds.iter().map(|b| b[0]).collect(),
            upper: bounds.iter().map(|b| b[1]).collect(),
            max_degree,
            indices: Monomial::all_up_to(n, max_degree),
        }
    }

    pub fn columns(&self, degree: u32) -> usize {
        self.indices.iter().take_while(|m| m.degree() <= degree).count()
    }

    fn local(&self, i: usize, x: f64) -> f64 {
        let (l, u) = (self.lower[i], self.upper[i]);
        if u > l {
            (2.0 * x - (l + u)) / (u - l)
        } else {
            0.0
        }
    }

    /// Values of every basis column at `x`.
    pub fn row(&self, x: &[f64]) -> Vec<f64> {
        let d = self.max_degree as usize;
        let mut t = vec![vec![0.0; d + 1]; self.n];
        for (i, ti) in t.iter_mut().enumerate() {
            let u = self.local(i, x[i]);
            ti[0] = 1.0;
            if d >= 1 {
                ti[1] = u;
            }
            for k in 2..=d {
                ti[k] = 2.0 * u * ti[k - 1] - ti[k - 2];
            }
        }
        self.indices
            .iter()
            .map(|m| m.exponents().iter().enumerate().map(|(i, &e)| t[i][e as usize]).product())
            .collect()
    }

    pub fn matrix(&self, points: &[Vec<f64>]) -> DMatrix<f64> {
        let cols = self.indices.len();
        let mut a = DMatrix::zeros(points.len(), cols);
        for (r, x) in points.iter().enumerate() {
            for (c, v) in self.row(x).into_iter().enumerate() {
                a[(r, c)] = v;
            }
        }
        a
    }

    /// Monomial-basis polynomial with the given Chebyshev coefficients
    /// (a prefix of the column list).
    pub fn to_polynomial(&self, coeffs: &[f64]) -> Polynomial {
        let n = self.n;
        let d = self.max_degree as usize;
        // T_k(u_i(X_i)) as polynomials
        let mut cheb: Vec<Vec<Polynomial>> = Vec::with_capacity(n);
        for i in 0..n {
            let (l, u) = (self.lower[i], self.upper[i]);
            let ui = if u > l {
                Polynomial::var(n, i)
                    .scale(&(2.0 / (u - l)).into())
                    .add(&Polynomial::constant(n, -(l + u) / (u - l)))
                    .expect("same dimension")
            } else {
                Polynomial::zero(n)
            };
            let mut ts = vec![Polynomial::constant(n, 1.0)];
            if d >= 1 {
                ts.push(ui.to_float());
            }
            for k in 2..=d {
                let next = ui
                    .mul(&ts[k - 1])
                    .expect("same dimension")
                    .scale(&2.0.into())
                    .sub(&ts[k - 2])
                    .expect("same dimension");
                ts.push(next);
            }
            cheb.push(ts);
        }
        let mut out = Polynomial::zero(n);
        for (m, &c) in self.indices.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            let mut term = Polynomial::constant(n, c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&cheb[i][e as usize]).expect("same dimension");
                }
            }
            out = out.add(&term).expect("same dimension");
        }
        out.to_float()
    }
}

/// Least-squares system over a fixed sample set, solved for successive
/// degree prefixes from one Gram matrix.
pub(crate) struct LeastSquares<'a> {
    basis: &'a ChebyshevBasis,
    gram: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl<'a> LeastSquares<'a> {
    pub fn new(basis: &'a ChebyshevBasis, points: &[Vec<f64>], target: &[f64]) -> Self {
        let a = basis.matrix(points);
        let gram = a.tr_mul(&a);
        let rhs = a.tr_mul(&DVector::from_column_slice(target));
        LeastSquares { basis, gram, rhs }
    }

    fn spectrum(g: &DMatrix<f64>) -> (usize, f64, nalgebra::SymmetricEigen<f64, nalgebra::Dyn>) {
        let eig = g.clone().symmetric_eigen();
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let rank = eig.eigenvalues.iter().filter(|&&v| v > GRAM_RANK_TOL * max).count();
        let condition = if min > 0.0 { (max / min).sqrt() } else { f64::INFINITY };
        (rank, condition, eig)
    }

    /// Unconstrained fit at `degree`; the minimum-norm solution when the
    /// system is rank deficient.
    pub fn solve(&self, degree: u32) -> Fit {
        let c = self.basis.columns(degree);
        let g = self.gram.view((0, 0), (c, c)).into_owned();
        let rhs = self.rhs.rows(0, c).into_owned();
        let (rank, condition, eig) = Self::spectrum(&g);
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut coeffs = DVector::zeros(c);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > GRAM_RANK_TOL * max {
                let v = eig.eigenvectors.column(k);
                coeffs += v * (v.dot(&rhs) / lam);
            }
        }
        Fit { degree, polynomial: self.basis.to_polynomial(coeffs.as_slice()), rank, columns: c, condition }
    }

    /// Fit at `degree` subject to exact interpolation constraints
    /// `b(x_k) = values_k`, via the KKT system.
    pub fn solve_constrained(&self, degree: u32, points: &[Vec<f64>], values: &[f64]) -> Fit {
        let c = self.basis.columns(degree);
        let k = points.len();
        let mut kkt = DMatrix::zeros(c + k, c + k);
        kkt.view_mut((0, 0), (c, c)).copy_from(&self.gram.view((0, 0), (c, c)));
        for (r, x) in points.iter().enumerate() {
            let row = self.basis.row(x);
            for j in 0..c {
                kkt[(c + r, j)] = row[j];
                kkt[(j, c + r)] = row[j];
            }
        }
        let mut rhs = DVector::zeros(c + k);
        rhs.rows_mut(0, c).copy_from(&self.rhs.rows(0, c));
        for (r, v) in values.iter().enumerate() {
            rhs[c + r] = *v;
        }
        let g = self.gram.view((0, 0), (c, c)).into_owned();
        let (rank, condition, _) = Self::spectrum(&g);
        let svd = kkt.svd(true, true);
        let sol = svd.solve(&rhs, 1e-13 * svd.singular_values.max()).unwrap_or_else(|_| DVector::zeros(c + k));
        Fit { degree, polynomial: self.basis.to_polynomial(&sol.as_slice()[..c]), rank, columns: c, condition }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials() {
        let pts: Vec<Vec<f64>> = (0..=40).map(|i| vec![-2.0 + 0.1 * i as f64]).collect();
        let target: Vec<f64> = pts.iter().map(|x| 3.0 * x[0].powi(3) - x[0] + 0.5).collect();
        let basis = ChebyshevBasis::new(&[[-2.0, 2.0]], 6);
        let ls = LeastSquares::new(&basis, &pts, &target);
        let fit = ls.solve(3);
        assert_eq!(fit.rank, 4);
        let expect = Polynomial::from_terms(1, [(vec![3], 3.0), (vec![1], -1.0), (vec![0], 0.5)]).unwrap();
        assert!(fit.polynomial.max_coeff_distance(&expect) < 1e-10);
    }

    #[test]
    fn constrained_interpolates() {
        let pts: Vec<Vec<f64>> = (0..=20).map(|i| vec![0.05 * i as f64]).collect();
        let target: Vec<f64> = pts.iter().map(|x| x[0]).collect();
        let basis = ChebyshevBasis::new(&[[0.0, 1.0]], 5);
        let ls = LeastSquares::new(&basis, &pts, &target);
        let fit = ls.solve_constrained(3, &[vec![0.2], vec![0.9]], &[0.0, 1.0]);
        assert!(fit.polynomial.eval(&[0.2]).unwrap().abs() < 1e-10);
        assert!((fit.polynomial.eval(&[0.9]).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rank_deficiency_visible() {
        // points on a line in the plane: X2 column is constant
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 9.0, 0.5]).collect();
        let basis = ChebyshevBasis::new(&[[0.0, 1.0], [0.0, 1.0]], 2);
        let ls = LeastSquares::new(&basis, &pts, &[1.0; 10]);
        let fit = ls.solve(1);
        assert_eq!(fit.columns, 3);
        assert_eq!(fit.rank, 2);
        assert!(fit.condition.is_infinite() || fit.condition > 1e6);
    }
}
