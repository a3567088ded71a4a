use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MomentFunctional;
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};

/// Size cap on the enumerated dyadic net.
const NET_MONOMIALS: usize = 5;
const NET_VALUES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HankelVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Eigenvalues at or above `-threshold` count as nonnegative.
    pub threshold: f64,
    /// On failure, `h` with `L(h^2) = min_eigenvalue < 0` (unit coefficient
    /// vector).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_value: Option<f64>,
}

/// Flips the sign so the largest-magnitude coefficient is positive; first
/// such coefficient wins ties.
fn canonical_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best.abs() + 1e-12 {
            best = x;
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Positive-semidefiniteness of `h -> L(h^2)` via the moment matrix
/// `M[s, t] = L(X^{s+t})`, `|s|, |t| <= D/2`.
pub fn hankel_psd_check(l: &MomentFunctional, tol: f64) -> Result<HankelVerdict> {
    if l.degree() < 2 {
        return Err(Error::InvalidArgument(format!("moment matrix needs D >= 2, got D = {}", l.degree())));
    }
    let basis = Monomial::all_up_to(l.n(), l.degree() / 2);
    let k = basis.len();
    let m = DMatrix::from_fn(k, k, |i, j| l.get(&basis[i].mul(&basis[j])).expect("complete to degree D"));
    let max_entry = m.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let eig = m.symmetric_eigen();
    let (imin, min_eigenvalue) =
        eig.eigenvalues.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty basis");
    let threshold = tol * (1.0 + max_entry);
    if min_eigenvalue >= -threshold {
        return Ok(HankelVerdict { psd: true, min_eigenvalue, threshold, witness: None, witness_value: None });
    }
    let mut v: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    canonical_sign(&mut v);
    // clean float dust so exact witnesses print exactly
    for x in v.iter_mut() {
        if x.abs() < 1e-14 {
            *x = 0.0;
        }
    }
    let h = Polynomial::from_dense(l.n(), &basis, &v);
    let value = l.apply(&h.pow(2))?;
    Ok(HankelVerdict { psd: false, min_eigenvalue, threshold, witness: Some(h), witness_value: Some(value) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerOutcome {
    /// No tested `h` gave a negative value. Not a proof of positivity.
    PsdConsistent,
    /// Some `h` has `L(h^{2d}) < 0`; conclusive.
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerVerdict {
    pub outcome: PowerOutcome,
    pub tested: usize,
    /// Degree of the tested `h`.
    pub h_degree: u32,
    /// Smallest `L(h^{2d}) / |h|_2^{2d}` seen.
    pub worst_value: f64,
    /// The `h` attaining `worst_value`.
    pub worst_h: Polynomial,
    pub threshold: f64,
}

/// One-sided test of `L(h^{2d}) >= 0` over a seeded random sample of `h`
/// together with a small dyadic net. Only a counterexample is conclusive.
pub fn power_psd_check(l: &MomentFunctional, d: u32, trials: usize, seed: u64, tol: f64) -> Result<PowerVerdict> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let h_degree = l.degree() / (2 * d);
    if h_degree == 0 {
        return Err(Error::DegreeBudget { degree: l.degree(), d });
    }
    let n = l.n();
    let basis = Monomial::all_up_to(n, h_degree);
    let threshold = tol * (1.0 + l.max_abs());

    let mut worst = (f64::INFINITY, Vec::new());
    let mut tested = 0usize;
    let mut consider = |coeffs: Vec<f64>| -> Result<()> {
        let norm2: f64 = coeffs.iter().map(|c| c * c).sum();
        if norm2 == 0.0 {
            return Ok(());
        }
        let h = Polynomial::from_dense(n, &basis, &coeffs);
        let v = l.apply(&h.pow(2 * d))? / norm2.powi(d as i32);
        tested += 1;
        if v < worst.0 {
            worst = (v, coeffs);
        }
        Ok(())
    };

    // dyadic net on the leading monomials (graded order)
    let net_len = basis.len().min(NET_MONOMIALS);
    let total = NET_VALUES.len().pow(net_len as u32);
    for mut code in 0..total {
        let mut coeffs = vec![0.0; basis.len()];
        for c in coeffs.iter_mut().take(net_len) {
            *c = NET_VALUES[code % NET_VALUES.len()];
            code /= NET_VALUES.len();
        }
        consider(coeffs)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let coeffs: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        consider(coeffs)?;
    }

    let (worst_value, mut coeffs) = worst;
    canonical_sign(&mut coeffs);
    let outcome = if worst_value < -threshold { PowerOutcome::Counterexample } else { PowerOutcome::PsdConsistent };
    Ok(PowerVerdict {
        outcome,
        tested,
        h_degree,
        worst_value,
        worst_h: Polynomial::from_dense(n, &basis, &coeffs),
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{from_measure, MeasureSpec};

    fn indefinite() -> MomentFunctional {
        MomentFunctional::from_values(1, 2, &[1.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn dirac_is_psd() {
        let l = from_measure(&MeasureSpec::Atomic { atoms: vec![vec![0.0]], weights: vec![1.0] }, 4).unwrap();
        let v = hankel_psd_check(&l, 1e-9).unwrap();
        assert!(v.psd);
        assert!(v.min_eigenvalue.abs() < 1e-15);
    }

    #[test]
    fn indefinite_witness_is_x() {
        let v = hankel_psd_check(&indefinite(), 1e-9).unwrap();
        assert!(!v.psd);
        assert_eq!(v.witness.unwrap(), Polynomial::var(1, 0).to_float());
        assert_eq!(v.witness_value, Some(-1.0));
    }

    #[test]
    fn uniform_hankel() {
        let l = from_measure(&MeasureSpec::Uniform { bounds: vec![[-1.0, 1.0]] }, 8).unwrap();
        let v = hankel_psd_check(&l, 1e-9).unwrap();
        assert!(v.psd);
        // oracle: the 5x5 Hilbert-type matrix of (1, 0, 1/3, ..., 1/9)
        let mom = |k: usize| if k % 2 == 1 { 0.0 } else { 1.0 / (k as f64 + 1.0) };
        let m = DMatrix::from_fn(5, 5, |i, j| mom(i + j));
        let chol = m.cholesky();
        assert!(chol.is_some());
        assert!(v.min_eigenvalue > 0.0);
    }

    #[test]
    fn power_check_on_measures() {
        let mu = MeasureSpec::Atomic { atoms: vec![vec![0.3, -1.2], vec![2.0, 0.5]], weights: vec![0.25, 2.0] };
        let l = from_measure(&mu, 8).unwrap();
        for d in [1, 2] {
            let v = power_psd_check(&l, d, 200, 7, 1e-9).unwrap();
            assert_eq!(v.outcome, PowerOutcome::PsdConsistent);
        }
    }

    #[test]
    fn power_counterexample() {
        let l = MomentFunctional::from_values(1, 4, &[1.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        let v = power_psd_check(&l, 2, 100, 1, 1e-9).unwrap();
        assert_eq!(v.outcome, PowerOutcome::Counterexample);
        assert_eq!(v.worst_h, Polynomial::var(1, 0).to_float());
        assert_eq!(v.worst_value, -1.0);
    }

    #[test]
    fn degree_budget() {
        let l = MomentFunctional::from_values(1, 3, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(power_psd_check(&l, 2, 10, 0, 1e-9), Err(Error::DegreeBudget { degree: 3, d: 2 })));
    }

    #[test]
    fn deterministic_for_seed() {
        let l = MomentFunctional::from_values(1, 4, &[1.0, 0.2, 0.5, 0.1, 0.4]).unwrap();
        let a = power_psd_check(&l, 1, 50, 99, 1e-9).unwrap();
        let b = power_psd_check(&l, 1, 50, 99, 1e-9).unwrap();
        assert_eq!(a, b);
    }
}
