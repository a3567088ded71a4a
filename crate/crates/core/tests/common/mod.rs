#![allow(dead_code)]

use cone2d::{Dyadic, Monomial, Polynomial};
use rand::Rng;

/// Random polynomial with dyadic coefficients `k / 2^e`, `|k| <= 16`,
/// `e <= 4`, on roughly half of the monomials of degree `<= degree`.
pub fn dyadic_poly(rng: &mut impl Rng, n: usize, degree: u32) -> Polynomial {
    let mut terms: Vec<(Vec<u32>, Dyadic)> = Vec::new();
    for m in Monomial::all_up_to(n, degree) {
        if rng.gen_bool(0.5) {
            terms.push((m.exponents().to_vec(), Dyadic::new(rng.gen_range(-16i64..=16), rng.gen_range(0..=4))));
        }
    }
    Polynomial::from_terms(n, terms).unwrap()
}

/// Random float polynomial with coefficients in `[-1, 1]`.
pub fn float_poly(rng: &mut impl Rng, n: usize, degree: u32) -> Polynomial {
    let terms: Vec<(Vec<u32>, f64)> = Monomial::all_up_to(n, degree)
        .into_iter()
        .map(|m| (m.exponents().to_vec(), rng.gen_range(-1.0..1.0)))
        .collect();
    Polynomial::from_terms(n, terms).unwrap()
}

pub fn point(rng: &mut impl Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..r)).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
