#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use starprod_core::algebra::{ratio, CoeffElement, Poly, Rational, Var, VarMonomial};
use starprod_core::star::PropagatorMatrix;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_rational(rng: &mut TestRng) -> Rational {
    ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

pub fn rand_nonzero_rational(rng: &mut TestRng) -> Rational {
    loop {
        let r = rand_rational(rng);
        if r != Rational::from_integer(0.into()) {
            return r;
        }
    }
}

fn monomial(exps: &[u32]) -> VarMonomial {
    VarMonomial::from_exponents(exps.iter().enumerate().map(|(i, &e)| (Var::new(0, i as u32 + 1), e)))
}

/// Up to `max_terms` terms of total degree at most `max_deg`.
pub fn rand_poly(rng: &mut TestRng, d: u32, max_deg: u32, max_terms: usize) -> Poly {
    let count = rng.gen_range(1..=max_terms);
    let mut terms = Vec::new();
    for _ in 0..count {
        let total = rng.gen_range(0..=max_deg);
        let mut exps = vec![0u32; d as usize];
        for _ in 0..total {
            exps[rng.gen_range(0..d as usize)] += 1;
        }
        terms.push((monomial(&exps), CoeffElement::from_rational(rand_nonzero_rational(rng))));
    }
    Poly::from_terms(d, terms).unwrap()
}

pub fn rand_rows(rng: &mut TestRng, d: u32, symmetric: bool) -> Vec<Vec<Rational>> {
    let mut rows = vec![vec![Rational::from_integer(0.into()); d as usize]; d as usize];
    for i in 0..d as usize {
        for j in 0..d as usize {
            if symmetric && j < i {
                rows[i][j] = rows[j][i].clone();
            } else {
                rows[i][j] = rand_rational(rng);
            }
        }
    }
    rows
}

pub fn rand_kernel(rng: &mut TestRng, d: u32, symmetric: bool) -> PropagatorMatrix {
    PropagatorMatrix::from_rationals(&rand_rows(rng, d, symmetric)).unwrap()
}

/// Polynomials in `d` variables with up to four terms of degree at most
/// `max_deg`.
pub fn poly_strategy(d: u32, max_deg: u32) -> impl Strategy<Value = Poly> {
    let term = (prop::collection::vec(0..=max_deg, d as usize), -6i64..=6, 1i64..=5);
    prop::collection::vec(term, 1..=4).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .filter(|(exps, _, _)| exps.iter().sum::<u32>() <= max_deg)
            .map(|(exps, n, q)| (monomial(&exps), CoeffElement::from_rational(ratio(n, q))));
        Poly::from_terms(d, terms).unwrap()
    })
}

/// Numeric `d x d` propagators.
pub fn kernel_strategy(d: u32, symmetric: bool) -> impl Strategy<Value = PropagatorMatrix> {
    prop::collection::vec((-6i64..=6, 1i64..=5), (d * d) as usize).prop_map(move |entries| {
        let mut rows: Vec<Vec<Rational>> =
            entries.chunks(d as usize).map(|r| r.iter().map(|&(n, q)| ratio(n, q)).collect()).collect();
        if symmetric {
            for i in 0..d as usize {
                for j in 0..i {
                    rows[i][j] = rows[j][i].clone();
                }
            }
        }
        PropagatorMatrix::from_rationals(&rows).unwrap()
    })
}

pub fn x(d: u32, i: u32) -> Poly {
    Poly::var(d, i).unwrap()
}
