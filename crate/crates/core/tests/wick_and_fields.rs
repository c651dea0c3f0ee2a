mod common;

use common::{rand_poly, rand_rows, rng, x, TestRng};
use proptest::prelude::*;
use rand::Rng;
use starprod_core::algebra::{ratio, rational, CoeffElement, Poly, PropagatorSymbol, Rational};
use starprod_core::combinat::{is_admissible, IntSequence};
use starprod_core::fields::{
    field_expectation, field_poisson, field_star, field_star_direct, field_wick_power, specialize, FamilyBindings,
    KernelGrid,
};
use starprod_core::star::{change_propagator, star2, star_multi, PropagatorMatrix, TruncationOrder};
use starprod_core::wick::{
    expectation_formula, expectation_oracle, oracle_bridge_factor, wick_power, wick_unpower, WickMonomialSpec,
};

fn positive_sequences(max_len: usize, max_sum: u32) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, left: u32, max_len: usize, out: &mut Vec<Vec<u32>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() < max_len {
            for v in 1..=left {
                prefix.push(v);
                extend(prefix, left - v, max_len, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), max_sum, max_len, &mut out);
    out
}

#[test]
fn derivative_rule() {
    let k = PropagatorMatrix::symbolic("K", 2, true);
    for n in 1..=10 {
        let lhs = wick_power(2, n, &k).unwrap().partial_derivative(0, 2).unwrap();
        let rhs = wick_power(2, n - 1, &k).unwrap().scale_rational(&rational(n as i64));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn hermite_recurrence() {
    let k = PropagatorMatrix::symbolic("K", 1, true);
    let h_kii = &CoeffElement::hbar_pow(1) * k.entry(1, 1);
    for l in 1..=9u32 {
        let next = wick_power(1, l + 1, &k).unwrap();
        let rhs = &(&x(1, 1) * &wick_power(1, l, &k).unwrap())
            + &wick_power(1, l - 1, &k).unwrap().scale(&h_kii.scale(&rational(l as i64)));
        assert_eq!(next, rhs);
    }
}

#[test]
fn inversion_round_trip_in_several_variables() {
    let k = PropagatorMatrix::symbolic("K", 3, false);
    for i in 1..=3 {
        for l in 0..=10 {
            assert_eq!(wick_unpower(i, l, &k).unwrap().resubstitute(&k).unwrap(), x(3, i).pow(l));
        }
    }
}

#[test]
fn expectation_vanishes_exactly_when_inadmissible() {
    for n in positive_sequences(5, 10) {
        let spec = WickMonomialSpec::new(n.clone(), "K", "L");
        let admissible = is_admissible(&IntSequence::new(n.clone()).unwrap());
        assert_eq!(!expectation_formula(&spec).is_zero(), admissible, "{n:?}");
    }
}

#[test]
fn oracle_bridge_small() {
    for n in positive_sequences(3, 6) {
        let spec = WickMonomialSpec::new(n.clone(), "K", "L").with_zero_diagonal_ordering();
        let oracle = expectation_oracle(&spec).unwrap();
        let formula = expectation_formula(&spec).scale(&oracle_bridge_factor(&n));
        assert_eq!(oracle.value, formula, "{n:?}");
    }
}

fn grid_from(rng: &mut TestRng, d: u32, symmetric: bool) -> KernelGrid<Rational> {
    let field = (0..d).map(|_| common::rand_rational(rng)).collect();
    let grid = KernelGrid::unlabelled(rand_rows(rng, d, symmetric), field, common::rand_rational(rng)).unwrap();
    if symmetric {
        grid.into_symmetric().unwrap()
    } else {
        grid
    }
}

#[test]
fn field_wick_theorem() {
    // the change-of-propagator expansion, specialized with two kernels,
    // reproduces the field product under the first kernel
    let mut r = rng(7);
    for _ in 0..20 {
        let d = r.gen_range(1..=3);
        let grid = grid_from(&mut r, d, false);
        let second = rand_rows(&mut r, d, true);
        let f = rand_poly(&mut r, d, 3, 3);
        let g = rand_poly(&mut r, d, 3, 3);
        let order = TruncationOrder::new(3);
        let k = PropagatorMatrix::symbolic("K", d, false);
        let kp = PropagatorMatrix::symbolic("L", d, false);
        let change = change_propagator(&[f.clone(), g.clone()], &k, &kp, order).unwrap();
        let reexpanded = change.reexpand(&[f.clone(), g.clone()], &kp).unwrap();
        let bindings = grid.bindings("K").with("L", second);
        let value = specialize(&reexpanded, &grid, &bindings).unwrap();
        assert_eq!(value, field_star(&f, &g, &grid, order).unwrap());
    }
}

#[test]
fn symmetric_kernels_and_poisson() {
    let mut r = rng(11);
    for _ in 0..20 {
        let d = r.gen_range(2..=4);
        let grid = grid_from(&mut r, d, true);
        let f = rand_poly(&mut r, d, 3, 3);
        let g = rand_poly(&mut r, d, 3, 3);
        let order = TruncationOrder::new(3);
        assert_eq!(field_star(&f, &g, &grid, order).unwrap(), field_star(&g, &f, &grid, order).unwrap());
        assert_eq!(field_poisson(&f, &g, &grid).unwrap(), rational(0));
    }
    let asym = KernelGrid::unlabelled(
        vec![vec![rational(0), rational(1)], vec![rational(2), rational(0)]],
        vec![rational(1), rational(1)],
        rational(1),
    )
    .unwrap();
    assert_ne!(field_poisson(&x(2, 1), &x(2, 2), &asym).unwrap(), rational(0));
}

#[test]
fn field_wick_power_matches_symbolic() {
    let mut r = rng(3);
    for _ in 0..10 {
        let d = r.gen_range(1..=3);
        let grid = grid_from(&mut r, d, true);
        let k = grid.propagator("K");
        for i in 1..=d {
            for l in 0..=8 {
                let symbolic = specialize(&wick_power(i, l, &k).unwrap(), &grid, &grid.bindings("K")).unwrap();
                assert_eq!(field_wick_power(i, l, &grid).unwrap(), symbolic);
            }
        }
    }
}

#[test]
fn field_expectation_single_matrix() {
    let grid = KernelGrid::unlabelled(
        vec![
            vec![rational(0), ratio(1, 2), rational(2)],
            vec![ratio(1, 2), rational(0), rational(3)],
            vec![rational(2), rational(3), rational(0)],
        ],
        vec![rational(0); 3],
        rational(1),
    )
    .unwrap();
    let n = IntSequence::new(vec![2, 1, 1]).unwrap();
    // matrices with row sums (2,1,1): only m_12 = m_13 = 1
    assert_eq!(field_expectation(&n, &grid).unwrap(), ratio(1, 2) * rational(2));
}

#[test]
fn multi_family_bindings() {
    let p = Poly::constant(
        2,
        &CoeffElement::symbol(PropagatorSymbol::new("A", 1, 2))
            * &CoeffElement::symbol(PropagatorSymbol::new("B", 2, 2)),
    );
    let grid = KernelGrid::unlabelled(vec![vec![rational(1); 2]; 2], vec![rational(0); 2], rational(1)).unwrap();
    let bindings = FamilyBindings::new()
        .with("A", vec![vec![rational(0), rational(3)], vec![rational(0), rational(0)]])
        .with("B", vec![vec![rational(0), rational(0)], vec![rational(0), rational(5)]]);
    assert_eq!(specialize(&p, &grid, &bindings).unwrap(), rational(15));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wick_power_is_star_power_in_any_slot(l in 0u32..=7, i in 1u32..=3) {
        let k = PropagatorMatrix::symbolic("K", 3, false);
        let power = if l == 0 {
            Poly::one(3)
        } else {
            star_multi(&vec![x(3, i); l as usize], &k, TruncationOrder::new(l)).unwrap()
        };
        prop_assert_eq!(power, wick_power(i, l, &k).unwrap());
    }

    #[test]
    fn float_and_rational_modes_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.gen_range(1..=3);
        let grid = grid_from(&mut r, d, false);
        let f = rand_poly(&mut r, d, 3, 3);
        let g = rand_poly(&mut r, d, 3, 3);
        let order = TruncationOrder::new(3);
        let exact = field_star(&f, &g, &grid, order).unwrap();
        let to_f = |q: &Rational| num_traits::ToPrimitive::to_f64(q).unwrap();
        let float_grid = KernelGrid::unlabelled(
            grid.kernel().iter().map(|row| row.iter().map(to_f).collect()).collect(),
            grid.field().iter().map(to_f).collect(),
            to_f(grid.hbar()),
        ).unwrap();
        let approx = field_star_direct(&f, &g, &float_grid, order).unwrap();
        let reference = to_f(&exact);
        prop_assert!((approx - reference).abs() <= 1e-12 * reference.abs().max(1.0));
    }
}

#[test]
fn exact_grid_paths_agree() {
    let mut r = rng(5);
    for _ in 0..30 {
        let d = r.gen_range(1..=4);
        let grid = grid_from(&mut r, d, false);
        let f = rand_poly(&mut r, d, 3, 3);
        let g = rand_poly(&mut r, d, 3, 3);
        let order = TruncationOrder::new(r.gen_range(0..=3));
        let numeric_k = PropagatorMatrix::from_rationals(grid.kernel()).unwrap();
        let numeric = specialize(&star2(&f, &g, &numeric_k, order).unwrap(), &grid, &FamilyBindings::new()).unwrap();
        assert_eq!(field_star(&f, &g, &grid, order).unwrap(), numeric);
        assert_eq!(field_star_direct(&f, &g, &grid, order).unwrap(), numeric);
    }
}
