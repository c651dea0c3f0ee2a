use proptest::prelude::*;
use starprod::expr::{parse, Context};
use starprod::formats::{FeynmanJson, GraphJson, Grid, GridJson};
use starprod_core::algebra::{ratio, CoeffElement, CoeffMonomial, Poly, PropagatorSymbol, Rational, Var, VarMonomial};
use starprod_core::combinat::AdjacencyMatrix;
use starprod_core::fields::KernelGrid;
use starprod_core::graphs::{graph_from_matrix, to_feynman};

const FAMILIES: [&str; 3] = ["K", "L", "prop_2"];

fn symbol_strategy(d: u32) -> impl Strategy<Value = (PropagatorSymbol, u32)> {
    (0..FAMILIES.len(), 1..=d, 1..=d, 1u32..=2).prop_map(|(f, i, j, e)| (PropagatorSymbol::new(FAMILIES[f], i, j), e))
}

fn poly_strategy(d: u32) -> impl Strategy<Value = Poly> {
    let term = (
        prop::collection::vec(0u32..=3, d as usize),
        0u32..=3,
        prop::collection::vec(symbol_strategy(d), 0..=2),
        -20i64..=20,
        1i64..=7,
    );
    prop::collection::vec(term, 0..=5).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(exps, hbar, symbols, num, den)| {
            let vars =
                VarMonomial::from_exponents(exps.iter().enumerate().map(|(i, &e)| (Var::new(0, i as u32 + 1), e)));
            let coeff = CoeffElement::from_term(CoeffMonomial::from_parts(hbar, symbols), ratio(num, den));
            (vars, coeff)
        });
        Poly::from_terms(d, terms).unwrap()
    })
}

fn reparse(p: &Poly) -> Poly {
    parse(&p.to_string()).unwrap().to_poly(&Context::new(p.dim())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(p in poly_strategy(3)) {
        let text = p.to_string();
        let back = reparse(&p);
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn parsed_arithmetic_matches_poly_arithmetic(p in poly_strategy(2), q in poly_strategy(2), e in 0u32..=3) {
        let text = format!("({p}) * ({q}) - ({q})^{e}");
        let parsed = parse(&text).unwrap().to_poly(&Context::new(2)).unwrap();
        prop_assert_eq!(parsed, &(&p * &q) - &q.pow(e));
    }

    #[test]
    fn graph_json_round_trip(entries in prop::collection::vec(0u32..=3, 6)) {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let matrix = AdjacencyMatrix::from_pairs(4, pairs.iter().zip(&entries).map(|(&(i, j), &v)| (i, j, v))).unwrap();
        let g = graph_from_matrix(matrix, 4).unwrap();
        let text = serde_json::to_string(&GraphJson::from_graph(&g)).unwrap();
        prop_assert_eq!(serde_json::from_str::<GraphJson>(&text).unwrap().to_graph().unwrap(), g.clone());

        let f = to_feynman(&g);
        let text = serde_json::to_string(&FeynmanJson::from_graph(&f)).unwrap();
        prop_assert_eq!(serde_json::from_str::<FeynmanJson>(&text).unwrap().to_graph().unwrap(), f);
    }

    #[test]
    fn rational_grid_round_trip(values in prop::collection::vec((-9i64..=9, 1i64..=9), 7)) {
        let q: Vec<Rational> = values.iter().map(|&(n, d)| ratio(n, d)).collect();
        let grid = Grid::Rational(
            KernelGrid::new(
                vec!["p".into(), "q".into()],
                vec![q[0..2].to_vec(), q[2..4].to_vec()],
                q[4..6].to_vec(),
                q[6].clone(),
            )
            .unwrap(),
        );
        let text = serde_json::to_string(&GridJson::from_grid(&grid)).unwrap();
        prop_assert!(text.contains("\"mode\":\"rational\""));
        prop_assert_eq!(serde_json::from_str::<GridJson>(&text).unwrap().to_grid().unwrap(), grid);
    }
}

#[test]
fn canonical_examples_round_trip() {
    for text in ["x1*x2 + hbar*K[K;1,2]", "x1^2 + 2*x1 + 1", "-3/2*hbar^2 + K[K;1,2] - K[K;2,1]", "0", "-1"] {
        let p = parse(text).unwrap().to_poly(&Context::new(2)).unwrap();
        assert_eq!(p.to_string(), text);
    }
}

#[test]
fn symmetric_context_round_trip() {
    let ctx = Context::new(3).with_symmetric(["K"]);
    let p = parse("K[K;3,1]*x1 + K[K;1,3]*x2").unwrap().to_poly(&ctx).unwrap();
    assert_eq!(p.to_string(), "K[K;1,3]*x1 + K[K;1,3]*x2");
    assert_eq!(parse(&p.to_string()).unwrap().to_poly(&ctx).unwrap(), p);
}
