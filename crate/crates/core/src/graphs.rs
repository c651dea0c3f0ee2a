//! Graphs of Bernoulli type, their operators, and Feynman multigraphs.
//!
//! A Bernoulli-type graph on `m` boundary vertices is a product of copies of
//! the basic graph `b_ij` (one internal vertex with edges to boundary vertices
//! `i < j`), so it is determined by an adjacency matrix. Boundary vertices are
//! 0-based in this API.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_rational::BigRational;

use crate::algebra::{CoeffElement, Poly};
use crate::combinat::{enumerate_adjacency_by_degree, AdjacencyMatrix};
use crate::star::{apply_bivector, inverse_factorial, tensor_factors, PropagatorMatrix, TruncationOrder};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BernoulliGraph {
    matrix: AdjacencyMatrix,
}

impl BernoulliGraph {
    /// The graph with no internal vertices.
    pub fn empty(boundary_count: usize) -> Self {
        BernoulliGraph { matrix: AdjacencyMatrix::zero(boundary_count) }
    }

    /// `b_1`: two boundary vertices joined through one internal vertex.
    pub fn basic() -> Self {
        Self::pair(2, 0, 1).expect("valid pair")
    }

    /// `b_ij` among `boundary_count` boundary vertices.
    pub fn pair(boundary_count: usize, i: usize, j: usize) -> Result<Self> {
        Ok(BernoulliGraph { matrix: AdjacencyMatrix::from_pairs(boundary_count, [(i, j, 1)])? })
    }

    pub fn matrix(&self) -> &AdjacencyMatrix {
        &self.matrix
    }

    pub fn boundary_count(&self) -> usize {
        self.matrix.size()
    }

    pub fn internal_count(&self) -> usize {
        self.matrix.degree() as usize / 2
    }

    /// Target pairs of the internal vertices, in canonical (sorted) order.
    pub fn internal_targets(&self) -> Vec<(usize, usize)> {
        self.matrix.upper_entries().flat_map(|(i, j, v)| core::iter::repeat_n((i, j), v as usize)).collect()
    }

    pub fn edge_count(&self) -> usize {
        2 * self.internal_count()
    }
}

/// `b_M` for an adjacency matrix on `boundary_count` vertices.
pub fn graph_from_matrix(matrix: AdjacencyMatrix, boundary_count: usize) -> Result<BernoulliGraph> {
    if matrix.size() != boundary_count {
        return Err(Error::BoundaryMismatch { left: matrix.size(), right: boundary_count });
    }
    Ok(BernoulliGraph { matrix })
}

/// Identifies boundary vertices: `b_M1 * b_M2 = b_(M1 + M2)`.
pub fn graph_product(g1: &BernoulliGraph, g2: &BernoulliGraph) -> Result<BernoulliGraph> {
    Ok(BernoulliGraph { matrix: g1.matrix.checked_add(&g2.matrix)? })
}

/// Relocates boundary vertex `a` to `positions[a]` among `new_boundary`
/// vertices. Positions are 0-based and strictly increasing.
pub fn embed_graph(g: &BernoulliGraph, positions: &[usize], new_boundary: usize) -> Result<BernoulliGraph> {
    if positions.len() != g.boundary_count() {
        return Err(Error::LengthMismatch { expected: g.boundary_count(), found: positions.len() });
    }
    let increasing = positions.windows(2).all(|w| w[0] < w[1]);
    if !increasing || positions.last().is_some_and(|&p| p >= new_boundary) {
        return Err(Error::InvalidPositions { bound: new_boundary });
    }
    let pairs = g.matrix.upper_entries().map(|(i, j, v)| (positions[i], positions[j], v));
    Ok(BernoulliGraph { matrix: AdjacencyMatrix::from_pairs(new_boundary, pairs)? })
}

/// Applies `prod_(i<j) K_ij^(m_ij)` to `f_1 (x) ... (x) f_m` and multiplies out.
pub fn kontsevich_apply(g: &BernoulliGraph, fs: &[Poly], k: &PropagatorMatrix) -> Result<Poly> {
    if fs.len() != g.boundary_count() {
        return Err(Error::LengthMismatch { expected: g.boundary_count(), found: fs.len() });
    }
    let mut tensor = tensor_factors(fs, k)?;
    for (i, j, v) in g.matrix.upper_entries() {
        let pair = [(BTreeSet::from([i as u32 + 1]), BTreeSet::from([j as u32 + 1]))];
        for _ in 0..v {
            if tensor.is_zero() {
                return Ok(tensor);
            }
            tensor = apply_bivector(&tensor, &pair, k)?;
        }
    }
    Ok(tensor.merge_blocks())
}

/// `sum_(k<=N) hbar^k/k! sum_(deg M = 2k) multinomial(M) U(b_M)(f_1, ..., f_m)`.
pub fn star_via_graphs(fs: &[Poly], k: &PropagatorMatrix, order: TruncationOrder) -> Result<Poly> {
    let first = fs.first().ok_or(Error::EmptySequence)?;
    let n = order.max_hbar_power();
    let degrees: Vec<u32> = fs.iter().map(Poly::degree).collect();
    let degree_sum: u32 = degrees.iter().sum();
    let mut total = Poly::zero(first.dim());
    for step in 0..=n.min(degree_sum / 2) {
        let mut layer = Poly::zero(first.dim());
        for matrix in enumerate_adjacency_by_degree(fs.len(), 2 * step)? {
            if matrix.row_sums().iter().zip(&degrees).any(|(r, d)| r > d) {
                continue;
            }
            let weight = BigRational::from_integer(matrix.multinomial().into());
            let term = kontsevich_apply(&BernoulliGraph { matrix }, fs, k)?;
            layer = &layer + &term.scale_rational(&weight);
        }
        let scale = CoeffElement::hbar_pow(step).scale(&inverse_factorial(step));
        total = &total + &layer.scale(&scale);
    }
    Ok(total.truncate_hbar(n))
}

/// A loop-free multigraph is the Feynman picture of a Bernoulli-type graph;
/// self-loops may be recorded but cannot be converted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeynmanGraph {
    vertex_count: usize,
    edges: BTreeMap<(usize, usize), u32>,
}

impl FeynmanGraph {
    pub fn new(vertex_count: usize) -> Self {
        FeynmanGraph { vertex_count, edges: BTreeMap::new() }
    }

    /// Adds `multiplicity` copies of the undirected edge `{i, j}`.
    pub fn add_edge(&mut self, i: usize, j: usize, multiplicity: u32) -> Result<()> {
        for v in [i, j] {
            if v >= self.vertex_count {
                return Err(Error::VertexOutOfRange { vertex: v, count: self.vertex_count });
            }
        }
        if multiplicity > 0 {
            *self.edges.entry((i.min(j), i.max(j))).or_insert(0) += multiplicity;
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// `(i, j, multiplicity)` with `i <= j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(i, j), &m)| (i, j, m))
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.values().sum()
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.keys().any(|&(i, j)| i == j)
    }
}

/// Each internal vertex of `b_ij` becomes an edge `{i, j}`.
pub fn to_feynman(g: &BernoulliGraph) -> FeynmanGraph {
    let mut out = FeynmanGraph::new(g.boundary_count());
    for (i, j, v) in g.matrix.upper_entries() {
        out.edges.insert((i, j), v);
    }
    out
}

pub fn from_feynman(g: &FeynmanGraph) -> Result<BernoulliGraph> {
    if let Some(&(v, _)) = g.edges.keys().find(|&&(i, j)| i == j) {
        return Err(Error::SelfLoop { vertex: v });
    }
    Ok(BernoulliGraph { matrix: AdjacencyMatrix::from_pairs(g.vertex_count, g.edges())? })
}

/// Undirected DOT multigraph; vertices are labelled from 1 and each copy of
/// an edge is its own statement.
pub fn feynman_dot(g: &FeynmanGraph) -> String {
    let mut out = String::from("graph feynman {\n");
    for v in 1..=g.vertex_count {
        let _ = writeln!(out, "  v{v};");
    }
    for (i, j, m) in g.edges() {
        for _ in 0..m {
            let _ = writeln!(out, "  v{} -- v{};", i + 1, j + 1);
        }
    }
    out.push_str("}\n");
    out
}

/// Bipartite DOT digraph: boxed internal vertices with a left edge to `i` and
/// a right edge to `j`.
pub fn bernoulli_dot(g: &BernoulliGraph) -> String {
    let mut out = String::from("digraph bernoulli {\n");
    for v in 1..=g.boundary_count() {
        let _ = writeln!(out, "  b{v} [shape=circle];");
    }
    for (w, (i, j)) in g.internal_targets().into_iter().enumerate() {
        let w = w + 1;
        let _ = writeln!(out, "  w{w} [shape=box];");
        let _ = writeln!(out, "  w{w} -> b{} [label=\"L\"];", i + 1);
        let _ = writeln!(out, "  w{w} -> b{} [label=\"R\"];", j + 1);
    }
    out.push_str("}\n");
    out
}

/// Canonical label used by the text output of graph commands.
pub fn describe(g: &BernoulliGraph) -> String {
    let factors: Vec<String> = g
        .matrix
        .upper_entries()
        .map(|(i, j, v)| if v == 1 { format!("b{}{}", i + 1, j + 1) } else { format!("b{}{}^{v}", i + 1, j + 1) })
        .collect();
    if factors.is_empty() {
        String::from("b0")
    } else {
        factors.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, PropagatorSymbol};
    use crate::star::star_multi;
    use alloc::vec;

    fn x(dim: u32, i: u32) -> Poly {
        Poly::var(dim, i).unwrap()
    }

    fn sym(i: u32, j: u32) -> CoeffElement {
        CoeffElement::symbol(PropagatorSymbol::new("K", i, j))
    }

    fn matrix(size: usize, pairs: &[(usize, usize, u32)]) -> AdjacencyMatrix {
        AdjacencyMatrix::from_pairs(size, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn graphs_from_matrices() {
        let b0 = graph_from_matrix(AdjacencyMatrix::zero(2), 2).unwrap();
        assert_eq!(b0.internal_count(), 0);
        let b1 = graph_from_matrix(matrix(2, &[(0, 1, 1)]), 2).unwrap();
        assert_eq!(b1, BernoulliGraph::basic());
        let g = graph_from_matrix(matrix(3, &[(0, 1, 2), (0, 2, 1)]), 3).unwrap();
        assert_eq!((g.internal_count(), g.edge_count()), (3, 6));
        assert!(graph_from_matrix(AdjacencyMatrix::zero(2), 3).is_err());
    }

    #[test]
    fn products() {
        let a = graph_from_matrix(matrix(3, &[(0, 1, 1)]), 3).unwrap();
        let b = graph_from_matrix(matrix(3, &[(1, 2, 2)]), 3).unwrap();
        assert_eq!(graph_product(&a, &b).unwrap().matrix(), &matrix(3, &[(0, 1, 1), (1, 2, 2)]));
        assert_eq!(graph_product(&BernoulliGraph::empty(3), &a).unwrap(), a);
        let b1 = BernoulliGraph::basic();
        assert_eq!(graph_product(&b1, &b1).unwrap().matrix().get(0, 1), 2);
        assert!(graph_product(&b1, &a).is_err());
    }

    #[test]
    fn embeddings() {
        let b13 = embed_graph(&BernoulliGraph::basic(), &[0, 2], 3).unwrap();
        assert_eq!(b13, BernoulliGraph::pair(3, 0, 2).unwrap());
        let g = graph_from_matrix(matrix(3, &[(0, 1, 2), (1, 2, 1)]), 3).unwrap();
        assert_eq!(embed_graph(&g, &[0, 1, 2], 3).unwrap(), g);
        let b23 = embed_graph(&BernoulliGraph::basic(), &[1, 2], 4).unwrap();
        assert_eq!(b23, BernoulliGraph::pair(4, 1, 2).unwrap());
        assert!(embed_graph(&BernoulliGraph::basic(), &[2, 1], 4).is_err());
        assert!(embed_graph(&BernoulliGraph::basic(), &[1, 4], 4).is_err());
        assert!(embed_graph(&BernoulliGraph::basic(), &[1], 4).is_err());
    }

    #[test]
    fn kontsevich_examples() {
        let k = PropagatorMatrix::symbolic("K", 2, false);
        let f = &x(2, 1).pow(2) + &x(2, 2);
        let g = &x(2, 1) * &x(2, 2);
        let id = kontsevich_apply(&BernoulliGraph::empty(2), &[f.clone(), g.clone()], &k).unwrap();
        assert_eq!(id, &f * &g);

        let k3 = PropagatorMatrix::symbolic("K", 3, false);
        let b12 = BernoulliGraph::pair(3, 0, 1).unwrap();
        let got = kontsevich_apply(&b12, &[x(3, 1), x(3, 2), x(3, 3)], &k3).unwrap();
        assert_eq!(got, x(3, 3).scale(&sym(1, 2)));

        // (K_12 d1 (x) d2)^2 on x1^2 (x) x2^2 = K_12^2 * 2 * 2
        let b12_sq = graph_from_matrix(matrix(2, &[(0, 1, 2)]), 2).unwrap();
        let got = kontsevich_apply(&b12_sq, &[x(2, 1).pow(2), x(2, 2).pow(2)], &k).unwrap();
        assert_eq!(got, Poly::constant(2, sym(1, 2).pow(2).scale(&rational(4))));
        assert!(kontsevich_apply(&b12, &[x(3, 1)], &k3).is_err());
    }

    #[test]
    fn graphs_match_operator() {
        let k = PropagatorMatrix::symbolic("K", 2, false);
        let n = TruncationOrder::new(4);
        for fs in [vec![x(2, 1), x(2, 2)], vec![x(2, 1).pow(2), x(2, 2).pow(2)], vec![&x(2, 1) + &x(2, 2)]] {
            assert_eq!(star_via_graphs(&fs, &k, n).unwrap(), star_multi(&fs, &k, n).unwrap());
        }
        let squares = star_via_graphs(&[x(2, 1).pow(2), x(2, 2).pow(2)], &k, n).unwrap();
        let top = squares.hbar_coefficient(2).constant_term();
        assert_eq!(top, sym(1, 2).pow(2).scale(&rational(2)));
    }

    #[test]
    fn feynman_correspondence() {
        let f = to_feynman(&BernoulliGraph::basic());
        assert_eq!((f.vertex_count(), f.edges().collect::<Vec<_>>()), (2, vec![(0, 1, 1)]));
        assert_eq!(to_feynman(&BernoulliGraph::empty(3)).edge_count(), 0);
        let g = graph_from_matrix(matrix(3, &[(0, 1, 2), (0, 2, 1)]), 3).unwrap();
        assert_eq!(to_feynman(&g).edges().collect::<Vec<_>>(), vec![(0, 1, 2), (0, 2, 1)]);
        assert_eq!(from_feynman(&to_feynman(&g)).unwrap(), g);

        let mut triangle = FeynmanGraph::new(3);
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            triangle.add_edge(i, j, 1).unwrap();
        }
        assert_eq!(from_feynman(&triangle).unwrap().matrix(), &matrix(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 1)]));
        assert_eq!(from_feynman(&FeynmanGraph::new(2)).unwrap(), BernoulliGraph::empty(2));

        let mut looped = FeynmanGraph::new(2);
        looped.add_edge(1, 1, 1).unwrap();
        assert_eq!(from_feynman(&looped), Err(Error::SelfLoop { vertex: 1 }));
        assert!(looped.add_edge(0, 2, 1).is_err());
    }

    #[test]
    fn dot_output() {
        let edgeless = feynman_dot(&FeynmanGraph::new(2));
        assert_eq!(edgeless, "graph feynman {\n  v1;\n  v2;\n}\n");
        let b1 = bernoulli_dot(&BernoulliGraph::basic());
        assert_eq!(b1.matches("[shape=box]").count(), 1);
        assert_eq!(b1.matches("[shape=circle]").count(), 2);
        assert_eq!(b1.matches("->").count(), 2);
        let mut double = FeynmanGraph::new(2);
        double.add_edge(0, 1, 2).unwrap();
        assert_eq!(feynman_dot(&double).matches("v1 -- v2;").count(), 2);
    }

    #[test]
    fn descriptions() {
        assert_eq!(describe(&BernoulliGraph::empty(2)), "b0");
        let g = graph_from_matrix(matrix(3, &[(0, 1, 2), (1, 2, 1)]), 3).unwrap();
        assert_eq!(describe(&g), "b12^2*b23");
    }
}
