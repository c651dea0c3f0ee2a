//! Field-level specialization: sampled kernels `K(x_i, x_j)` and field
//! values `phi(x_i)` substituted into symbolic results.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{CoeffElement, Poly, PropagatorSymbol, Scalar, Var};
use crate::combinat::{is_admissible, IntSequence};
use crate::star::{poisson_bracket, star2, star_tensor, PropagatorMatrix, TruncationOrder};
use crate::wick::{expectation_formula, wick_coefficient, WickMonomialSpec};
use crate::{Error, Result};

/// Kernel and field sampled at `d` points.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelGrid<S> {
    points: Vec<String>,
    kernel: Vec<Vec<S>>,
    field: Vec<S>,
    hbar: S,
    symmetric: bool,
}

impl<S: Scalar> KernelGrid<S> {
    pub fn new(points: Vec<String>, kernel: Vec<Vec<S>>, field: Vec<S>, hbar: S) -> Result<Self> {
        let dim = points.len();
        check_square(&kernel, dim)?;
        if field.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, found: field.len() });
        }
        Ok(KernelGrid { points, kernel, field, hbar, symmetric: false })
    }

    /// Points labelled `x1, ..., xd`.
    pub fn unlabelled(kernel: Vec<Vec<S>>, field: Vec<S>, hbar: S) -> Result<Self> {
        let points = (1..=field.len()).map(|i| alloc::format!("x{i}")).collect();
        Self::new(points, kernel, field, hbar)
    }

    /// Declares the kernel symmetric, which must hold entry by entry.
    pub fn into_symmetric(mut self) -> Result<Self> {
        for row in 0..self.dim() {
            for col in 0..row {
                if self.kernel[row][col] != self.kernel[col][row] {
                    return Err(Error::KernelNotSymmetric { row: row + 1, col: col + 1 });
                }
            }
        }
        self.symmetric = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn kernel(&self) -> &[Vec<S>] {
        &self.kernel
    }

    pub fn field(&self) -> &[S] {
        &self.field
    }

    pub fn hbar(&self) -> &S {
        &self.hbar
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// The symbolic propagator whose entries this grid samples.
    pub fn propagator(&self, family: &str) -> PropagatorMatrix {
        PropagatorMatrix::symbolic(family, self.dim() as u32, self.symmetric)
    }

    /// Bindings sending `family` to this grid's kernel.
    pub fn bindings(&self, family: &str) -> FamilyBindings<S> {
        FamilyBindings::new().with(family, self.kernel.clone())
    }
}

fn check_square<S>(kernel: &[Vec<S>], dim: usize) -> Result<()> {
    if kernel.len() != dim {
        return Err(Error::KernelShape { rows: kernel.len(), cols: kernel.first().map_or(0, Vec::len), dim });
    }
    if let Some(row) = kernel.iter().find(|r| r.len() != dim) {
        return Err(Error::KernelShape { rows: kernel.len(), cols: row.len(), dim });
    }
    Ok(())
}

/// Sampled kernels for each propagator family.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FamilyBindings<S> {
    kernels: BTreeMap<String, Vec<Vec<S>>>,
}

impl<S: Scalar> FamilyBindings<S> {
    pub fn new() -> Self {
        FamilyBindings { kernels: BTreeMap::new() }
    }

    pub fn with(mut self, family: &str, kernel: Vec<Vec<S>>) -> Self {
        self.kernels.insert(family.to_string(), kernel);
        self
    }

    pub fn insert(&mut self, family: &str, kernel: Vec<Vec<S>>) -> Result<()> {
        check_square(&kernel, kernel.len())?;
        self.kernels.insert(family.to_string(), kernel);
        Ok(())
    }

    fn lookup(&self, s: &PropagatorSymbol) -> Result<S> {
        let kernel = self.kernels.get(s.family()).ok_or_else(|| Error::UnboundFamily(s.family().to_string()))?;
        let dim = kernel.len() as u32;
        for index in [s.row(), s.col()] {
            if index == 0 || index > dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        Ok(kernel[s.row() as usize - 1][s.col() as usize - 1].clone())
    }
}

fn field_value<S: Scalar>(grid: &KernelGrid<S>, var: Var) -> Result<S> {
    let dim = grid.dim() as u32;
    if var.index == 0 || var.index > dim {
        return Err(Error::IndexOutOfRange { index: var.index, dim });
    }
    Ok(grid.field[var.index as usize - 1].clone())
}

/// `K^(f)_ij -> kernel_f[i][j]`, `x_i -> phi(x_i)`, `hbar -> grid hbar`.
pub fn specialize<S: Scalar>(p: &Poly, grid: &KernelGrid<S>, bindings: &FamilyBindings<S>) -> Result<S> {
    p.evaluate(&grid.hbar, |v| field_value(grid, v), |s| bindings.lookup(s))
}

pub fn specialize_coefficient<S: Scalar>(
    c: &CoeffElement,
    grid: &KernelGrid<S>,
    bindings: &FamilyBindings<S>,
) -> Result<S> {
    c.evaluate(&grid.hbar, |s| bindings.lookup(s))
}

/// `f(phi) * g(phi)` under the grid kernel: the symbolic product specialized.
pub fn field_star<S: Scalar>(f: &Poly, g: &Poly, grid: &KernelGrid<S>, order: TruncationOrder) -> Result<S> {
    let family = FIELD_FAMILY;
    let product = star2(f, g, &grid.propagator(family), order)?;
    specialize(&product, grid, &grid.bindings(family))
}

/// The coefficients of `hbar^0, ..., hbar^N` in `f(phi) * g(phi)`.
pub fn field_star_series<S: Scalar>(
    f: &Poly,
    g: &Poly,
    grid: &KernelGrid<S>,
    order: TruncationOrder,
) -> Result<Vec<S>> {
    let family = FIELD_FAMILY;
    let product = star2(f, g, &grid.propagator(family), order)?;
    let bindings = grid.bindings(family);
    let unit = KernelGrid { hbar: S::one(), ..grid.clone() };
    (0..=order.max_hbar_power()).map(|k| specialize(&product.hbar_coefficient(k), &unit, &bindings)).collect()
}

/// Family name under which grid kernels are bound.
pub const FIELD_FAMILY: &str = "K";

/// Numeric evaluation of `f(phi) * g(phi)` that never forms the symbolic
/// product: sums `hbar^k/k! prod K(x_is, x_js) d_I f(phi) d_J g(phi)` over
/// ordered index tuples `I, J`.
pub fn field_star_direct<S: Scalar>(f: &Poly, g: &Poly, grid: &KernelGrid<S>, order: TruncationOrder) -> Result<S> {
    let n = order.max_hbar_power();
    let d = grid.dim();
    if f.dim() as usize != d || g.dim() as usize != d {
        return Err(Error::DimensionMismatch { left: f.dim(), right: d as u32 });
    }
    let bindings = grid.bindings(FIELD_FAMILY);
    let unit = KernelGrid { hbar: S::one(), ..grid.clone() };
    let f_parts: Vec<Poly> = (0..=n).map(|h| f.hbar_coefficient(h)).collect();
    let g_parts: Vec<Poly> = (0..=n).map(|h| g.hbar_coefficient(h)).collect();
    let max_k = n.min(f.degree().min(g.degree()));

    let mut total = S::zero();
    for (hf, fp) in f_parts.iter().enumerate() {
        if fp.is_zero() {
            continue;
        }
        for (hg, gp) in g_parts.iter().enumerate() {
            let base = (hf + hg) as u32;
            if gp.is_zero() || base > n {
                continue;
            }
            for k in 0..=max_k.min(n - base) {
                let mut sum = S::zero();
                let tuples = index_tuples(d, k as usize);
                let f_derivs = derivative_values(fp, &tuples, &unit, &bindings)?;
                let g_derivs = derivative_values(gp, &tuples, &unit, &bindings)?;
                for (ti, fi) in tuples.iter().zip(&f_derivs) {
                    if fi.is_zero() {
                        continue;
                    }
                    for (tj, gj) in tuples.iter().zip(&g_derivs) {
                        let mut term = fi.clone() * gj.clone();
                        for (&i, &j) in ti.iter().zip(tj) {
                            term = term * grid.kernel[i][j].clone();
                        }
                        sum = sum + term;
                    }
                }
                let weight = S::from_rational(&crate::star::inverse_factorial(k));
                total = total + grid.hbar.pow_u32(base + k) * weight * sum;
            }
        }
    }
    Ok(total)
}

fn index_tuples(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..d).map(move |i| [t.as_slice(), &[i]].concat())).collect();
    }
    out
}

fn derivative_values<S: Scalar>(
    p: &Poly,
    tuples: &[Vec<usize>],
    grid: &KernelGrid<S>,
    bindings: &FamilyBindings<S>,
) -> Result<Vec<S>> {
    let mut cache: BTreeMap<Vec<u32>, S> = BTreeMap::new();
    let d = grid.dim();
    let mut out = Vec::with_capacity(tuples.len());
    for t in tuples {
        let mut alpha = vec![0u32; d];
        for &i in t {
            alpha[i] += 1;
        }
        let value = match cache.get(&alpha) {
            Some(v) => v.clone(),
            None => {
                let v = specialize(&p.differentiate_multi(0, &alpha), grid, bindings)?;
                cache.insert(alpha, v.clone());
                v
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// `{f, g}` specialized to the grid.
pub fn field_poisson<S: Scalar>(f: &Poly, g: &Poly, grid: &KernelGrid<S>) -> Result<S> {
    let bracket = poisson_bracket(f, g, &grid.propagator(FIELD_FAMILY))?;
    specialize(&bracket, grid, &grid.bindings(FIELD_FAMILY))
}

/// `sum_k l!/(2^k (l-2k)! k!) hbar^k K(x_i, x_i)^k phi(x_i)^(l-2k)`, 1-based `i`.
pub fn field_wick_power<S: Scalar>(i: u32, l: u32, grid: &KernelGrid<S>) -> Result<S> {
    let dim = grid.dim() as u32;
    if i == 0 || i > dim {
        return Err(Error::IndexOutOfRange { index: i, dim });
    }
    let idx = i as usize - 1;
    let diag = grid.hbar.clone() * grid.kernel[idx][idx].clone();
    let phi = &grid.field[idx];
    let mut total = S::zero();
    for k in 0..=l / 2 {
        total = total + S::from_rational(&wick_coefficient(l, k)) * diag.pow_u32(k) * phi.pow_u32(l - 2 * k);
    }
    Ok(total)
}

/// The combinatorial expectation with the grid kernel as product
/// propagator; zero for inadmissible `n`.
pub fn field_expectation<S: Scalar>(n: &IntSequence, grid: &KernelGrid<S>) -> Result<S> {
    if n.len() != grid.dim() {
        return Err(Error::LengthMismatch { expected: grid.dim(), found: n.len() });
    }
    if !is_admissible(n) {
        return Ok(S::zero());
    }
    let spec = WickMonomialSpec::new(n.values().to_vec(), FIELD_FAMILY, FIELD_FAMILY);
    specialize_coefficient(&expectation_formula(&spec), grid, &grid.bindings(FIELD_FAMILY))
}

/// Weighted nodes; each node is a tuple of grid point indices (0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<S> {
    nodes: Vec<Vec<usize>>,
    weights: Vec<S>,
}

impl<S: Scalar> QuadratureRule<S> {
    pub fn new(nodes: Vec<Vec<usize>>, weights: Vec<S>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Quadrature("rule has no nodes"));
        }
        if nodes.len() != weights.len() {
            return Err(Error::Quadrature("node and weight counts differ"));
        }
        if nodes.iter().any(|n| n.len() != nodes[0].len()) {
            return Err(Error::Quadrature("nodes have different lengths"));
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn nodes(&self) -> &[Vec<usize>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn node_dim(&self) -> usize {
        self.nodes[0].len()
    }
}

/// `sum_(u,v) w_u w_v (F(phi(u)) * G(phi(v)))`: the tensor product is formed
/// symbolically once; at a node pair `(u, v)` the left variables read
/// `phi(u_i)`, the right ones `phi(v_j)`, and `K_ij` reads `K(u_i, v_j)`.
pub fn functional_star<S: Scalar>(
    f_density: &Poly,
    g_density: &Poly,
    rule: &QuadratureRule<S>,
    grid: &KernelGrid<S>,
    order: TruncationOrder,
) -> Result<S> {
    let d = rule.node_dim();
    if f_density.dim() as usize != d || g_density.dim() as usize != d {
        return Err(Error::Quadrature("node length differs from density dimension"));
    }
    if rule.nodes.iter().flatten().any(|&p| p >= grid.dim()) {
        return Err(Error::Quadrature("node refers to a point outside the grid"));
    }
    let family = FIELD_FAMILY;
    let k = PropagatorMatrix::symbolic(family, d as u32, false);
    let tensor = star_tensor(&f_density.retag(1), &g_density.retag(2), &k, order)?;

    let mut total = S::zero();
    for (u, wu) in rule.nodes.iter().zip(&rule.weights) {
        for (v, wv) in rule.nodes.iter().zip(&rule.weights) {
            let value = tensor.evaluate(
                &grid.hbar,
                |var| {
                    let at = if var.block == 2 { v } else { u };
                    Ok(grid.field[at[var.index as usize - 1]].clone())
                },
                |s| {
                    if s.family() != family {
                        return Err(Error::UnboundFamily(s.family().to_string()));
                    }
                    Ok(grid.kernel[u[s.row() as usize - 1]][v[s.col() as usize - 1]].clone())
                },
            )?;
            total = total + wu.clone() * wv.clone() * value;
        }
    }
    Ok(total)
}
