//! Star products generated by a propagator bi-vector field.
//!
//! Every product here is `exp{hbar * sum K_ij d_i (x) d_j}` applied to a tensor
//! of polynomials, computed modulo `hbar^(N+1)` by the recurrence
//! `T_k = (hbar / k) * K(T_{k-1})` and then restricted to the diagonal.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::algebra::{ratio, CoeffElement, Poly, PropagatorSymbol, Rational, Var};
use crate::{Error, Result};

/// The `d x d` matrix of coefficients `K_ij` in `A[hbar]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatorMatrix {
    dim: u32,
    entries: Vec<CoeffElement>,
    symmetric: bool,
}

impl PropagatorMatrix {
    /// `K_ij = K[family;i,j]`. For a symmetric family both `(i,j)` and
    /// `(j,i)` map to the symbol with sorted indices.
    pub fn symbolic(family: &str, dim: u32, symmetric: bool) -> Self {
        let mut entries = Vec::with_capacity((dim * dim) as usize);
        for i in 1..=dim {
            for j in 1..=dim {
                let s = if symmetric {
                    PropagatorSymbol::symmetric(family, i, j)
                } else {
                    PropagatorSymbol::new(family, i, j)
                };
                entries.push(CoeffElement::symbol(s));
            }
        }
        PropagatorMatrix { dim, entries, symmetric }
    }

    pub fn zero(dim: u32) -> Self {
        PropagatorMatrix { dim, entries: vec![CoeffElement::zero(); (dim * dim) as usize], symmetric: true }
    }

    /// Every entry equal to `value`.
    pub fn constant(dim: u32, value: CoeffElement) -> Self {
        PropagatorMatrix { dim, entries: vec![value; (dim * dim) as usize], symmetric: true }
    }

    /// Row-major entries. `symmetric` is verified when set.
    pub fn from_entries(dim: u32, entries: Vec<CoeffElement>, symmetric: bool) -> Result<Self> {
        let expected = (dim * dim) as usize;
        if entries.len() != expected {
            return Err(Error::LengthMismatch { expected, found: entries.len() });
        }
        let m = PropagatorMatrix { dim, entries, symmetric };
        if symmetric && !m.entries_symmetric() {
            return Err(Error::InvalidAdjacency("propagator declared symmetric is not"));
        }
        Ok(m)
    }

    /// Numeric propagator; the symmetry flag is detected.
    pub fn from_rationals(rows: &[Vec<Rational>]) -> Result<Self> {
        let dim = rows.len() as u32;
        let mut entries = Vec::with_capacity(rows.len() * rows.len());
        for row in rows {
            if row.len() != rows.len() {
                return Err(Error::LengthMismatch { expected: rows.len(), found: row.len() });
            }
            entries.extend(row.iter().cloned().map(CoeffElement::from_rational));
        }
        let mut m = PropagatorMatrix { dim, entries, symmetric: false };
        m.symmetric = m.entries_symmetric();
        Ok(m)
    }

    fn entries_symmetric(&self) -> bool {
        (1..=self.dim).all(|i| (1..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `K_ij`, 1-based. Panics when out of range.
    pub fn entry(&self, i: u32, j: u32) -> &CoeffElement {
        assert!(i >= 1 && j >= 1 && i <= self.dim && j <= self.dim, "propagator index out of range");
        &self.entries[((i - 1) * self.dim + (j - 1)) as usize]
    }

    /// `K - K'`.
    pub fn difference(&self, other: &PropagatorMatrix) -> Result<PropagatorMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let entries: Vec<_> = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        let mut m = PropagatorMatrix { dim: self.dim, entries, symmetric: false };
        m.symmetric = m.entries_symmetric();
        Ok(m)
    }

    /// The same matrix with `K_ii = 0`.
    pub fn with_zero_diagonal(mut self) -> Self {
        for i in 0..self.dim {
            self.entries[(i * self.dim + i) as usize] = CoeffElement::zero();
        }
        self
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (1..=self.dim).all(|i| self.entry(i, i).is_zero())
    }

    /// Propagator families whose symbols appear in the entries.
    pub fn families(&self) -> BTreeSet<String> {
        self.entries.iter().flat_map(|c| c.symbols().map(|s| String::from(s.family()))).collect()
    }

    pub(crate) fn nonzero_entries(&self) -> impl Iterator<Item = (u32, u32, &CoeffElement)> {
        let dim = self.dim;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (k as u32 / dim + 1, k as u32 % dim + 1, c))
    }
}

/// Products are computed modulo `hbar^(N+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationOrder(u32);

impl TruncationOrder {
    pub fn new(max_hbar_power: u32) -> Self {
        TruncationOrder(max_hbar_power)
    }

    pub fn max_hbar_power(self) -> u32 {
        self.0
    }

    /// An order at which the product of `factors` is not truncated at all:
    /// the series terminates after half the total degree.
    pub fn exact_for<'a>(factors: impl IntoIterator<Item = &'a Poly>) -> Self {
        let (mut hbar, mut degree) = (0, 0);
        for f in factors {
            hbar += f.max_hbar();
            degree += f.degree();
        }
        TruncationOrder(hbar + degree / 2)
    }
}

/// A pair of block sets joined by the bi-vector field.
pub(crate) type BlockPair = (BTreeSet<u32>, BTreeSet<u32>);

fn check_dim(p: &Poly, k: &PropagatorMatrix) -> Result<()> {
    if p.dim() != k.dim() {
        Err(Error::DimensionMismatch { left: p.dim(), right: k.dim() })
    } else {
        Ok(())
    }
}

/// One application of `sum_(A,B) sum_ij K_ij d_(i,A) d_(j,B)`.
pub(crate) fn apply_bivector(p: &Poly, pairs: &[BlockPair], k: &PropagatorMatrix) -> Result<Poly> {
    let mut out = Poly::zero(p.dim());
    for (left, right) in pairs {
        let mut left_derivs: BTreeMap<u32, Poly> = BTreeMap::new();
        for (i, j, kij) in k.nonzero_entries() {
            let di = match left_derivs.get(&i) {
                Some(d) => d.clone(),
                None => {
                    let d = p.partial_in_blocks(left, i)?;
                    left_derivs.insert(i, d.clone());
                    d
                }
            };
            if di.is_zero() {
                continue;
            }
            let dij = di.partial_in_blocks(right, j)?;
            if !dij.is_zero() {
                out = &out + &dij.scale(kij);
            }
        }
    }
    Ok(out)
}

/// `exp{hbar * K}` applied to `p`, modulo `hbar^(N+1)`.
fn exp_bivector(p: &Poly, pairs: &[BlockPair], k: &PropagatorMatrix, order: TruncationOrder) -> Result<Poly> {
    let n = order.max_hbar_power();
    let mut term = p.truncate_hbar(n);
    let mut total = term.clone();
    let hbar = CoeffElement::hbar_pow(1);
    for step in 1..=n {
        let lowered = term.truncate_hbar(n - 1);
        if lowered.is_zero() {
            break;
        }
        term = apply_bivector(&lowered, pairs, k)?.scale(&hbar).scale_rational(&ratio(1, i64::from(step)));
        if term.is_zero() {
            break;
        }
        total = &total + &term;
    }
    Ok(total)
}

/// Tensor-form product `[F * G]` of block-tagged polynomials. The bi-vector
/// field joins every block of `f` with every block of `g`; all blocks are kept.
pub fn star_tensor(f: &Poly, g: &Poly, k: &PropagatorMatrix, order: TruncationOrder) -> Result<Poly> {
    check_dim(f, k)?;
    check_dim(g, k)?;
    let product = f.tensor(g)?;
    exp_bivector(&product, &[(f.blocks(), g.blocks())], k, order)
}

/// `f * g` for ordinary polynomials: the tensor product restricted to the
/// diagonal `x = y`.
pub fn star2(f: &Poly, g: &Poly, k: &PropagatorMatrix, order: TruncationOrder) -> Result<Poly> {
    Ok(star_tensor(&f.retag(1), &g.retag(2), k, order)?.merge_blocks())
}

/// `f_1 * ... * f_m`, as `exp{hbar sum_(a<b) K_ab}` on the `m`-fold tensor.
pub fn star_multi(fs: &[Poly], k: &PropagatorMatrix, order: TruncationOrder) -> Result<Poly> {
    let tensor = tensor_factors(fs, k)?;
    let pairs = ordered_pairs(fs.len());
    Ok(exp_bivector(&tensor, &pairs, k, order)?.merge_blocks())
}

/// Places `fs[a]` in block `a + 1` and multiplies them out.
pub(crate) fn tensor_factors(fs: &[Poly], k: &PropagatorMatrix) -> Result<Poly> {
    let first = fs.first().ok_or(Error::EmptySequence)?;
    let mut tensor = Poly::one(first.dim());
    for (a, f) in fs.iter().enumerate() {
        check_dim(f, k)?;
        tensor = tensor.multiply(&f.retag(a as u32 + 1))?;
    }
    Ok(tensor)
}

fn ordered_pairs(m: usize) -> Vec<BlockPair> {
    let mut pairs = Vec::new();
    for a in 1..=m as u32 {
        for b in a + 1..=m as u32 {
            pairs.push((BTreeSet::from([a]), BTreeSet::from([b])));
        }
    }
    pairs
}

/// `{f, g} = sum_(i != j) (K_ij - K_ji) d_i f d_j g`.
pub fn poisson_bracket(f: &Poly, g: &Poly, k: &PropagatorMatrix) -> Result<Poly> {
    check_dim(f, k)?;
    check_dim(g, k)?;
    let mut out = Poly::zero(f.dim());
    for i in 1..=k.dim() {
        let di = f.partial_derivative(0, i)?;
        if di.is_zero() {
            continue;
        }
        for j in 1..=k.dim() {
            if i == j {
                continue;
            }
            let antisym = k.entry(i, j) - k.entry(j, i);
            if antisym.is_zero() {
                continue;
            }
            let dj = g.partial_derivative(0, j)?;
            out = &out + &di.multiply(&dj)?.scale(&antisym);
        }
    }
    Ok(out)
}

/// One term `c * (d^a_1 f_1 *' ... *' d^a_m f_m)` of a change of propagator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatorChangeTerm {
    /// Polynomial in `hbar` and the entries of `K - K'`.
    pub coefficient: CoeffElement,
    /// `derivatives[a][i-1]` is the number of `d/dx_i` applied to factor `a`.
    pub derivatives: Vec<Vec<u32>>,
}

/// The expansion of a `K`-product over `K'`-products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagatorChange {
    pub terms: Vec<PropagatorChangeTerm>,
    pub order: TruncationOrder,
}

impl PropagatorChange {
    /// `sum_terms c * (d^a_1 f_1 *' ... *' d^a_m f_m)` under `k_prime`,
    /// modulo `hbar^(N+1)`.
    pub fn reexpand(&self, fs: &[Poly], k_prime: &PropagatorMatrix) -> Result<Poly> {
        let first = fs.first().ok_or(Error::EmptySequence)?;
        let mut total = Poly::zero(first.dim());
        for term in &self.terms {
            if term.derivatives.len() != fs.len() {
                return Err(Error::LengthMismatch { expected: term.derivatives.len(), found: fs.len() });
            }
            let derived: Vec<Poly> =
                fs.iter().zip(&term.derivatives).map(|(f, alpha)| f.differentiate_multi(0, alpha)).collect();
            let product = star_multi(&derived, k_prime, self.order)?;
            total = &total + &product.scale(&term.coefficient);
        }
        Ok(total.truncate_hbar(self.order.max_hbar_power()))
    }

    /// The term with no derivatives, i.e. coefficient of `f_1 *' ... *' f_m`.
    pub fn identity_coefficient(&self) -> CoeffElement {
        self.terms
            .iter()
            .find(|t| t.derivatives.iter().all(|a| a.iter().all(|&e| e == 0)))
            .map(|t| t.coefficient.clone())
            .unwrap_or_default()
    }
}

/// Expands `f_1 *_K ... *_K f_m` as `exp{hbar sum_(a<b) (K - K')_ab}` acting
/// on `K'`-products of derivatives of the factors.
///
/// Derivatives that annihilate a factor are pruned, so the expansion is finite
/// and every returned coefficient is non-zero.
pub fn change_propagator(
    fs: &[Poly],
    k: &PropagatorMatrix,
    k_prime: &PropagatorMatrix,
    order: TruncationOrder,
) -> Result<PropagatorChange> {
    if fs.is_empty() {
        return Err(Error::EmptySequence);
    }
    let delta = k.difference(k_prime)?;
    for f in fs {
        check_dim(f, k)?;
    }
    let dim = k.dim() as usize;
    let m = fs.len();
    let bounds: Vec<Vec<u32>> =
        fs.iter().map(|f| (1..=dim as u32).map(|i| f.degree_in(Var::new(0, i))).collect()).collect();

    let identity = vec![vec![0u32; dim]; m];
    let mut all: BTreeMap<Vec<Vec<u32>>, CoeffElement> = BTreeMap::new();
    all.insert(identity.clone(), CoeffElement::one());
    let mut layer: BTreeMap<Vec<Vec<u32>>, CoeffElement> = BTreeMap::from([(identity, CoeffElement::one())]);
    let hbar = CoeffElement::hbar_pow(1);

    for step in 1..=order.max_hbar_power() {
        let mut next: BTreeMap<Vec<Vec<u32>>, CoeffElement> = BTreeMap::new();
        let weight = hbar.scale(&ratio(1, i64::from(step)));
        for (alpha, c) in &layer {
            let c = c * &weight;
            for a in 0..m {
                for b in a + 1..m {
                    for (i, j, dij) in delta.nonzero_entries() {
                        let (i, j) = (i as usize - 1, j as usize - 1);
                        if alpha[a][i] >= bounds[a][i] || alpha[b][j] >= bounds[b][j] {
                            continue;
                        }
                        let mut raised = alpha.clone();
                        raised[a][i] += 1;
                        raised[b][j] += 1;
                        let add = &c * dij;
                        let entry = next.entry(raised).or_default();
                        *entry = &*entry + &add;
                    }
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        if next.is_empty() {
            break;
        }
        for (alpha, c) in &next {
            let entry = all.entry(alpha.clone()).or_default();
            *entry = &*entry + c;
        }
        layer = next;
    }

    let terms = all
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(derivatives, coefficient)| PropagatorChangeTerm { coefficient, derivatives })
        .collect();
    Ok(PropagatorChange { terms, order })
}

/// The `hbar^1` coefficient of `f * g - g * f`.
pub fn commutator_first_order(f: &Poly, g: &Poly, k: &PropagatorMatrix) -> Result<Poly> {
    let order = TruncationOrder::new(1);
    let fg = star2(f, g, k, order)?;
    let gf = star2(g, f, k, order)?;
    Ok(fg.checked_sub(&gf)?.hbar_coefficient(1))
}

pub(crate) fn inverse_factorial(n: u32) -> Rational {
    let f = crate::algebra::factorial(n);
    if f.is_zero() {
        Rational::zero()
    } else {
        num_traits::Inv::inv(f)
    }
}
