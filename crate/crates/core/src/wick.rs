//! Wick powers, Wick monomials and their expectations.

use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{factorial, ratio, CoeffElement, Poly, Rational, Var};
use crate::combinat::{enumerate_adjacency_by_degree, enumerate_adjacency_by_rowsums, AdjacencyMatrix};
use crate::star::{inverse_factorial, star_multi, PropagatorMatrix, TruncationOrder};
use crate::{Error, Result};

/// `l! / (2^k k! (l - 2k)!)`, the number of ways to pick `k` disjoint pairs
/// out of `l` points.
pub fn wick_coefficient(l: u32, k: u32) -> Rational {
    if 2 * k > l {
        return Rational::zero();
    }
    let two_k = Rational::from_integer(2.into()).pow(k as i32);
    factorial(l) / (two_k * factorial(k) * factorial(l - 2 * k))
}

fn check_index(i: u32, k: &PropagatorMatrix) -> Result<()> {
    if i == 0 || i > k.dim() {
        Err(Error::IndexOutOfRange { index: i, dim: k.dim() })
    } else {
        Ok(())
    }
}

/// `:x_i^l:_K = sum_k l!/(2^k k! (l-2k)!) hbar^k K_ii^k x_i^(l-2k)`.
pub fn wick_power(i: u32, l: u32, k: &PropagatorMatrix) -> Result<Poly> {
    check_index(i, k)?;
    let d = k.dim();
    let diag = &CoeffElement::hbar_pow(1) * k.entry(i, i);
    let mut out = Poly::zero(d);
    for j in 0..=l / 2 {
        let c = diag.pow(j).scale(&wick_coefficient(l, j));
        out = &out + &Poly::var_pow(d, i, l - 2 * j)?.scale(&c);
    }
    Ok(out)
}

/// `x_i^l` as a combination of Wick powers `:x_i^j:_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickExpansion {
    pub index: u32,
    /// `(coefficient, j)` for the Wick power `:x_i^j:_K`, by decreasing `j`.
    pub terms: Vec<(CoeffElement, u32)>,
}

impl WickExpansion {
    /// Replaces each Wick power by its polynomial.
    pub fn resubstitute(&self, k: &PropagatorMatrix) -> Result<Poly> {
        let mut out = Poly::zero(k.dim());
        for (c, j) in &self.terms {
            out = &out + &wick_power(self.index, *j, k)?.scale(c);
        }
        Ok(out)
    }
}

/// `x_i^l = sum_k l!/(2^k k! (l-2k)!) (-hbar)^k K_ii^k :x_i^(l-2k):_K`.
pub fn wick_unpower(i: u32, l: u32, k: &PropagatorMatrix) -> Result<WickExpansion> {
    check_index(i, k)?;
    let diag = &-CoeffElement::hbar_pow(1) * k.entry(i, i);
    let terms = (0..=l / 2)
        .map(|j| (diag.pow(j).scale(&wick_coefficient(l, j)), l - 2 * j))
        .filter(|(c, _)| !c.is_zero())
        .collect();
    Ok(WickExpansion { index: i, terms })
}

/// `:x_1^n_1:_K *_K' ... *_K' :x_d^n_d:_K` with `K` the ordering family and
/// `K'` the product family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WickMonomialSpec {
    pub n: Vec<u32>,
    pub ordering_family: String,
    pub product_family: String,
    /// Sets the ordering family's diagonal `K_ii` to zero.
    pub ordering_zero_diagonal: bool,
}

impl WickMonomialSpec {
    pub fn new(n: Vec<u32>, ordering_family: impl Into<String>, product_family: impl Into<String>) -> Self {
        WickMonomialSpec {
            n,
            ordering_family: ordering_family.into(),
            product_family: product_family.into(),
            ordering_zero_diagonal: false,
        }
    }

    pub fn with_zero_diagonal_ordering(mut self) -> Self {
        self.ordering_zero_diagonal = true;
        self
    }

    pub fn dim(&self) -> u32 {
        self.n.len() as u32
    }

    pub fn total(&self) -> u32 {
        self.n.iter().sum()
    }

    pub fn ordering(&self) -> PropagatorMatrix {
        let k = PropagatorMatrix::symbolic(&self.ordering_family, self.dim(), true);
        if self.ordering_zero_diagonal {
            k.with_zero_diagonal()
        } else {
            k
        }
    }

    pub fn product(&self) -> PropagatorMatrix {
        PropagatorMatrix::symbolic(&self.product_family, self.dim(), true)
    }

    /// The factors `:x_i^n_i:_K`.
    pub fn factors(&self) -> Result<Vec<Poly>> {
        if self.n.is_empty() {
            return Err(Error::EmptySequence);
        }
        let k = self.ordering();
        (1..=self.dim()).map(|i| wick_power(i, self.n[i as usize - 1], &k)).collect()
    }

    /// An order at which the Wick monomial is computed without truncation.
    pub fn exact_order(&self) -> TruncationOrder {
        TruncationOrder::new(self.total())
    }
}

/// The Wick monomial via the star-product engine.
pub fn wick_monomial_star(spec: &WickMonomialSpec, order: TruncationOrder) -> Result<Poly> {
    star_multi(&spec.factors()?, &spec.product(), order)
}

/// The Wick monomial by `exp{hbar sum_(i<j) K'_ij d_i d_j}` applied to the
/// ordinary product of the Wick powers.
pub fn wick_monomial_operator(spec: &WickMonomialSpec, order: TruncationOrder) -> Result<Poly> {
    let factors = spec.factors()?;
    let k = spec.product();
    let d = spec.dim();
    let mut term = factors.iter().try_fold(Poly::one(d), |acc, f| acc.multiply(f))?;
    let n = order.max_hbar_power();
    term = term.truncate_hbar(n);
    let mut total = term.clone();
    for step in 1..=n {
        let mut next = Poly::zero(d);
        let lowered = term.truncate_hbar(n - 1);
        for i in 1..=d {
            let di = lowered.partial_derivative(0, i)?;
            if di.is_zero() {
                continue;
            }
            for j in i + 1..=d {
                let dij = di.partial_derivative(0, j)?;
                next = &next + &dij.scale(k.entry(i, j));
            }
        }
        term = next.scale(&CoeffElement::hbar_pow(1)).scale_rational(&ratio(1, i64::from(step)));
        if term.is_zero() {
            break;
        }
        total = &total + &term;
    }
    Ok(total)
}

/// `(1/m!) sum_M multinomial(m; m_ij) prod_(i<j) K'_ij^m_ij` over adjacency
/// matrices with row sums `n`, or zero when there are none.
pub fn expectation_formula(spec: &WickMonomialSpec) -> CoeffElement {
    let total = spec.total();
    if total % 2 == 1 {
        return CoeffElement::zero();
    }
    let k = spec.product();
    let m = total / 2;
    let mut out = CoeffElement::zero();
    for matrix in enumerate_adjacency_by_rowsums(&spec.n) {
        out = &out + &amplitude(&matrix, &k);
    }
    out.scale(&inverse_factorial(m))
}

/// `multinomial(M) prod_(i<j) K_ij^m_ij`.
fn amplitude(matrix: &AdjacencyMatrix, k: &PropagatorMatrix) -> CoeffElement {
    let mut c = CoeffElement::from_rational(BigRational::from_integer(matrix.multinomial().into()));
    for (i, j, v) in matrix.upper_entries() {
        c = &c * &k.entry(i as u32 + 1, j as u32 + 1).pow(v);
    }
    c
}

/// The variable-free part of the `hbar^m` coefficient, `2m = sum n_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleExpectation {
    pub value: CoeffElement,
    /// The total was odd; `value` is zero by convention.
    pub odd_total: bool,
    /// The ordering family keeps its diagonal, so `value` may contain
    /// `K_ii` terms that the combinatorial formula does not see.
    pub nonzero_ordering_diagonal: bool,
}

pub fn expectation_oracle(spec: &WickMonomialSpec) -> Result<OracleExpectation> {
    let total = spec.total();
    let nonzero_ordering_diagonal = !spec.ordering_zero_diagonal && spec.n.iter().any(|&v| v >= 2);
    if total % 2 == 1 {
        return Ok(OracleExpectation { value: CoeffElement::zero(), odd_total: true, nonzero_ordering_diagonal });
    }
    let m = total / 2;
    let product = wick_monomial_star(spec, TruncationOrder::new(m))?;
    let value = product.hbar_coefficient(m).constant_term();
    Ok(OracleExpectation { value, odd_total: false, nonzero_ordering_diagonal })
}

/// `prod_i n_i!`, the factor between the oracle and the formula.
pub fn oracle_bridge_factor(n: &[u32]) -> Rational {
    n.iter().fold(Rational::one(), |acc, &v| acc * factorial(v))
}

/// One term of the single-variable Wick theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickTerm {
    pub matrix: AdjacencyMatrix,
    /// `hbar^k / k! * multinomial(M) * prod_(i<j) (K_ij - K'_ij)^m_ij`.
    pub coefficient: CoeffElement,
    /// Row sums of the matrix: derivative order of each factor.
    pub alpha: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickTheoremExpansion {
    pub terms: Vec<WickTerm>,
    pub order: TruncationOrder,
}

impl WickTheoremExpansion {
    /// `sum coefficient * (f_1^(alpha_1) *' ... *' f_m^(alpha_m))` modulo
    /// `hbar^(N+1)`.
    pub fn reexpand(&self, fs: &[Poly], k_prime: &PropagatorMatrix) -> Result<Poly> {
        let first = fs.first().ok_or(Error::EmptySequence)?;
        let mut total = Poly::zero(first.dim());
        for term in &self.terms {
            if term.alpha.len() != fs.len() {
                return Err(Error::LengthMismatch { expected: term.alpha.len(), found: fs.len() });
            }
            let derived: Vec<Poly> = fs
                .iter()
                .zip(&term.alpha)
                .enumerate()
                .map(|(a, (f, &order))| nth_derivative(f, a as u32 + 1, order))
                .collect();
            total = &total + &star_multi(&derived, k_prime, self.order)?.scale(&term.coefficient);
        }
        Ok(total.truncate_hbar(self.order.max_hbar_power()))
    }

    /// The adjacency matrices that occur, in enumeration order.
    pub fn matrices(&self) -> Vec<&AdjacencyMatrix> {
        self.terms.iter().map(|t| &t.matrix).collect()
    }
}

fn nth_derivative(f: &Poly, index: u32, order: u32) -> Poly {
    let mut out = f.clone();
    for _ in 0..order {
        out = out.differentiate(Var::new(0, index));
    }
    out
}

/// `f_1(x_1) *_K ... *_K f_m(x_m)` as a sum over adjacency matrices `M` of
/// `K'`-products of the derivatives `f_i^(alpha_i)`, `alpha_i = sum_j m_ij`.
///
/// Factor `i` must depend on `x_i` alone. Matrices whose derivatives
/// annihilate a factor, or whose coefficient vanishes, are omitted.
pub fn wick_theorem_expand(
    fs: &[Poly],
    k: &PropagatorMatrix,
    k_prime: &PropagatorMatrix,
    order: TruncationOrder,
) -> Result<WickTheoremExpansion> {
    if fs.is_empty() {
        return Err(Error::EmptySequence);
    }
    let delta = k.difference(k_prime)?;
    if fs.len() > delta.dim() as usize {
        return Err(Error::LengthMismatch { expected: delta.dim() as usize, found: fs.len() });
    }
    let mut degrees = Vec::with_capacity(fs.len());
    for (a, f) in fs.iter().enumerate() {
        if f.dim() != delta.dim() {
            return Err(Error::DimensionMismatch { left: f.dim(), right: delta.dim() });
        }
        if !f.depends_only_on(a as u32 + 1) {
            return Err(Error::NotSingleVariable { factor: a });
        }
        degrees.push(f.degree_in(Var::new(0, a as u32 + 1)));
    }
    let degree_sum: u32 = degrees.iter().sum();
    let mut terms = Vec::new();
    for step in 0..=order.max_hbar_power().min(degree_sum / 2) {
        let weight = CoeffElement::hbar_pow(step).scale(&inverse_factorial(step));
        for matrix in enumerate_adjacency_by_degree(fs.len(), 2 * step)? {
            let alpha = matrix.row_sums();
            if alpha.iter().zip(&degrees).any(|(a, d)| a > d) {
                continue;
            }
            let coefficient = &weight * &amplitude(&matrix, &delta);
            if coefficient.is_zero() {
                continue;
            }
            terms.push(WickTerm { matrix, coefficient, alpha });
        }
    }
    Ok(WickTheoremExpansion { terms, order })
}

/// One term of the Wick-power form of the theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WickMonomialTerm {
    pub matrix: AdjacencyMatrix,
    /// Coefficient that reproduces the product, including `prod alpha_i!`.
    pub coefficient: CoeffElement,
    /// The coefficient with binomials `C(n_i, alpha_i)` only, without the
    /// `prod alpha_i!` factor.
    pub binomial_coefficient: CoeffElement,
    /// Remaining Wick-power degrees `n_i - alpha_i`.
    pub reduced: Vec<u32>,
}

/// Expands the Wick monomial of `spec` over `K''`-products of lower Wick
/// powers, where `second_family` names `K''`.
pub fn wick_monomial_expand(
    spec: &WickMonomialSpec,
    second_family: &str,
    order: TruncationOrder,
) -> Result<Vec<WickMonomialTerm>> {
    let d = spec.dim();
    let second = PropagatorMatrix::symbolic(second_family, d, true);
    let delta = spec.product().difference(&second)?;
    let mut out = Vec::new();
    for step in 0..=order.max_hbar_power().min(spec.total() / 2) {
        let weight = CoeffElement::hbar_pow(step).scale(&inverse_factorial(step));
        for matrix in enumerate_adjacency_by_degree(d as usize, 2 * step)? {
            let alpha = matrix.row_sums();
            if alpha.iter().zip(&spec.n).any(|(a, n)| a > n) {
                continue;
            }
            let base = &weight * &amplitude(&matrix, &delta);
            if base.is_zero() {
                continue;
            }
            let mut binomials = Rational::one();
            let mut alpha_factorials = Rational::one();
            for (&a, &n) in alpha.iter().zip(&spec.n) {
                binomials *= factorial(n) / (factorial(a) * factorial(n - a));
                alpha_factorials *= factorial(a);
            }
            let binomial_coefficient = base.scale(&binomials);
            let coefficient = binomial_coefficient.scale(&alpha_factorials);
            let reduced = alpha.iter().zip(&spec.n).map(|(a, n)| n - a).collect();
            out.push(WickMonomialTerm { matrix, coefficient, binomial_coefficient, reduced });
        }
    }
    Ok(out)
}

/// `sum c * (:x_1^r_1:_K *'' ... *'' :x_d^r_d:_K)` with `c` the full
/// coefficient or, when `binomial_only`, the binomial-only one.
pub fn reexpand_wick_monomial(
    terms: &[WickMonomialTerm],
    spec: &WickMonomialSpec,
    second_family: &str,
    order: TruncationOrder,
    binomial_only: bool,
) -> Result<Poly> {
    let ordering = spec.ordering();
    let second = PropagatorMatrix::symbolic(second_family, spec.dim(), true);
    let mut total = Poly::zero(spec.dim());
    for term in terms {
        let factors: Vec<Poly> = term
            .reduced
            .iter()
            .enumerate()
            .map(|(i, &r)| wick_power(i as u32 + 1, r, &ordering))
            .collect::<Result<_>>()?;
        let c = if binomial_only { &term.binomial_coefficient } else { &term.coefficient };
        total = &total + &star_multi(&factors, &second, order)?.scale(c);
    }
    Ok(total.truncate_hbar(order.max_hbar_power()))
}
