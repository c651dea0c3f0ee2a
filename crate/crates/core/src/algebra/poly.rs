use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::order::{grlex, merge_exponents};
use super::{power_factor, rational, write_term, CoeffElement, PropagatorSymbol, Rational, Scalar};
use crate::{Error, Result};

/// A variable `x_index` living in tensor block `block`.
///
/// Ordinary (non-tensor) polynomials use block 0 only. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub block: u32,
    pub index: u32,
}

impl Var {
    pub fn new(block: u32, index: u32) -> Self {
        Var { block, index }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.block == 0 {
            write!(f, "x{}", self.index)
        } else {
            write!(f, "x{}@{}", self.index, self.block)
        }
    }
}

/// A monomial in block-tagged variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VarMonomial {
    exps: Vec<(Var, u32)>,
}

impl VarMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(var: Var) -> Self {
        VarMonomial { exps: alloc::vec![(var, 1)] }
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in exps {
            *map.entry(v).or_insert(0) += e;
        }
        VarMonomial { exps: map.into_iter().filter(|(_, e)| *e > 0).collect() }
    }

    pub fn exponents(&self) -> &[(Var, u32)] {
        &self.exps
    }

    pub fn exponent(&self, var: Var) -> u32 {
        self.exps.binary_search_by(|(v, _)| v.cmp(&var)).map(|i| self.exps[i].1).unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &VarMonomial) -> VarMonomial {
        VarMonomial { exps: merge_exponents(&self.exps, &other.exps) }
    }

    /// `d/d var` of the monomial: the multiplicity and the lowered monomial.
    fn differentiate(&self, var: Var) -> Option<(u32, VarMonomial)> {
        let pos = self.exps.binary_search_by(|(v, _)| v.cmp(&var)).ok()?;
        let e = self.exps[pos].1;
        let mut exps = self.exps.clone();
        if e == 1 {
            exps.remove(pos);
        } else {
            exps[pos].1 = e - 1;
        }
        Some((e, VarMonomial { exps }))
    }

    fn map_vars(&self, f: impl Fn(Var) -> Var) -> VarMonomial {
        VarMonomial::from_exponents(self.exps.iter().map(|(v, e)| (f(*v), *e)))
    }

    fn factors(&self) -> Vec<String> {
        self.exps.iter().map(|(v, e)| power_factor(v, *e)).collect()
    }
}

impl Ord for VarMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grlex(&self.exps, &other.exps)
    }
}

impl PartialOrd for VarMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `x_1..x_d` (possibly split over tensor blocks) with
/// coefficients in `A[hbar]`.
///
/// Equality is equality of canonical forms. The std operators (`+`, `*`, ...)
/// panic on mismatched dimensions; the `checked_*` methods return an error
/// instead.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: u32,
    terms: BTreeMap<VarMonomial, CoeffElement>,
}

impl Poly {
    pub fn zero(dim: u32) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: u32) -> Self {
        Self::constant(dim, CoeffElement::one())
    }

    pub fn constant(dim: u32, c: CoeffElement) -> Self {
        Self::from_term(dim, VarMonomial::one(), c)
    }

    pub fn from_rational(dim: u32, r: Rational) -> Self {
        Self::constant(dim, CoeffElement::from_rational(r))
    }

    /// The coordinate `x_index` (block 0).
    pub fn var(dim: u32, index: u32) -> Result<Self> {
        Self::block_var(dim, 0, index)
    }

    /// The coordinate `x_index` in tensor block `block`.
    pub fn block_var(dim: u32, block: u32, index: u32) -> Result<Self> {
        check_index(index, dim)?;
        Ok(Self::from_term(dim, VarMonomial::var(Var::new(block, index)), CoeffElement::one()))
    }

    /// `x_index^exp` (block 0).
    pub fn var_pow(dim: u32, index: u32, exp: u32) -> Result<Self> {
        check_index(index, dim)?;
        Ok(Self::from_term(dim, VarMonomial::from_exponents([(Var::new(0, index), exp)]), CoeffElement::one()))
    }

    pub fn from_term(dim: u32, monomial: VarMonomial, c: CoeffElement) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(monomial, c);
        p
    }

    /// Builds a polynomial, checking that every variable index is in range.
    pub fn from_terms(dim: u32, terms: impl IntoIterator<Item = (VarMonomial, CoeffElement)>) -> Result<Self> {
        let mut p = Poly::zero(dim);
        for (m, c) in terms {
            for (v, _) in m.exponents() {
                check_index(v.index, dim)?;
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of (variable monomial, coefficient) pairs.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&VarMonomial, &CoeffElement)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &VarMonomial) -> CoeffElement {
        self.terms.get(monomial).cloned().unwrap_or_default()
    }

    /// The variable-free part.
    pub fn constant_term(&self) -> CoeffElement {
        self.coefficient(&VarMonomial::one())
    }

    /// Total degree in the variables; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(VarMonomial::degree).max().unwrap_or(0)
    }

    /// Largest exponent of `var` in any term.
    pub fn degree_in(&self, var: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn max_hbar(&self) -> u32 {
        self.terms.values().filter_map(CoeffElement::max_hbar).max().unwrap_or(0)
    }

    /// Tensor blocks present in some term.
    pub fn blocks(&self) -> BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.exps.iter().map(|(v, _)| v.block)).collect()
    }

    /// Whether every variable that occurs is `x_index`.
    pub fn depends_only_on(&self, index: u32) -> bool {
        self.terms.keys().all(|m| m.exps.iter().all(|(v, _)| v.index == index))
    }

    pub(crate) fn add_term(&mut self, monomial: VarMonomial, c: CoeffElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn same_dim(&self, other: &Poly) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { left: self.dim, right: other.dim })
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.checked_add(&-other)
    }

    /// Commutative ring product. Block tags are kept as they are.
    pub fn multiply(&self, other: &Poly) -> Result<Poly> {
        self.same_dim(other)?;
        let mut out = Poly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Tensor product of factors with disjoint block tags.
    pub fn tensor(&self, other: &Poly) -> Result<Poly> {
        self.same_dim(other)?;
        if let Some(b) = self.blocks().intersection(&other.blocks()).next() {
            return Err(Error::BlockCollision(*b));
        }
        self.multiply(other)
    }

    pub fn scale(&self, c: &CoeffElement) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, own) in &self.terms {
            out.add_term(m.clone(), own * c);
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Poly {
        if r.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly { dim: self.dim, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(r))).collect() }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut acc = Poly::one(self.dim);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// `d/dx_index` acting on tensor block `block` only; coefficients are
    /// constants.
    pub fn partial_derivative(&self, block: u32, index: u32) -> Result<Poly> {
        check_index(index, self.dim)?;
        Ok(self.differentiate(Var::new(block, index)))
    }

    /// The tensor derivation: `d/dx_index` summed over every block.
    pub fn tensor_partial(&self, index: u32) -> Result<Poly> {
        check_index(index, self.dim)?;
        let mut out = Poly::zero(self.dim);
        for block in self.blocks() {
            out = &out + &self.differentiate(Var::new(block, index));
        }
        Ok(out)
    }

    /// `d/dx_index` summed over the given blocks.
    pub fn partial_in_blocks(&self, blocks: &BTreeSet<u32>, index: u32) -> Result<Poly> {
        check_index(index, self.dim)?;
        let mut out = Poly::zero(self.dim);
        for &block in blocks {
            out = &out + &self.differentiate(Var::new(block, index));
        }
        Ok(out)
    }

    pub(crate) fn differentiate(&self, var: Var) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.differentiate(var) {
                out.add_term(lowered, c.scale(&rational(i64::from(e))));
            }
        }
        out
    }

    /// Repeated derivative: `exps[k]` derivatives in `x_{k+1}` of `block`.
    pub(crate) fn differentiate_multi(&self, block: u32, exps: &[u32]) -> Poly {
        let mut out = self.clone();
        for (k, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                if out.is_zero() {
                    return out;
                }
                out = out.differentiate(Var::new(block, k as u32 + 1));
            }
        }
        out
    }

    /// The pointwise multiplication map: erases block tags, identifying
    /// `x_i` across blocks.
    pub fn merge_blocks(&self) -> Poly {
        self.retag(0)
    }

    /// Moves every variable into `block`.
    pub fn retag(&self, block: u32) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(|v| Var::new(block, v.index)), c.clone());
        }
        out
    }

    /// Drops every term whose `hbar` exponent exceeds `order`.
    pub fn truncate_hbar(&self, order: u32) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.truncate_hbar(order));
        }
        out
    }

    /// The `hbar`-free polynomial multiplying `hbar^k`.
    pub fn hbar_coefficient(&self, k: u32) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.hbar_coefficient(k));
        }
        out
    }

    /// Replaces propagator symbols by elements of `A[hbar]`.
    pub fn map_coefficients(&self, mut image: impl FnMut(&PropagatorSymbol) -> CoeffElement) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.map_symbols(&mut image));
        }
        out
    }

    /// All propagator symbols appearing in coefficients.
    pub fn symbols(&self) -> BTreeSet<&PropagatorSymbol> {
        self.terms.values().flat_map(CoeffElement::symbols).collect()
    }

    /// Evaluates into a [`Scalar`]: `hbar`, each variable and each symbol
    /// receive values from the arguments.
    pub fn evaluate<S: Scalar>(
        &self,
        hbar: &S,
        mut var: impl FnMut(Var) -> Result<S>,
        mut symbol: impl FnMut(&PropagatorSymbol) -> Result<S>,
    ) -> Result<S> {
        let mut total = S::zero();
        for (m, c) in &self.terms {
            let mut value = c.evaluate(hbar, &mut symbol)?;
            for (v, e) in &m.exps {
                value = value * var(*v)?.pow_u32(*e);
            }
            total = total + value;
        }
        Ok(total)
    }
}

fn check_index(index: u32, dim: u32) -> Result<()> {
    if index == 0 || index > dim {
        Err(Error::IndexOutOfRange { index, dim })
    } else {
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn add(self, rhs: &'a Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial dimensions differ")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn sub(self, rhs: &'a Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial dimensions differ")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;

    fn mul(self, rhs: &'a Poly) -> Poly {
        self.multiply(rhs).expect("polynomial dimensions differ")
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly { dim: self.dim, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    /// Canonical text: one term per (coefficient monomial, variable
    /// monomial) pair, descending in the variable order first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let var_factors = m.factors();
            for (cm, r) in c.monomials_desc() {
                let mut factors = cm.factors();
                factors.extend(var_factors.iter().cloned());
                write_term(f, first, r, &factors)?;
                first = false;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use alloc::string::ToString;

    fn x(i: u32) -> Poly {
        Poly::var(2, i).unwrap()
    }

    fn bx(block: u32, i: u32) -> Poly {
        Poly::block_var(2, block, i).unwrap()
    }

    fn k12() -> CoeffElement {
        CoeffElement::symbol(PropagatorSymbol::new("K", 1, 2))
    }

    #[test]
    fn power_rule() {
        let p = &(&x(1) * &x(1)) * &x(2);
        let expected = (&x(1) * &x(2)).scale_rational(&rational(2));
        assert_eq!(p.partial_derivative(0, 1).unwrap(), expected);
    }

    #[test]
    fn constants_are_annihilated() {
        let c = Poly::constant(2, k12());
        assert!(c.partial_derivative(0, 2).unwrap().is_zero());
    }

    #[test]
    fn derivative_index_is_checked() {
        assert_eq!(x(1).partial_derivative(0, 3), Err(Error::IndexOutOfRange { index: 3, dim: 2 }));
        assert!(x(1).partial_derivative(0, 0).is_err());
    }

    #[test]
    fn tensor_derivation_sums_over_blocks() {
        let t = bx(1, 1).tensor(&bx(2, 1)).unwrap();
        let expected = &bx(2, 1) + &bx(1, 1);
        assert_eq!(t.tensor_partial(1).unwrap(), expected);
    }

    #[test]
    fn multiply_examples() {
        let one = Poly::one(2);
        let p = &(&x(1) + &one) * &(&x(1) - &one);
        assert_eq!(p, &(&x(1) * &x(1)) - &one);

        let q = x(1).scale(&(&CoeffElement::hbar_pow(1) * &k12()));
        assert_eq!((&q * &x(2)).to_string(), "hbar*K[K;1,2]*x1*x2");
        assert!((&p * &Poly::zero(2)).is_zero());
        assert!(x(1).multiply(&Poly::var(3, 1).unwrap()).is_err());
    }

    #[test]
    fn merge_examples() {
        assert_eq!(bx(1, 1).tensor(&bx(2, 1)).unwrap().merge_blocks(), &x(1) * &x(1));
        assert_eq!(bx(1, 1).tensor(&bx(2, 2)).unwrap().merge_blocks(), &x(1) * &x(2));
        let p = (&bx(1, 1) + &Poly::one(2)).tensor(&Poly::one(2)).unwrap();
        assert_eq!(p.merge_blocks(), &x(1) + &Poly::one(2));
    }

    #[test]
    fn tensor_rejects_shared_blocks() {
        assert_eq!(bx(1, 1).tensor(&bx(1, 2)), Err(Error::BlockCollision(1)));
    }

    #[test]
    fn display_orders_terms() {
        let one = Poly::one(2);
        let p = (&x(1) + &one).pow(2);
        assert_eq!(p.to_string(), "x1^2 + 2*x1 + 1");
        let q = &x(2).scale_rational(&ratio(-1, 2)) + &x(1);
        assert_eq!(q.to_string(), "x1 - 1/2*x2");
        assert_eq!((-&x(1)).to_string(), "-x1");
        assert_eq!(Poly::zero(1).to_string(), "0");
    }

    #[test]
    fn hbar_truncation_and_coefficients() {
        let p = &Poly::constant(2, CoeffElement::hbar_pow(2)) + &x(1);
        assert_eq!(p.truncate_hbar(1), x(1));
        assert_eq!(p.hbar_coefficient(2), Poly::one(2));
        assert_eq!(p.max_hbar(), 2);
    }
}
