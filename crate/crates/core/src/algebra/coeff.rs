use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::order::{grlex, merge_exponents};
use super::{power_factor, write_term, Rational, Scalar};
use crate::{Error, Result};

/// An abstract propagator entry `K[family;row,col]`.
///
/// Symbols compare by `(family, row, col)`. `K[f;i,j]` and `K[f;j,i]` are
/// distinct unless built through [`PropagatorSymbol::symmetric`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropagatorSymbol {
    family: String,
    row: u32,
    col: u32,
}

impl PropagatorSymbol {
    pub fn new(family: impl Into<String>, row: u32, col: u32) -> Self {
        PropagatorSymbol { family: family.into(), row, col }
    }

    /// Symbol of a symmetric family: indices are stored as `(min, max)`.
    pub fn symmetric(family: impl Into<String>, row: u32, col: u32) -> Self {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        Self::new(family, row, col)
    }

    /// Like [`PropagatorSymbol::new`] but checks `1 <= row, col <= dim`.
    pub fn checked(family: impl Into<String>, row: u32, col: u32, dim: u32) -> Result<Self> {
        for index in [row, col] {
            if index == 0 || index > dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        Ok(Self::new(family, row, col))
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn row(&self) -> u32 {
        self.row
    }

    pub fn col(&self) -> u32 {
        self.col
    }
}

impl fmt::Display for PropagatorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K[{};{},{}]", self.family, self.row, self.col)
    }
}

/// `hbar^k` times a product of propagator symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoeffMonomial {
    hbar: u32,
    symbols: Vec<(PropagatorSymbol, u32)>,
}

impl CoeffMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn hbar(exp: u32) -> Self {
        CoeffMonomial { hbar: exp, symbols: Vec::new() }
    }

    pub fn symbol(symbol: PropagatorSymbol) -> Self {
        CoeffMonomial { hbar: 0, symbols: alloc::vec![(symbol, 1)] }
    }

    /// Builds a monomial from arbitrary (possibly repeated, possibly zero)
    /// symbol exponents.
    pub fn from_parts(hbar: u32, symbols: impl IntoIterator<Item = (PropagatorSymbol, u32)>) -> Self {
        let mut map: BTreeMap<PropagatorSymbol, u32> = BTreeMap::new();
        for (s, e) in symbols {
            *map.entry(s).or_insert(0) += e;
        }
        CoeffMonomial { hbar, symbols: map.into_iter().filter(|(_, e)| *e > 0).collect() }
    }

    pub fn hbar_exp(&self) -> u32 {
        self.hbar
    }

    pub fn symbols(&self) -> &[(PropagatorSymbol, u32)] {
        &self.symbols
    }

    pub fn is_one(&self) -> bool {
        self.hbar == 0 && self.symbols.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.hbar + self.symbols.iter().map(|(_, e)| e).sum::<u32>()
    }

    pub fn mul(&self, other: &CoeffMonomial) -> CoeffMonomial {
        CoeffMonomial { hbar: self.hbar + other.hbar, symbols: merge_exponents(&self.symbols, &other.symbols) }
    }

    pub(crate) fn without_hbar(&self) -> CoeffMonomial {
        CoeffMonomial { hbar: 0, symbols: self.symbols.clone() }
    }

    pub(crate) fn factors(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.symbols.len() + 1);
        if self.hbar > 0 {
            out.push(power_factor(&"hbar", self.hbar));
        }
        for (s, e) in &self.symbols {
            out.push(power_factor(s, *e));
        }
        out
    }
}

impl Ord for CoeffMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // hbar is the most significant variable of the graded order.
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.hbar.cmp(&other.hbar))
            .then_with(|| grlex(&self.symbols, &other.symbols))
    }
}

impl PartialOrd for CoeffMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of `A[hbar]`: a finite rational combination of
/// [`CoeffMonomial`]s in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoeffElement {
    terms: BTreeMap<CoeffMonomial, Rational>,
}

impl CoeffElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(value: Rational) -> Self {
        Self::from_term(CoeffMonomial::one(), value)
    }

    pub fn from_integer(value: i64) -> Self {
        Self::from_rational(super::rational(value))
    }

    pub fn from_term(monomial: CoeffMonomial, value: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(monomial, value);
        }
        CoeffElement { terms }
    }

    pub fn symbol(symbol: PropagatorSymbol) -> Self {
        Self::from_term(CoeffMonomial::symbol(symbol), Rational::one())
    }

    pub fn hbar_pow(exp: u32) -> Self {
        Self::from_term(CoeffMonomial::hbar(exp), Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (CoeffMonomial, Rational)>) -> Self {
        let mut out = CoeffElement::zero();
        for (m, r) in terms {
            out.add_term(m, r);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|(m, r)| m.is_one() && r.is_one())
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&CoeffMonomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the constant monomial, if `self` is a bare rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.iter().next().filter(|(m, _)| m.is_one()).map(|(_, r)| r.clone()),
            _ => None,
        }
    }

    pub fn coefficient_of(&self, monomial: &CoeffMonomial) -> Rational {
        self.terms.get(monomial).cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn add_term(&mut self, monomial: CoeffMonomial, value: Rational) {
        if value.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(value);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += value;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, factor: &Rational) -> CoeffElement {
        if factor.is_zero() {
            return CoeffElement::zero();
        }
        CoeffElement { terms: self.terms.iter().map(|(m, r)| (m.clone(), r * factor)).collect() }
    }

    pub fn mul_monomial(&self, monomial: &CoeffMonomial) -> CoeffElement {
        CoeffElement { terms: self.terms.iter().map(|(m, r)| (m.mul(monomial), r.clone())).collect() }
    }

    pub fn pow(&self, exp: u32) -> CoeffElement {
        let mut acc = CoeffElement::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Largest power of `hbar` present, `None` for zero.
    pub fn max_hbar(&self) -> Option<u32> {
        self.terms.keys().map(CoeffMonomial::hbar_exp).max()
    }

    /// Drops every term with `hbar` exponent above `order`.
    pub fn truncate_hbar(&self, order: u32) -> CoeffElement {
        CoeffElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.hbar_exp() <= order)
                .map(|(m, r)| (m.clone(), r.clone()))
                .collect(),
        }
    }

    /// The `hbar`-free coefficient of `hbar^k`.
    pub fn hbar_coefficient(&self, k: u32) -> CoeffElement {
        CoeffElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.hbar_exp() == k)
                .map(|(m, r)| (m.without_hbar(), r.clone()))
                .collect(),
        }
    }

    /// All symbols appearing in `self`.
    pub fn symbols(&self) -> impl Iterator<Item = &PropagatorSymbol> {
        self.terms.keys().flat_map(|m| m.symbols.iter().map(|(s, _)| s))
    }

    /// Exact evaluation under a symbol assignment and a value for `hbar`.
    pub fn substitute(&self, assignment: &BTreeMap<PropagatorSymbol, Rational>, hbar: &Rational) -> Result<Rational> {
        self.evaluate(hbar, |s| assignment.get(s).cloned().ok_or_else(|| Error::MissingAssignment(s.clone())))
    }

    /// Evaluates into any [`Scalar`], resolving symbols through `lookup`.
    pub fn evaluate<S: Scalar>(&self, hbar: &S, mut lookup: impl FnMut(&PropagatorSymbol) -> Result<S>) -> Result<S> {
        let mut total = S::zero();
        for (m, r) in &self.terms {
            let mut value = S::from_rational(r) * hbar.pow_u32(m.hbar);
            for (s, e) in &m.symbols {
                value = value * lookup(s)?.pow_u32(*e);
            }
            total = total + value;
        }
        Ok(total)
    }

    /// Replaces every symbol by an element of `A[hbar]`.
    pub fn map_symbols(&self, mut image: impl FnMut(&PropagatorSymbol) -> CoeffElement) -> CoeffElement {
        let mut out = CoeffElement::zero();
        for (m, r) in &self.terms {
            let mut value = CoeffElement::from_term(CoeffMonomial::hbar(m.hbar), r.clone());
            for (s, e) in &m.symbols {
                value = &value * &image(s).pow(*e);
            }
            out = &out + &value;
        }
        out
    }

    pub(crate) fn monomials_desc(&self) -> impl Iterator<Item = (&CoeffMonomial, &Rational)> {
        self.terms.iter().rev()
    }
}

impl From<Rational> for CoeffElement {
    fn from(value: Rational) -> Self {
        CoeffElement::from_rational(value)
    }
}

impl From<PropagatorSymbol> for CoeffElement {
    fn from(value: PropagatorSymbol) -> Self {
        CoeffElement::symbol(value)
    }
}

impl<'a> Add<&'a CoeffElement> for &'a CoeffElement {
    type Output = CoeffElement;

    fn add(self, rhs: &'a CoeffElement) -> CoeffElement {
        let mut out = self.clone();
        for (m, r) in &rhs.terms {
            out.add_term(m.clone(), r.clone());
        }
        out
    }
}

impl<'a> Sub<&'a CoeffElement> for &'a CoeffElement {
    type Output = CoeffElement;

    fn sub(self, rhs: &'a CoeffElement) -> CoeffElement {
        let mut out = self.clone();
        for (m, r) in &rhs.terms {
            out.add_term(m.clone(), -r.clone());
        }
        out
    }
}

impl<'a> Mul<&'a CoeffElement> for &'a CoeffElement {
    type Output = CoeffElement;

    fn mul(self, rhs: &'a CoeffElement) -> CoeffElement {
        let mut out = CoeffElement::zero();
        for (ma, ra) in &self.terms {
            for (mb, rb) in &rhs.terms {
                out.add_term(ma.mul(mb), ra * rb);
            }
        }
        out
    }
}

impl Neg for &CoeffElement {
    type Output = CoeffElement;

    fn neg(self) -> CoeffElement {
        CoeffElement { terms: self.terms.iter().map(|(m, r)| (m.clone(), -r.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $method:ident),*) => {$(
        impl $tr<CoeffElement> for CoeffElement {
            type Output = CoeffElement;
            fn $method(self, rhs: CoeffElement) -> CoeffElement {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for CoeffElement {
    type Output = CoeffElement;

    fn neg(self) -> CoeffElement {
        -&self
    }
}

impl fmt::Display for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, r)) in self.monomials_desc().enumerate() {
            write_term(f, i == 0, r, &m.factors())?;
        }
        Ok(())
    }
}

impl fmt::Display for CoeffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors = self.factors();
        if factors.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&factors.join("*"))
    }
}
