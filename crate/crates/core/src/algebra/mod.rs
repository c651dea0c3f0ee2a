//! The coefficient algebra `A[hbar]` and polynomials over it.
//!
//! `A` is the free commutative algebra on propagator symbols `K[f;i,j]`;
//! `hbar` is carried as a separate exponent so that truncation is a filter on
//! one integer. Variables carry a block tag, so the tensor factors of a
//! tensor-form product are simply disjoint tag sets inside one polynomial.

mod coeff;
mod order;
mod poly;
mod scalar;

pub use coeff::{CoeffElement, CoeffMonomial, PropagatorSymbol};
pub use poly::{Poly, Var, VarMonomial};
pub use scalar::Scalar;

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;

/// `n` as a rational.
pub fn rational(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `num/den` as a rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// `n!` as a rational.
pub(crate) fn factorial(n: u32) -> Rational {
    let mut acc = num_bigint::BigInt::from(1u32);
    for k in 2..=n {
        acc *= k;
    }
    Rational::from_integer(acc)
}

pub(crate) fn write_term(
    f: &mut core::fmt::Formatter<'_>,
    first: bool,
    coeff: &Rational,
    factors: &[alloc::string::String],
) -> core::fmt::Result {
    use num_traits::{One, Signed};
    let negative = coeff.is_negative();
    match (first, negative) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    let magnitude = coeff.abs();
    let mut need_star = false;
    if factors.is_empty() || !magnitude.is_one() {
        write!(f, "{magnitude}")?;
        need_star = true;
    }
    for factor in factors {
        if need_star {
            f.write_str("*")?;
        }
        f.write_str(factor)?;
        need_star = true;
    }
    Ok(())
}

pub(crate) fn power_factor(base: &dyn core::fmt::Display, exp: u32) -> alloc::string::String {
    if exp == 1 {
        alloc::format!("{base}")
    } else {
        alloc::format!("{base}^{exp}")
    }
}
