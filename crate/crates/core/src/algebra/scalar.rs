use num_traits::{Num, ToPrimitive};

use super::Rational;

/// Numbers that symbolic results can be evaluated into.
pub trait Scalar: Num + Clone + core::fmt::Debug {
    fn from_rational(value: &Rational) -> Self;

    fn pow_u32(&self, exp: u32) -> Self {
        num_traits::pow::pow(self.clone(), exp as usize)
    }
}

impl Scalar for Rational {
    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }
}

impl Scalar for f64 {
    fn from_rational(value: &Rational) -> Self {
        value.to_f64().unwrap_or(f64::NAN)
    }
}
