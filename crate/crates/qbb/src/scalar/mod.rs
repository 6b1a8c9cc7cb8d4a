//! Exact scalars: the coefficient field, Laurent polynomials and rational functions in `q`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

mod laurent;
pub(crate) mod parse;
mod qnum;
mod radical;
mod ratfunc;

pub use laurent::LaurentPolynomial;
pub(crate) use laurent::poly;
pub use parse::{parse_rational_function, ParseError};
pub use qnum::{q_factorial, q_integer, qbinom};
pub use radical::{is_squarefree, RadicalRational};
pub use ratfunc::RationalFunction;

/// A commutative field with exact equality.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// Rough size of the value, used to choose cheap pivots.
    fn cost(&self) -> usize {
        1
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|o| self.clone() * o)
    }
}

/// Coefficient fields for polynomials in `q`.
pub trait Coefficient: Field + Ord + std::hash::Hash {
    fn from_rational(r: BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Square root of a nonnegative rational, if it lies in this field.
    fn sqrt_rational(r: &BigRational) -> Option<Self>;

    /// The rational value, if the element is rational.
    fn to_rational(&self) -> Option<BigRational>;

    /// Least common multiple of the denominators of the rational parts.
    fn denominator_lcm(&self) -> BigInt;

    /// Gcd of the numerators of the rational parts, after scaling to integers.
    fn numerator_gcd(&self) -> BigInt;

    /// Multiply by a rational number.
    fn scale(&self, r: &BigRational) -> Self;

    /// Number of additive terms when printed.
    fn term_count(&self) -> usize;

    /// Sign of the leading rational part (used for canonical printing).
    fn is_negative_leading(&self) -> bool;
}

impl Field for BigRational {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn cost(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize / 64 + 1
    }
}

impl Coefficient for BigRational {
    fn from_rational(r: BigRational) -> Self {
        r
    }

    fn sqrt_rational(r: &BigRational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        let n = r.numer().sqrt();
        let d = r.denom().sqrt();
        if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn denominator_lcm(&self) -> BigInt {
        self.denom().clone()
    }

    fn numerator_gcd(&self) -> BigInt {
        self.numer().abs()
    }

    fn scale(&self, r: &BigRational) -> Self {
        self * r
    }

    fn term_count(&self) -> usize {
        1
    }

    fn is_negative_leading(&self) -> bool {
        self.is_negative()
    }
}

/// Exact rational number.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Prints a rational as `n` or `n/d`.
pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
