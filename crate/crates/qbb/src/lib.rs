//! Exact computer algebra for quantum Borcherds-Bozec algebras.
//!
//! The scalar and linear-algebra layers are generic over the coefficient
//! field; the algebraic layers work over [`Scalar`], rational functions in
//! `q` with coefficients in a multiquadratic extension of the rationals.

pub mod ambient;
pub mod cartan;
pub mod combinat;
pub mod crystal;
pub mod error;
pub mod free_algebra;
pub mod global_basis;
pub mod highest_weight;
pub mod linalg;
pub mod memo;
pub mod scalar;
pub mod suites;
pub mod uminus;

pub use cartan::{BorcherdsCartanDatum, DominantWeight, IndexKind, RootVector};
pub use error::{Error, Result};
pub use linalg::{Echelon, Matrix};

/// Coefficient field: rationals extended by square roots.
pub type Coeff = scalar::RadicalRational;
/// Laurent polynomials over [`Coeff`].
pub type Laurent = scalar::LaurentPolynomial<Coeff>;
/// Rational functions in `q` over [`Coeff`]; every coefficient in the library lives here.
pub type Scalar = scalar::RationalFunction<Coeff>;
/// Exact rationals.
pub type Rational = num_rational::BigRational;
