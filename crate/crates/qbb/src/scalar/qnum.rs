use super::{Coefficient, LaurentPolynomial, RationalFunction};
use crate::error::{Error, Result};

/// `[n]_{q^r} = (q^{rn} − q^{−rn}) / (q^r − q^{−r})`, for any integer `n`.
pub fn q_integer<C: Coefficient>(n: i64, r: i64) -> LaurentPolynomial<C> {
    let m = n.abs();
    let p = LaurentPolynomial::from_map((0..m).map(|k| (r * (m - 1 - 2 * k), C::one())));
    if n < 0 {
        -p
    } else {
        p
    }
}

/// `[n]_{q^r}! = [1][2]…[n]`.
pub fn q_factorial<C: Coefficient>(n: u32, r: i64) -> LaurentPolynomial<C> {
    (1..=n as i64).fold(LaurentPolynomial::one_poly(), |acc, k| &acc * &q_integer(k, r))
}

/// Generalized q-binomial `∏_{s=1..k} [n+1−s] / [k]!` with `q_i = q^r`.
pub fn qbinom<C: Coefficient>(n: i64, k: i64, r: i64) -> Result<RationalFunction<C>> {
    if k < 0 {
        return Err(Error::InvalidArgument(format!("q-binomial with negative k = {k}")));
    }
    let top = (1..=k).fold(LaurentPolynomial::one_poly(), |acc, s| &acc * &q_integer(n + 1 - s, r));
    let bottom = q_factorial::<C>(k as u32, r);
    RationalFunction::new(top, bottom)
}

impl<C: Coefficient> LaurentPolynomial<C> {
    pub(crate) fn one_poly() -> Self {
        Self::constant(C::one())
    }
}
