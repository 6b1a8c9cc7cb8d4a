use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::laurent::poly;
use super::{Coefficient, Field, LaurentPolynomial};
use crate::error::{Error, Result};

/// A rational function `num / den` in `q`.
///
/// `den` is a polynomial with constant term 1, coprime to `num`; every power
/// of `q` lives in `num`. This form is canonical.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction<C> {
    num: LaurentPolynomial<C>,
    den: Vec<C>,
}

impl<C: Coefficient> Hash for RationalFunction<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl<C: Coefficient> Default for RationalFunction<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> From<LaurentPolynomial<C>> for RationalFunction<C> {
    fn from(p: LaurentPolynomial<C>) -> Self {
        Self { num: p, den: vec![C::one()] }
    }
}

impl<C: Coefficient> RationalFunction<C> {
    /// Builds `num / den`; fails if `den` is zero.
    pub fn new(num: LaurentPolynomial<C>, den: LaurentPolynomial<C>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let shift = num.low() - den.low();
        Ok(Self::from_polys(shift, num.coeffs(), den.coeffs()))
    }

    /// `q^shift · n(q) / d(q)` for polynomials `n`, `d` with nonzero constant terms.
    fn from_polys(shift: i64, n: &[C], d: &[C]) -> Self {
        let (n, d) = if d.len() == 1 {
            (n.to_vec(), d.to_vec())
        } else {
            let g = poly::gcd(n, d);
            if g.len() > 1 {
                (poly::exact_div(n, &g), poly::exact_div(d, &g))
            } else {
                (n.to_vec(), d.to_vec())
            }
        };
        let c = d[0].inv().expect("denominator constant term vanished");
        let den: Vec<C> = d.into_iter().map(|x| x * c.clone()).collect();
        let num = LaurentPolynomial::new(shift, n.into_iter().map(|x| x * c.clone()).collect());
        Self { num, den }
    }

    /// `Σ_t Π_{x ∈ t} x`, reduced once at the end instead of after every operation.
    pub fn sum_of_products<'a, I, P>(terms: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: IntoIterator<Item = &'a Self>,
    {
        let mut groups: HashMap<Vec<C>, LaurentPolynomial<C>> = HashMap::new();
        for t in terms {
            let mut num = LaurentPolynomial::constant(C::one());
            let mut den = vec![C::one()];
            for x in t {
                if x.num.is_zero() {
                    num = LaurentPolynomial::zero();
                    break;
                }
                num = &num * &x.num;
                if x.den.len() > 1 {
                    den = poly::mul(&den, &x.den);
                }
            }
            if num.is_zero() {
                continue;
            }
            let e = groups.entry(den).or_insert_with(LaurentPolynomial::zero);
            *e = &*e + &num;
        }
        let mut groups: Vec<(Vec<C>, LaurentPolynomial<C>)> = groups.into_iter().filter(|(_, n)| !n.is_zero()).collect();
        groups.sort_by(|a, b| a.0.cmp(&b.0));
        let mut acc_den = vec![C::one()];
        let mut acc_num = LaurentPolynomial::zero();
        for (d, n) in groups {
            let g = poly::gcd(&acc_den, &d);
            let da = poly::exact_div(&acc_den, &g);
            let db = poly::exact_div(&d, &g);
            acc_num = &(&acc_num * &LaurentPolynomial::new(0, db.clone())) + &(&n * &LaurentPolynomial::new(0, da));
            acc_den = poly::mul(&acc_den, &db);
        }
        if acc_num.is_zero() {
            return Self::zero();
        }
        Self::from_polys(acc_num.low(), acc_num.coeffs(), &acc_den)
    }

    /// Normalizes a pair of Laurent polynomials whose exponents may be arbitrary.
    fn normalize(num: LaurentPolynomial<C>, den: LaurentPolynomial<C>) -> Self {
        Self::new(num, den).expect("zero denominator")
    }

    pub fn constant(c: C) -> Self {
        LaurentPolynomial::constant(c).into()
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(C::from_int(n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::constant(C::from_rational(r))
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        LaurentPolynomial::q_pow(e).into()
    }

    pub fn num(&self) -> &LaurentPolynomial<C> {
        &self.num
    }

    /// Denominator polynomial coefficients, constant term first (always 1).
    pub fn den(&self) -> &[C] {
        &self.den
    }

    pub fn is_laurent(&self) -> bool {
        self.den.len() == 1
    }

    pub fn as_laurent(&self) -> Option<&LaurentPolynomial<C>> {
        self.is_laurent().then_some(&self.num)
    }

    pub fn den_poly(&self) -> LaurentPolynomial<C> {
        LaurentPolynomial::new(0, self.den.clone())
    }

    /// Order of vanishing at `q = 0` (`None` for zero).
    pub fn ord0(&self) -> Option<i64> {
        self.num.order()
    }

    /// Degree at infinity, `deg num − deg den` (`None` for zero). Regular at ∞ iff ≤ 0.
    pub fn deg_inf(&self) -> Option<i64> {
        self.num.degree().map(|d| d - (self.den.len() as i64 - 1))
    }

    pub fn is_regular_at_zero(&self) -> bool {
        self.ord0().is_none_or(|o| o >= 0)
    }

    pub fn is_regular_at_infinity(&self) -> bool {
        self.deg_inf().is_none_or(|d| d <= 0)
    }

    /// Value at `q = 0`.
    pub fn value_at_zero(&self) -> Result<C> {
        match self.ord0() {
            None => Ok(C::zero()),
            Some(o) if o < 0 => Err(Error::NotRegularAtZero(self.to_string())),
            Some(0) => Ok(self.num.coeff(0)),
            Some(_) => Ok(C::zero()),
        }
    }

    /// Value at `q = ∞`.
    pub fn value_at_infinity(&self) -> Result<C> {
        self.bar().value_at_zero()
    }

    /// Substitution `q ↦ q⁻¹`.
    pub fn bar(&self) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let dd = self.den.len() as i64 - 1;
        let num = self.num.bar();
        if dd == 0 {
            return num.into();
        }
        let rev: Vec<C> = self.den.iter().rev().cloned().collect();
        let c = rev[0].inv().unwrap();
        let den: Vec<C> = rev.into_iter().map(|x| x * c.clone()).collect();
        Self { num: num.shift(dd).scale(&c), den }
    }

    /// Laurent expansion at `q = 0`: coefficients of `q^e` for `e` in `lo..=hi`.
    pub fn series_at_zero(&self, lo: i64, hi: i64) -> Vec<C> {
        if hi < lo {
            return Vec::new();
        }
        let n = (hi - lo + 1) as usize;
        if self.num.is_zero() {
            return vec![C::zero(); n];
        }
        let ord = self.num.low();
        if hi < ord {
            return vec![C::zero(); n];
        }
        // power series of 1/den up to degree hi - ord
        let len = (hi - ord + 1) as usize;
        let mut inv = vec![C::zero(); len];
        inv[0] = C::one();
        for k in 1..len {
            let mut s = C::zero();
            for j in 1..=k.min(self.den.len() - 1) {
                s = s + self.den[j].clone() * inv[k - j].clone();
            }
            inv[k] = -s;
        }
        let num = self.num.coeffs();
        (0..n)
            .map(|t| {
                let e = lo + t as i64;
                if e < ord {
                    return C::zero();
                }
                let k = (e - ord) as usize;
                let mut s = C::zero();
                for (a, na) in num.iter().enumerate().take(k + 1) {
                    if !na.is_zero() {
                        s = s + na.clone() * inv[k - a].clone();
                    }
                }
                s
            })
            .collect()
    }

    /// The principal part at `q = 0`: coefficients of `q^e` for `e` in `ord0..0`.
    pub fn principal_part_at_zero(&self) -> Vec<(i64, C)> {
        match self.ord0() {
            Some(o) if o < 0 => {
                let s = self.series_at_zero(o, -1);
                (o..0).zip(s).filter(|(_, c)| !c.is_zero()).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.try_inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(LaurentPolynomial::new(0, self.den.clone()), self.num.clone()))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.try_inv()?)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn shift(&self, e: i64) -> Self {
        Self { num: self.num.shift(e), den: self.den.clone() }
    }

    /// Canonical text form: integer-coefficient numerator and denominator,
    /// jointly primitive, with positive denominator constant term.
    pub fn to_canonical_string(&self) -> String {
        if self.is_laurent() {
            let l = self.num.denominator_lcm();
            if l.is_one() {
                return self.num.to_canonical_string();
            }
        }
        let den = LaurentPolynomial::new(0, self.den.clone());
        let l = self.num.denominator_lcm().lcm(&den.denominator_lcm());
        let lr = BigRational::from_integer(l);
        let n = self.num.scale_rational(&lr);
        let d = den.scale_rational(&lr);
        let g = n.numerator_gcd().gcd(&d.numerator_gcd());
        let gr = BigRational::new(BigInt::one(), g.abs());
        let n = n.scale_rational(&gr);
        let d = d.scale_rational(&gr);
        if d.is_constant() && d.coeff(0).to_rational().is_some_and(|r| r.is_one()) {
            return n.to_canonical_string();
        }
        format!("({})/({})", n.to_canonical_string(), d.to_canonical_string())
    }
}

impl<'a, C: Coefficient> Add<&'a RationalFunction<C>> for &'a RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn add(self, o: &RationalFunction<C>) -> RationalFunction<C> {
        if o.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return o.clone();
        }
        if self.is_laurent() && o.is_laurent() {
            return (&self.num + &o.num).into();
        }
        if self.den == o.den {
            let num = &self.num + &o.num;
            if num.is_zero() {
                return RationalFunction::zero();
            }
            let shift = num.low();
            return RationalFunction::from_polys(shift, num.coeffs(), &self.den);
        }
        let g = poly::gcd(&self.den, &o.den);
        let da = poly::exact_div(&self.den, &g);
        let db = poly::exact_div(&o.den, &g);
        let na = &self.num * &LaurentPolynomial::new(0, db.clone());
        let nb = &o.num * &LaurentPolynomial::new(0, da.clone());
        let num = &na + &nb;
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let den = poly::mul(&da, &o.den);
        RationalFunction::from_polys(num.low(), num.coeffs(), &den)
    }
}

impl<'a, C: Coefficient> Mul<&'a RationalFunction<C>> for &'a RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn mul(self, o: &RationalFunction<C>) -> RationalFunction<C> {
        if self.num.is_zero() || o.num.is_zero() {
            return RationalFunction::zero();
        }
        if self.is_laurent() && o.is_laurent() {
            return (&self.num * &o.num).into();
        }
        let num = &self.num * &o.num;
        let den = poly::mul(&self.den, &o.den);
        RationalFunction::from_polys(num.low(), num.coeffs(), &den)
    }
}

impl<C: Coefficient> Neg for &RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn neg(self) -> RationalFunction<C> {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a, C: Coefficient> Sub<&'a RationalFunction<C>> for &'a RationalFunction<C> {
    type Output = RationalFunction<C>;
    fn sub(self, o: &RationalFunction<C>) -> RationalFunction<C> {
        self + &(-o)
    }
}

impl<C: Coefficient> Add for RationalFunction<C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl<C: Coefficient> Sub for RationalFunction<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl<C: Coefficient> Mul for RationalFunction<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<C: Coefficient> Neg for RationalFunction<C> {
    type Output = Self;
    fn neg(self) -> Self {
        -&self
    }
}

impl<C: Coefficient> Zero for RationalFunction<C> {
    fn zero() -> Self {
        Self { num: LaurentPolynomial::zero(), den: vec![C::one()] }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<C: Coefficient> One for RationalFunction<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<C: Coefficient> Field for RationalFunction<C> {
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }

    fn cost(&self) -> usize {
        let c: usize = self.num.coeffs().iter().map(|x| x.cost()).sum();
        let d: usize = self.den.iter().map(|x| x.cost()).sum();
        c + 4 * d
    }
}

impl<C: Coefficient> fmt::Display for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}

impl<C: Coefficient> fmt::Debug for RationalFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}

impl<C: Coefficient> serde::Serialize for RationalFunction<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_canonical_string())
    }
}
