use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Coefficient;

/// A Laurent polynomial `Σ c_e q^e`, stored densely from the lowest exponent.
///
/// Both ends are trimmed, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPolynomial<C> {
    low: i64,
    coeffs: Vec<C>,
}

impl<C: Coefficient> Default for LaurentPolynomial<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> LaurentPolynomial<C> {
    pub fn new(low: i64, mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self { low: 0, coeffs: Vec::new() };
        }
        coeffs.drain(..lead);
        Self { low: low + lead as i64, coeffs }
    }

    pub fn constant(c: C) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(c: C, e: i64) -> Self {
        Self::new(e, vec![c])
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(C::one(), e)
    }

    pub fn from_map<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        let terms: Vec<(i64, C)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|(e, _)| *e).min().unwrap();
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut coeffs = vec![C::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            let k = (e - lo) as usize;
            coeffs[k] = coeffs[k].clone() + c;
        }
        Self::new(lo, coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, e: i64) -> C {
        if e < self.low {
            return C::zero();
        }
        self.coeffs.get((e - self.low) as usize).cloned().unwrap_or_else(C::zero)
    }

    /// Nonzero terms `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i64, c))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms().count() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.low == 0 && self.coeffs.len() == 1)
    }

    pub fn shift(&self, e: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self { low: self.low + e, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { low: self.low, coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    /// Substitution `q ↦ q⁻¹`.
    pub fn bar(&self) -> Self {
        match self.degree() {
            None => Self::zero(),
            Some(d) => Self { low: -d, coeffs: self.coeffs.iter().rev().cloned().collect() },
        }
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn trailing(&self) -> Option<&C> {
        self.coeffs.first()
    }

    /// Number of stored coefficients.
    pub fn span(&self) -> usize {
        self.coeffs.len()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluation at a coefficient-field point (for `q ≠ 0` when exponents are negative).
    pub fn eval(&self, x: &C) -> Option<C> {
        if self.is_zero() {
            return Some(C::zero());
        }
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        let xe = if self.low >= 0 {
            (0..self.low).fold(C::one(), |a, _| a * x.clone())
        } else {
            let inv = x.inv()?;
            (0..-self.low).fold(C::one(), |a, _| a * inv.clone())
        };
        Some(acc * xe)
    }

    /// Least common multiple of denominators of all rational parts.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator_lcm()))
    }

    pub fn numerator_gcd(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&c.numerator_gcd()))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        Self::new(self.low, self.coeffs.iter().map(|c| c.scale(r)).collect())
    }

    /// Formats with `q` as variable, exponents in descending order.
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        let terms: Vec<(i64, &C)> = self.terms().collect();
        for (k, (e, c)) in terms.iter().rev().enumerate() {
            let multi = c.term_count() > 1;
            let (neg, body) = if multi {
                (false, format!("({c})"))
            } else if c.is_negative_leading() {
                (true, format!("{}", -(*c).clone()))
            } else {
                (false, format!("{c}"))
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let mono = match *e {
                0 => String::new(),
                1 => "q".into(),
                e => format!("q^{e}"),
            };
            if mono.is_empty() {
                out.push_str(&body);
            } else if body == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&body);
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

/// Polynomial helpers on dense coefficient vectors (index = exponent).
pub(crate) mod poly {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    use super::super::{Coefficient, Field};

    pub fn trim<C: Field>(mut p: Vec<C>) -> Vec<C> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn mul<C: Field>(a: &[C], b: &[C]) -> Vec<C> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![C::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
        trim(out)
    }

    /// Division with remainder; `b` must be nonzero.
    pub fn div_rem<C: Field>(a: &[C], b: &[C]) -> (Vec<C>, Vec<C>) {
        let b = trim(b.to_vec());
        let lead_inv = b.last().expect("division by zero polynomial").inv().unwrap();
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![C::zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap().clone() * lead_inv.clone();
            for (k, bk) in b.iter().enumerate() {
                r[shift + k] = r[shift + k].clone() - c.clone() * bk.clone();
            }
            q[shift] = c;
            r.pop();
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn monic<C: Field>(a: Vec<C>) -> Vec<C> {
        match a.last() {
            None => a,
            Some(l) => {
                let li = l.inv().unwrap();
                a.into_iter().map(|c| c * li.clone()).collect()
            }
        }
    }

    /// Monic gcd.
    pub fn gcd<C: Coefficient>(a: &[C], b: &[C]) -> Vec<C> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        if x.len() == 1 || y.len() == 1 {
            return vec![C::one()];
        }
        if let (Some(p), Some(r)) = (integral(&x), integral(&y)) {
            let g = integer_gcd(p, r);
            return monic(g.into_iter().map(|c| C::from_rational(BigRational::from_integer(c))).collect());
        }
        while !y.is_empty() {
            let (_, r) = div_rem(&x, &y);
            x = y;
            y = monic(r);
        }
        monic(x)
    }

    /// Primitive integer multiple of a polynomial with rational coefficients.
    fn integral<C: Coefficient>(a: &[C]) -> Option<Vec<BigInt>> {
        let rs: Vec<BigRational> = a.iter().map(|c| c.to_rational()).collect::<Option<_>>()?;
        let den = rs.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        Some(primitive(rs.iter().map(|r| (r * BigRational::from_integer(den.clone())).to_integer()).collect()))
    }

    fn primitive(a: Vec<BigInt>) -> Vec<BigInt> {
        let mut a = a;
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        let Some(lead) = a.last() else { return a };
        let mut g = a.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if lead.is_negative() {
            g = -g;
        }
        a.into_iter().map(|c| c / &g).collect()
    }

    /// Primitive remainder sequence over `ℤ`.
    fn integer_gcd(mut x: Vec<BigInt>, mut y: Vec<BigInt>) -> Vec<BigInt> {
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_empty() {
            let lead = y.last().expect("nonzero").clone();
            let mut r = x;
            while r.len() >= y.len() {
                let shift = r.len() - y.len();
                let c = r.last().expect("nonzero").clone();
                for v in r.iter_mut() {
                    *v *= &lead;
                }
                for (k, yk) in y.iter().enumerate() {
                    r[shift + k] -= &c * yk;
                }
                r.pop();
                while r.last().is_some_and(|c| c.is_zero()) {
                    r.pop();
                }
                r = primitive(r);
            }
            x = y;
            y = r;
        }
        x
    }

    pub fn exact_div<C: Field>(a: &[C], b: &[C]) -> Vec<C> {
        let (q, r) = div_rem(a, b);
        debug_assert!(r.is_empty(), "inexact polynomial division");
        q
    }
}

impl<'a, C: Coefficient> Add<&'a LaurentPolynomial<C>> for &'a LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn add(self, o: &LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let lo = self.low.min(o.low);
        let hi = self.degree().unwrap().max(o.degree().unwrap());
        let mut coeffs = vec![C::zero(); (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            let idx = (self.low - lo) as usize + k;
            coeffs[idx] = c.clone();
        }
        for (k, c) in o.coeffs.iter().enumerate() {
            let idx = (o.low - lo) as usize + k;
            coeffs[idx] = coeffs[idx].clone() + c.clone();
        }
        LaurentPolynomial::new(lo, coeffs)
    }
}

impl<'a, C: Coefficient> Sub<&'a LaurentPolynomial<C>> for &'a LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn sub(self, o: &LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        self + &(-o)
    }
}

impl<'a, C: Coefficient> Mul<&'a LaurentPolynomial<C>> for &'a LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn mul(self, o: &LaurentPolynomial<C>) -> LaurentPolynomial<C> {
        if self.is_zero() || o.is_zero() {
            return LaurentPolynomial::zero();
        }
        LaurentPolynomial::new(self.low + o.low, poly::mul(&self.coeffs, &o.coeffs))
    }
}

impl<C: Coefficient> Neg for &LaurentPolynomial<C> {
    type Output = LaurentPolynomial<C>;
    fn neg(self) -> LaurentPolynomial<C> {
        LaurentPolynomial { low: self.low, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<C: Coefficient> Add for LaurentPolynomial<C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl<C: Coefficient> Sub for LaurentPolynomial<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl<C: Coefficient> Mul for LaurentPolynomial<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<C: Coefficient> Neg for LaurentPolynomial<C> {
    type Output = Self;
    fn neg(self) -> Self {
        -&self
    }
}

impl<C: Coefficient> Zero for LaurentPolynomial<C> {
    fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<C: Coefficient> One for LaurentPolynomial<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<C: Coefficient> fmt::Display for LaurentPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}

impl<C: Coefficient> fmt::Debug for LaurentPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string())
    }
}
