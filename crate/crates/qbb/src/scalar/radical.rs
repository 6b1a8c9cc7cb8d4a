use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{fmt_rational, Coefficient, Field};

/// An element `Σ c_r √r` of a multiquadratic extension of the rationals.
///
/// Radicands are squarefree and sorted; coefficients are nonzero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RadicalRational {
    terms: Vec<(u64, BigRational)>,
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 1;
    }
    n
}

/// Writes `n = s² t` with `t` squarefree; returns `(s, t)`.
fn square_part(n: &BigInt) -> (BigInt, u64) {
    let mut s = BigInt::one();
    let mut t = 1u64;
    let mut m = n.clone();
    let mut p = 2u64;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0u32;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &pb;
        }
        if e % 2 == 1 {
            t *= p;
        }
        p += 1;
    }
    if !m.is_one() {
        t *= m.to_u64().expect("radicand out of range");
    }
    (s, t)
}

impl RadicalRational {
    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            Self::default()
        } else {
            RadicalRational { terms: vec![(1, r)] }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `c·√r` for squarefree `r`.
    pub fn radical(c: BigRational, r: u64) -> Self {
        assert!(is_squarefree(r), "radicand {r} is not squarefree");
        if c.is_zero() {
            Self::default()
        } else {
            RadicalRational { terms: vec![(r, c)] }
        }
    }

    /// Square root of a nonnegative rational, normalized as `√(ab)/b`.
    pub fn sqrt_of(r: &BigRational) -> Option<Self> {
        if r.is_negative() {
            return None;
        }
        if r.is_zero() {
            return Some(Self::default());
        }
        let ab = r.numer() * r.denom();
        let (s, t) = square_part(&ab);
        Some(Self::radical(BigRational::new(s, r.denom().clone()), t))
    }

    pub fn terms(&self) -> &[(u64, BigRational)] {
        &self.terms
    }

    pub fn radicands(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|(r, _)| *r)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|(r, _)| *r == 1)
    }

    pub fn rational_part(&self) -> BigRational {
        match self.terms.first() {
            Some((1, c)) => c.clone(),
            _ => BigRational::zero(),
        }
    }

    fn from_unsorted(mut raw: Vec<(u64, BigRational)>) -> Self {
        raw.sort_by_key(|(r, _)| *r);
        let mut terms: Vec<(u64, BigRational)> = Vec::with_capacity(raw.len());
        for (r, c) in raw {
            match terms.last_mut() {
                Some((lr, lc)) if *lr == r => *lc += c,
                _ => terms.push((r, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        RadicalRational { terms }
    }

    /// The automorphism `√p ↦ −√p`.
    fn conjugate_at(&self, p: u64) -> Self {
        RadicalRational {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| if r % p == 0 { (*r, -c.clone()) } else { (*r, c.clone()) })
                .collect(),
        }
    }

    /// Inverse by conjugate-norm descent through the quadratic tower.
    pub fn invert(&self) -> Option<Self> {
        if self.terms.is_empty() {
            return None;
        }
        if self.is_rational() {
            return Some(Self::from_rational(self.terms[0].1.recip()));
        }
        let r = self.terms.iter().map(|(r, _)| *r).max().unwrap();
        let p = smallest_prime_factor(r);
        let conj = self.conjugate_at(p);
        let norm = self * &conj;
        let inv_norm = norm.invert()?;
        Some(&conj * &inv_norm)
    }

    pub fn scale_rational(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return Self::default();
        }
        RadicalRational { terms: self.terms.iter().map(|(r, c)| (*r, c * s)).collect() }
    }
}

impl fmt::Debug for RadicalRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RadicalRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, (r, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            if *r == 1 {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&format!("sqrt({r})"));
            } else {
                out.push_str(&format!("{}*sqrt({r})", fmt_rational(&a)));
            }
        }
        write!(f, "{out}")
    }
}

impl<'a> Add<&'a RadicalRational> for &'a RadicalRational {
    type Output = RadicalRational;
    fn add(self, o: &RadicalRational) -> RadicalRational {
        if o.terms.is_empty() {
            return self.clone();
        }
        if self.terms.is_empty() {
            return o.clone();
        }
        let mut terms = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < o.terms.len() {
            if j == o.terms.len() || (i < self.terms.len() && self.terms[i].0 < o.terms[j].0) {
                terms.push(self.terms[i].clone());
                i += 1;
            } else if i == self.terms.len() || o.terms[j].0 < self.terms[i].0 {
                terms.push(o.terms[j].clone());
                j += 1;
            } else {
                let c = &self.terms[i].1 + &o.terms[j].1;
                if !c.is_zero() {
                    terms.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        RadicalRational { terms }
    }
}

impl<'a> Mul<&'a RadicalRational> for &'a RadicalRational {
    type Output = RadicalRational;
    fn mul(self, o: &RadicalRational) -> RadicalRational {
        if self.terms.is_empty() || o.terms.is_empty() {
            return RadicalRational::default();
        }
        if self.terms.len() == 1 && self.terms[0].0 == 1 {
            return o.scale_rational(&self.terms[0].1);
        }
        if o.terms.len() == 1 && o.terms[0].0 == 1 {
            return self.scale_rational(&o.terms[0].1);
        }
        let mut raw = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                let g = m.gcd(n);
                let c = a * b * BigRational::from_integer(BigInt::from(g));
                raw.push(((m / g) * (n / g), c));
            }
        }
        RadicalRational::from_unsorted(raw)
    }
}

impl Neg for &RadicalRational {
    type Output = RadicalRational;
    fn neg(self) -> RadicalRational {
        RadicalRational { terms: self.terms.iter().map(|(r, c)| (*r, -c.clone())).collect() }
    }
}

impl Sub<&RadicalRational> for &RadicalRational {
    type Output = RadicalRational;
    fn sub(self, o: &RadicalRational) -> RadicalRational {
        self + &(-o)
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(RadicalRational);

impl Zero for RadicalRational {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for RadicalRational {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl Field for RadicalRational {
    fn inv(&self) -> Option<Self> {
        self.invert()
    }

    fn cost(&self) -> usize {
        self.terms.iter().map(|(_, c)| c.cost()).sum::<usize>().max(1)
    }
}

impl Coefficient for RadicalRational {
    fn from_rational(r: BigRational) -> Self {
        RadicalRational::from_rational(r)
    }

    fn sqrt_rational(r: &BigRational) -> Option<Self> {
        RadicalRational::sqrt_of(r)
    }

    fn to_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    fn denominator_lcm(&self) -> BigInt {
        self.terms.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
    }

    fn numerator_gcd(&self) -> BigInt {
        self.terms.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
    }

    fn scale(&self, r: &BigRational) -> Self {
        self.scale_rational(r)
    }

    fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn is_negative_leading(&self) -> bool {
        self.terms.first().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }
}
