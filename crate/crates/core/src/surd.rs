//! Exact numbers of the form `±(a/b)·√r` with `r` a square-free integer.
//!
//! Clebsch-Gordan coefficients, 6j symbols and reduced dipole elements all
//! have this shape, so products and ratios of them stay closed. Sums of
//! surds with different radicands are handled by [`SurdSum`], which relies
//! on square roots of distinct square-free integers being linearly
//! independent over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    sign: i8,
    /// Non-negative magnitude of the rational prefactor; zero iff `sign == 0`.
    rational: BigRational,
    /// Square-free, `>= 1`.
    radicand: BigInt,
}

/// Split `n > 0` into `(s, r)` with `n = s²·r` and `r` square-free.
fn square_free_split(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.is_positive());
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut k = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            k += 1;
        }
        if k > 0 {
            square *= p.pow(k / 2);
            if k % 2 == 1 {
                free *= &p;
            }
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    // whatever survives is 1 or a single prime
    free *= rest;
    (square, free)
}

impl Surd {
    pub fn zero() -> Self {
        Surd { sign: 0, rational: BigRational::zero(), radicand: BigInt::one() }
    }

    pub fn one() -> Self {
        Surd::from_rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Surd::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            return Surd::zero();
        }
        let sign = if r.is_negative() { -1 } else { 1 };
        Surd { sign, rational: r.abs(), radicand: BigInt::one() }
    }

    pub fn from_fraction(num: i64, den: i64) -> Self {
        Surd::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// `sign · √square` for a non-negative rational `square`.
    pub fn from_signed_square(sign: i8, square: BigRational) -> Self {
        assert!(!square.is_negative(), "square of a surd must be non-negative");
        if sign == 0 || square.is_zero() {
            return Surd::zero();
        }
        let (sp, rp) = square_free_split(square.numer());
        let (sq, rq) = square_free_split(square.denom());
        // √(sp²rp / sq²rq) = sp/(sq·rq) · √(rp·rq); rp, rq coprime
        let rational = BigRational::new(sp, sq * &rq);
        Surd { sign: sign.signum(), rational, radicand: rp * rq }
    }

    /// `√r` for a non-negative rational `r`.
    pub fn sqrt(r: BigRational) -> Self {
        Surd::from_signed_square(1, r)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Magnitude of the rational prefactor.
    pub fn rational(&self) -> &BigRational {
        &self.rational
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    /// The value as an exact rational, if the radicand is 1.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.radicand.is_one().then(|| self.signed_rational())
    }

    /// `sign · value²`.
    pub fn signed_square(&self) -> BigRational {
        let sq = &self.rational * &self.rational * BigRational::from_integer(self.radicand.clone());
        if self.sign < 0 {
            -sq
        } else {
            sq
        }
    }

    pub fn abs(&self) -> Surd {
        let mut out = self.clone();
        if out.sign < 0 {
            out.sign = 1;
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        let rad = self.radicand.to_f64().unwrap_or(f64::NAN);
        f64::from(self.sign) * r * rad.sqrt()
    }

    pub fn checked_div(&self, rhs: &Surd) -> Option<Surd> {
        if rhs.is_zero() {
            return None;
        }
        // a√r / (b√s) = (a / (b s)) √(r s)
        let inv = Surd {
            sign: rhs.sign,
            rational: (BigRational::from_integer(rhs.radicand.clone()) * &rhs.rational).recip(),
            radicand: rhs.radicand.clone(),
        };
        Some(self * &inv)
    }

    fn signed_rational(&self) -> BigRational {
        match self.sign {
            -1 => -self.rational.clone(),
            _ => self.rational.clone(),
        }
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        if self.is_zero() || rhs.is_zero() {
            return Surd::zero();
        }
        // both radicands square-free: √a√b = g√((a/g)(b/g)), g = gcd(a, b)
        let g = self.radicand.gcd(&rhs.radicand);
        let radicand = (&self.radicand / &g) * (&rhs.radicand / &g);
        Surd {
            sign: self.sign * rhs.sign,
            rational: &self.rational * &rhs.rational * BigRational::from_integer(g),
            radicand,
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl Div for &Surd {
    type Output = Surd;
    fn div(self, rhs: &Surd) -> Surd {
        self.checked_div(rhs).expect("division of a surd by zero")
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        &self / &rhs
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(mut self) -> Surd {
        self.sign = -self.sign;
        self
    }
}

impl From<i64> for Surd {
    fn from(n: i64) -> Self {
        Surd::from_integer(n)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        let r = self.signed_rational();
        if self.radicand.is_one() {
            write!(f, "{r}")
        } else if self.rational.is_one() {
            let s = if self.sign < 0 { "-" } else { "" };
            write!(f, "{s}sqrt({})", self.radicand)
        } else {
            write!(f, "{r}*sqrt({})", self.radicand)
        }
    }
}

/// Exact sum of surds, kept as rational coefficients per square-free radicand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurdSum {
    terms: BTreeMap<BigInt, BigRational>,
}

impl SurdSum {
    pub fn new() -> Self {
        SurdSum::default()
    }

    pub fn add(&mut self, s: &Surd) {
        if s.is_zero() {
            return;
        }
        let entry = self.terms.entry(s.radicand.clone()).or_insert_with(BigRational::zero);
        *entry += s.signed_rational();
        if entry.is_zero() {
            self.terms.remove(&s.radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exact value if it is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&BigInt::one()).cloned(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(rad, c)| c.to_f64().unwrap_or(f64::NAN) * rad.to_f64().unwrap_or(f64::NAN).sqrt()).sum()
    }
}

impl<'a> FromIterator<&'a Surd> for SurdSum {
    fn from_iter<T: IntoIterator<Item = &'a Surd>>(iter: T) -> Self {
        let mut sum = SurdSum::new();
        iter.into_iter().for_each(|s| sum.add(s));
        sum
    }
}

impl FromIterator<Surd> for SurdSum {
    fn from_iter<T: IntoIterator<Item = Surd>>(iter: T) -> Self {
        let mut sum = SurdSum::new();
        iter.into_iter().for_each(|s| sum.add(&s));
        sum
    }
}
