//! Angular-momentum coupling coefficients in exact arithmetic.
//!
//! Conventions:
//!
//! * Clebsch-Gordan coefficients `C^{J M}_{j1 m1, j2 m2} = <j1 m1; j2 m2 | J M>`
//!   follow Condon-Shortley: real, with `<j1 j1; j2 (J-j1) | J J> > 0`.
//! * Reduced dipole elements between a ground hyperfine level `F` and an
//!   excited level `Fe` of an alkali D line are
//!
//!   ```text
//!   d(F, Fe) = (-1)^(F + J + 1 + I) · sqrt((2F+1)(2Fe+1)) · {J J' 1; Fe F I}
//!   ```
//!
//!   with `J = 1/2` and `J' = 1/2` (D1) or `3/2` (D2), in units of the
//!   fine-structure reduced element. Only ratios of these enter any
//!   darkness condition.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::{triangle, HalfInt};
use crate::surd::Surd;

/// Alkali D line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineId {
    /// `J = 1/2 -> J' = 1/2`
    D1,
    /// `J = 1/2 -> J' = 3/2`
    D2,
}

impl LineId {
    pub fn ground_j(self) -> HalfInt {
        HalfInt::HALF
    }

    pub fn excited_j(self) -> HalfInt {
        match self {
            LineId::D1 => HalfInt::HALF,
            LineId::D2 => HalfInt::from_twice(3),
        }
    }
}

impl fmt::Display for LineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineId::D1 => "D1",
            LineId::D2 => "D2",
        })
    }
}

impl FromStr for LineId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "D1" => Ok(LineId::D1),
            "D2" => Ok(LineId::D2),
            _ => Err(Error::parse(format!("unknown line {s:?}, expected D1 or D2"))),
        }
    }
}

fn factorial(n: i32) -> BigInt {
    static TABLE: OnceLock<Mutex<Vec<BigInt>>> = OnceLock::new();
    assert!(n >= 0, "factorial of negative number {n}");
    let n = n as usize;
    let mut table = TABLE.get_or_init(|| Mutex::new(vec![BigInt::one()])).lock().unwrap();
    while table.len() <= n {
        let k = table.len();
        let next = &table[k - 1] * BigInt::from(k);
        table.push(next);
    }
    table[n].clone()
}

fn fact_q(n: i32) -> BigRational {
    BigRational::from_integer(factorial(n))
}

/// Integer value of a half-integer expression already known to be integral.
fn int(h: HalfInt) -> i32 {
    h.as_int().expect("non-integral factorial argument")
}

fn sign_of(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_negative() {
        -1
    } else {
        1
    }
}

type CgKey = [i32; 6];

fn cg_cache() -> &'static Mutex<HashMap<CgKey, Surd>> {
    static CACHE: OnceLock<Mutex<HashMap<CgKey, Surd>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn sixj_cache() -> &'static Mutex<HashMap<CgKey, Surd>> {
    static CACHE: OnceLock<Mutex<HashMap<CgKey, Surd>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j m>`.
///
/// Fails when any projection is out of range or has the wrong parity;
/// returns exact zero when `m != m1 + m2` or the triangle rule fails.
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Result<Surd> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j.check_projection(m)?;
    if m1 + m2 != m || !triangle(j1, j2, j) {
        return Ok(Surd::zero());
    }
    let key = [j1, m1, j2, m2, j, m].map(HalfInt::twice);
    if let Some(v) = cg_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let value = racah_cg(j1, m1, j2, m2, j, m);
    cg_cache().lock().unwrap().insert(key, value.clone());
    Ok(value)
}

fn racah_cg(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> Surd {
    let prefactor = BigRational::from_integer(BigInt::from(j.multiplicity()))
        * fact_q(int(j1 + j2 - j))
        * fact_q(int(j1 - j2 + j))
        * fact_q(int(j2 - j1 + j))
        / fact_q(int(j1 + j2 + j) + 1)
        * fact_q(int(j + m))
        * fact_q(int(j - m))
        * fact_q(int(j1 - m1))
        * fact_q(int(j1 + m1))
        * fact_q(int(j2 - m2))
        * fact_q(int(j2 + m2));

    let a = int(j1 + j2 - j);
    let b = int(j1 - m1);
    let c = int(j2 + m2);
    let d = int(j - j2 + m1);
    let e = int(j - j1 - m2);
    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den =
            factorial(k) * factorial(a - k) * factorial(b - k) * factorial(c - k) * factorial(d + k) * factorial(e + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Surd::from_signed_square(sign_of(&sum), prefactor * &sum * &sum)
}

fn delta_sq(a: HalfInt, b: HalfInt, c: HalfInt) -> BigRational {
    fact_q(int(a + b - c)) * fact_q(int(a - b + c)) * fact_q(int(b + c - a)) / fact_q(int(a + b + c) + 1)
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
///
/// Zero whenever one of the triads (j1 j2 j3), (j1 j5 j6), (j4 j2 j6),
/// (j4 j5 j3) violates the triangle rule or has non-integral sum.
pub fn wigner_6j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> Result<Surd> {
    let args = [j1, j2, j3, j4, j5, j6];
    if let Some(neg) = args.iter().find(|j| j.twice() < 0) {
        return Err(Error::domain(format!("negative angular momentum {neg} in 6j symbol")));
    }
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return Ok(Surd::zero());
    }
    let key = args.map(HalfInt::twice);
    if let Some(v) = sixj_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }

    let prefactor: BigRational = triads.iter().map(|&(a, b, c)| delta_sq(a, b, c)).product();
    let sums = triads.map(|(a, b, c)| int(a + b + c));
    let upper = [int(j1 + j2 + j4 + j5), int(j2 + j3 + j5 + j6), int(j3 + j1 + j6 + j4)];
    let t_min = *sums.iter().max().unwrap();
    let t_max = *upper.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den: BigInt = sums.iter().map(|&s| factorial(t - s)).product::<BigInt>()
            * upper.iter().map(|&u| factorial(u - t)).product::<BigInt>();
        let term = BigRational::new(factorial(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let value = Surd::from_signed_square(sign_of(&sum), prefactor * &sum * &sum);
    sixj_cache().lock().unwrap().insert(key, value.clone());
    Ok(value)
}

/// Hyperfine levels `|I - J| ..= I + J`.
pub fn hyperfine_levels(nuclear_spin: HalfInt, j: HalfInt) -> Vec<HalfInt> {
    let lo = (nuclear_spin - j).abs();
    let hi = nuclear_spin + j;
    (lo.twice()..=hi.twice()).step_by(2).map(HalfInt::from_twice).collect()
}

/// Reduced dipole element `d(F_g, F_e)` of an alkali D line; see the module
/// docs for the phase and normalization.
pub fn reduced_dipole(f_ground: HalfInt, f_excited: HalfInt, line: LineId, nuclear_spin: HalfInt) -> Result<Surd> {
    if nuclear_spin.twice() < 0 {
        return Err(Error::domain(format!("negative nuclear spin {nuclear_spin}")));
    }
    let j = line.ground_j();
    let jp = line.excited_j();
    if !triangle(nuclear_spin, j, f_ground) {
        return Err(Error::domain(format!("F = {f_ground} is not a ground level of I = {nuclear_spin}, J = {j}")));
    }
    if !triangle(nuclear_spin, jp, f_excited) {
        return Err(Error::domain(format!(
            "F' = {f_excited} is not an excited level of I = {nuclear_spin}, J' = {jp} ({line})"
        )));
    }
    let sixj = wigner_6j(j, jp, HalfInt::ONE, f_excited, f_ground, nuclear_spin)?;
    let phase = int(f_ground + j + nuclear_spin) + 1;
    let norm = Surd::sqrt(BigRational::from_integer(BigInt::from(f_ground.multiplicity() * f_excited.multiplicity())));
    let value = &norm * &sixj;
    Ok(if phase % 2 == 0 { value } else { -value })
}

/// `C^{Fe μ}_{F m, 1 q}`: the coefficient coupling a ground sublevel and a
/// photon of spherical component `q` into an excited sublevel.
pub fn dipole_cg(f: HalfInt, m: HalfInt, q: i32, fe: HalfInt, mu: HalfInt) -> Result<Surd> {
    clebsch_gordan(f, m, HalfInt::ONE, HalfInt::from_int(q), fe, mu)
}

/// Like [`dipole_cg`], but zero instead of an error when `μ` lies outside
/// `Fe`; convenient for the legs of a Λ system that may not exist.
pub fn dipole_cg_or_zero(f: HalfInt, m: HalfInt, q: i32, fe: HalfInt, mu: HalfInt) -> Result<Surd> {
    f.check_projection(m)?;
    if !fe.admits_projection(mu) {
        return Ok(Surd::zero());
    }
    dipole_cg(f, m, q, fe, mu)
}
