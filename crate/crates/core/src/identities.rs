//! Exact checks of the angular-momentum identities behind the dark-state
//! conditions, over all `F` up to a bound.
//!
//! Ratios whose numerator and denominator both vanish (an excited
//! projection out of range on both legs) are undefined; they are skipped
//! and counted rather than compared.

use serde::{Deserialize, Serialize};

use crate::angular::{clebsch_gordan, dipole_cg_or_zero, reduced_dipole, wigner_6j, LineId};
use crate::error::Result;
use crate::halfint::{triangle, HalfInt};
use crate::par::{self, Execution};
use crate::surd::{Surd, SurdSum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// One case: `Ok(None)` if undefined, `Ok(Some(None))` on agreement,
/// `Ok(Some(Some(msg)))` on a mismatch.
type Outcome = Result<Option<Option<String>>>;

fn collect(name: &str, outcomes: Vec<Outcome>) -> Result<IdentityReport> {
    let mut report = IdentityReport { name: name.to_string(), checked: 0, skipped: 0, failures: Vec::new() };
    for o in outcomes {
        match o? {
            None => report.skipped += 1,
            Some(failure) => {
                report.checked += 1;
                report.failures.extend(failure);
            }
        }
    }
    Ok(report)
}

/// `F = 1/2, 1, ..., max_f`.
pub fn f_values(max_f: HalfInt) -> Vec<HalfInt> {
    (1..=max_f.twice()).map(HalfInt::from_twice).collect()
}

/// `(F, m, Fe)` with `|m| <= F`, `Fe ∈ {F, F+1}`.
fn cases(max_f: HalfInt) -> Vec<(HalfInt, HalfInt, HalfInt)> {
    f_values(max_f)
        .into_iter()
        .flat_map(|f| f.projections().flat_map(move |m| [(f, m, f), (f, m, f + HalfInt::ONE)]))
        .collect()
}

fn leg(f: HalfInt, m: HalfInt, q: i32, fe: HalfInt) -> Result<Surd> {
    dipole_cg_or_zero(f, m, q, fe, m + HalfInt::from_int(q))
}

fn ratio(num: Surd, den: Surd) -> Option<Surd> {
    if num.is_zero() && den.is_zero() {
        None
    } else {
        // a zero denominator alone would be a genuine failure; report it as infinite
        Some(num.checked_div(&den).unwrap_or_else(|| Surd::from_integer(i64::MAX)))
    }
}

fn rational(n: i64, d: i64) -> Surd {
    Surd::from_fraction(n, d)
}

/// `1 + F ± m` as a fraction with denominator 2.
fn twice_of(f: HalfInt, m: HalfInt, sign: i32) -> i64 {
    i64::from(2 + f.twice() + sign * m.twice())
}

/// The cross ratio of Clebsch-Gordan coefficients for `F1 = F`,
/// `F2 = F+1`:
///
/// ```text
/// C^{Fe m+1}_{(F+1)m,11} C^{Fe m-1}_{Fm,1-1}
/// ------------------------------------------ = -(1+F-m)/(1+F+m)
/// C^{Fe m+1}_{Fm,11} C^{Fe m-1}_{(F+1)m,1-1}
/// ```
pub fn cg_cross_ratio(f: HalfInt, m: HalfInt, fe: HalfInt) -> Result<Option<Surd>> {
    let f2 = f + HalfInt::ONE;
    let num = &leg(f2, m, 1, fe)? * &leg(f, m, -1, fe)?;
    let den = &leg(f, m, 1, fe)? * &leg(f2, m, -1, fe)?;
    Ok(ratio(num, den))
}

pub fn cg_cross_ratio_expected(f: HalfInt, m: HalfInt) -> Surd {
    -rational(twice_of(f, m, -1), twice_of(f, m, 1))
}

pub fn check_cg_cross_ratio(max_f: HalfInt, exec: Execution) -> Result<IdentityReport> {
    let outcomes = par::map(exec, &cases(max_f), |&(f, m, fe)| {
        let expected = cg_cross_ratio_expected(f, m);
        Ok(cg_cross_ratio(f, m, fe)?
            .map(|got| (got != expected).then(|| format!("F={f} m={m} Fe={fe}: got {got}, expected {expected}"))))
    });
    collect("cg_cross_ratio", outcomes)
}

/// `(d_{F Fe} C^{Fe m+1}_{Fm,11}) / (d_{(F+1) Fe} C^{Fe m+1}_{(F+1)m,11})`
/// for the alkali with ground levels `F`, `F+1` (nuclear spin `F + 1/2`).
pub fn dipole_ratio(f: HalfInt, m: HalfInt, fe: HalfInt, line: LineId) -> Result<Option<Surd>> {
    let i = f + HalfInt::HALF;
    let f2 = f + HalfInt::ONE;
    let num = &reduced_dipole(f, fe, line, i)? * &leg(f, m, 1, fe)?;
    let den = &reduced_dipole(f2, fe, line, i)? * &leg(f2, m, 1, fe)?;
    Ok(ratio(num, den))
}

/// `-√((1+F+m)/(1+F-m))`, the same for both excited levels.
pub fn d1_ratio_expected(f: HalfInt, m: HalfInt) -> Surd {
    -Surd::sqrt(num_rational::BigRational::new(twice_of(f, m, 1).into(), twice_of(f, m, -1).into()))
}

/// `-((F-Fe+2)(F+Fe+3)√(1+F+m)) / ((F-Fe-1)(F+Fe)√(1+F-m))`
pub fn d2_ratio_expected(f: HalfInt, m: HalfInt, fe: HalfInt) -> Surd {
    // all factors doubled; the doublings cancel between numerator and denominator
    let a = i64::from(f.twice() - fe.twice() + 4);
    let b = i64::from(f.twice() + fe.twice() + 6);
    let c = i64::from(f.twice() - fe.twice() - 2);
    let d = i64::from(f.twice() + fe.twice());
    let prefactor = rational(a * b, c * d);
    let root = -d1_ratio_expected(f, m);
    -(&prefactor * &root)
}

pub fn check_d1_ratio(max_f: HalfInt, exec: Execution) -> Result<IdentityReport> {
    let outcomes = par::map(exec, &cases(max_f), |&(f, m, fe)| {
        let expected = d1_ratio_expected(f, m);
        Ok(dipole_ratio(f, m, fe, LineId::D1)?
            .map(|got| (got != expected).then(|| format!("F={f} m={m} Fe={fe}: got {got}, expected {expected}"))))
    });
    collect("d1_dipole_ratio", outcomes)
}

pub fn check_d2_ratio(max_f: HalfInt, exec: Execution) -> Result<IdentityReport> {
    let outcomes = par::map(exec, &cases(max_f), |&(f, m, fe)| {
        let expected = d2_ratio_expected(f, m, fe);
        Ok(dipole_ratio(f, m, fe, LineId::D2)?
            .map(|got| (got != expected).then(|| format!("F={f} m={m} Fe={fe}: got {got}, expected {expected}"))))
    });
    collect("d2_dipole_ratio", outcomes)
}

/// On D2 the ratio through `Fe = F` differs from the one through
/// `Fe = F+1` wherever both are defined.
pub fn check_d2_fe_dependence(max_f: HalfInt, exec: Execution) -> Result<IdentityReport> {
    let pairs: Vec<(HalfInt, HalfInt)> =
        f_values(max_f).into_iter().flat_map(|f| f.projections().map(move |m| (f, m))).collect();
    let outcomes = par::map(exec, &pairs, |&(f, m)| {
        let low = dipole_ratio(f, m, f, LineId::D2)?;
        let high = dipole_ratio(f, m, f + HalfInt::ONE, LineId::D2)?;
        Ok(match (low, high) {
            (Some(a), Some(b)) => Some((a == b).then(|| format!("F={f} m={m}: both excited levels give {a}"))),
            _ => None,
        })
    });
    collect("d2_fe_dependence", outcomes)
}

/// `Σ_{m1,m2} C^{J M}_{j1 m1, j2 m2} C^{J' M'}_{j1 m1, j2 m2} = δ_{JJ'} δ_{MM'}`
/// for `j1, j2 <= max_j`.
pub fn check_cg_orthogonality(max_j: HalfInt, exec: Execution) -> Result<IdentityReport> {
    let js: Vec<HalfInt> = (0..=max_j.twice()).map(HalfInt::from_twice).collect();
    let pairs: Vec<(HalfInt, HalfInt)> = js.iter().flat_map(|&a| js.iter().map(move |&b| (a, b))).collect();
    let outcomes = par::map(exec, &pairs, |&(j1, j2)| -> Outcome {
        let totals: Vec<HalfInt> =
            ((j1 - j2).abs().twice()..=(j1 + j2).twice()).step_by(2).map(HalfInt::from_twice).collect();
        let mut failures = Vec::new();
        for &ja in &totals {
            for &jb in &totals {
                // different total projections never share a product state
                for m in ja.projections().filter(|&m| jb.admits_projection(m)) {
                    let mut sum = SurdSum::new();
                    for m1 in j1.projections() {
                        let m2 = m - m1;
                        if !j2.admits_projection(m2) {
                            continue;
                        }
                        let a = clebsch_gordan(j1, m1, j2, m2, ja, m)?;
                        let b = clebsch_gordan(j1, m1, j2, m2, jb, m)?;
                        sum.add(&(&a * &b));
                    }
                    let expected = i64::from(ja == jb);
                    let got = sum.to_rational();
                    if got != Some(num_rational::BigRational::from_integer(expected.into())) {
                        failures.push(format!("j1={j1} j2={j2} J={ja},{jb} M={m}: {got:?}"));
                    }
                }
            }
        }
        Ok(Some(failures.into_iter().next()))
    });
    collect("cg_orthogonality", outcomes)
}

/// Invariance of the 6j symbol under column permutations and under
/// swapping upper and lower entries in two columns.
pub fn check_sixj_symmetry(max_j: HalfInt, exec: Execution) -> Result<IdentityReport> {
    let js: Vec<HalfInt> = (0..=max_j.twice()).map(HalfInt::from_twice).collect();
    let mut triads = Vec::new();
    for &a in &js {
        for &b in &js {
            for &c in &js {
                if triangle(a, b, c) {
                    triads.push((a, b, c));
                }
            }
        }
    }
    let outcomes = par::map(exec, &triads, |&(j1, j2, j3)| -> Outcome {
        for &j4 in &js {
            for &j5 in &js {
                for &j6 in &js {
                    let base = wigner_6j(j1, j2, j3, j4, j5, j6)?;
                    let variants = [
                        wigner_6j(j2, j1, j3, j5, j4, j6)?,
                        wigner_6j(j1, j3, j2, j4, j6, j5)?,
                        wigner_6j(j3, j2, j1, j6, j5, j4)?,
                        wigner_6j(j4, j5, j3, j1, j2, j6)?,
                        wigner_6j(j1, j5, j6, j4, j2, j3)?,
                    ];
                    if let Some(bad) = variants.iter().find(|v| **v != base) {
                        return Ok(Some(Some(format!("{{{j1} {j2} {j3}; {j4} {j5} {j6}}} = {base}, permuted {bad}"))));
                    }
                }
            }
        }
        Ok(Some(None))
    });
    collect("sixj_symmetry", outcomes)
}

/// The dark-state identities over `F <= max_f`.
pub fn identity_suite(max_f: HalfInt, exec: Execution) -> Result<Vec<IdentityReport>> {
    Ok(vec![
        check_cg_cross_ratio(max_f, exec)?,
        check_d1_ratio(max_f, exec)?,
        check_d2_ratio(max_f, exec)?,
        check_d2_fe_dependence(max_f, exec)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn spot_values() {
        assert_eq!(cg_cross_ratio(h(2), HalfInt::ZERO, h(2)).unwrap(), Some(Surd::from_integer(-1)));
        assert_eq!(cg_cross_ratio(h(2), h(2), h(4)).unwrap(), Some(Surd::from_fraction(-1, 3)));
        assert_eq!(cg_cross_ratio(h(2), h(2), h(2)).unwrap(), None);
        assert_eq!(dipole_ratio(h(6), HalfInt::ZERO, h(6), LineId::D2).unwrap(), Some(Surd::from_integer(3)));
        assert_eq!(dipole_ratio(h(6), HalfInt::ZERO, h(8), LineId::D2).unwrap(), Some(Surd::from_fraction(5, 7)));
        assert_eq!(d2_ratio_expected(h(6), HalfInt::ZERO, h(6)), Surd::from_integer(3));
        assert_eq!(d2_ratio_expected(h(6), HalfInt::ZERO, h(8)), Surd::from_fraction(5, 7));
    }

    #[test]
    fn small_suite_passes() {
        for r in identity_suite(h(4), Execution::Sequential).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
        let r = check_cg_orthogonality(h(3), Execution::Parallel).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(check_sixj_symmetry(h(3), Execution::Parallel).unwrap().passed());
    }

    #[test]
    fn skips_are_the_doubly_vanishing_cases() {
        let r = check_cg_cross_ratio(h(2), Execution::Sequential).unwrap();
        // Fe = F with m = ±F, for F = 1/2 and 1
        assert_eq!(r.skipped, 4);
        let r = check_d1_ratio(h(2), Execution::Sequential).unwrap();
        assert_eq!(r.skipped, 2);
    }
}
