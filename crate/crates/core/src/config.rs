//! Polarization conditions for a pure `m–m` dark state.
//!
//! The `σ+` and `σ-` Λ systems through one excited level share a dark state
//! iff the rows
//!
//! ```text
//! [C^{Fe m+1}_{F1 m,1 1} a1^{+1},   C^{Fe m+1}_{F2 m,1 1} a2^{+1}]
//! [C^{Fe m-1}_{F1 m,1 -1} a1^{-1},  C^{Fe m-1}_{F2 m,1 -1} a2^{-1}]
//! ```
//!
//! are linearly dependent. Reduced dipole elements and amplitudes scale
//! whole columns and drop out. The residual used here is the determinant
//! divided by the product of the row norms (the sine of the angle between
//! them), which stays finite at the circular endpoints where the tangent
//! form of the condition has poles.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::dipole_cg_or_zero;
use crate::error::{Error, Result};
use crate::field::{BichromaticField, FieldComponent};
use crate::halfint::HalfInt;
use crate::par::{self, Execution};

/// Default threshold on the normalized residual.
pub const CONDITION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PerpGeneral,
    PerpSymmetric,
    LinPerpEps,
    EpsPerpLin,
    #[serde(rename = "parallel_Fplus2")]
    ParallelFplus2,
    #[serde(rename = "parallel_equalF")]
    ParallelEqualF,
    DegenerateSigma,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::PerpGeneral => "perp_general",
            Family::PerpSymmetric => "perp_symmetric",
            Family::LinPerpEps => "lin_perp_eps",
            Family::EpsPerpLin => "eps_perp_lin",
            Family::ParallelFplus2 => "parallel_Fplus2",
            Family::ParallelEqualF => "parallel_equalF",
            Family::DegenerateSigma => "degenerate_sigma",
        }
    }

    pub fn is_perpendicular(self) -> bool {
        matches!(self, Family::PerpGeneral | Family::PerpSymmetric | Family::LinPerpEps | Family::EpsPerpLin)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    /// Accepts the canonical names and the short forms `general`,
    /// `symmetric`, `lin-perp-eps`, `eps-perp-lin`, `parallel`, `equal`.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('-', "_").to_ascii_lowercase();
        Ok(match key.as_str() {
            "perp_general" | "general" => Family::PerpGeneral,
            "perp_symmetric" | "symmetric" => Family::PerpSymmetric,
            "lin_perp_eps" => Family::LinPerpEps,
            "eps_perp_lin" => Family::EpsPerpLin,
            "parallel_fplus2" | "parallel" => Family::ParallelFplus2,
            "parallel_equalf" | "equal" => Family::ParallelEqualF,
            "degenerate_sigma" => Family::DegenerateSigma,
            _ => return Err(Error::parse(format!("unknown family {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSolution {
    pub theta: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub family: Family,
    pub validity_note: String,
}

impl ConfigSolution {
    fn new(theta: f64, epsilon1: f64, epsilon2: f64, family: Family, note: impl Into<String>) -> Self {
        let mut sol = ConfigSolution { theta, epsilon1, epsilon2, family, validity_note: note.into() };
        if is_circular_pair(epsilon1, epsilon2) {
            sol.family = Family::DegenerateSigma;
            sol.validity_note = format!(
                "{}; both components share one circular polarization, so the end Zeeman state is a trap and the final state is mixed",
                sol.validity_note
            );
        }
        sol
    }

    /// The field: component 1 with axis along `x`, component 2 at `theta`.
    pub fn field(&self, amplitudes: [Complex64; 2]) -> Result<BichromaticField> {
        Ok(BichromaticField::new(
            FieldComponent::new(amplitudes[0], self.epsilon1, 0.0, 0)?,
            FieldComponent::new(amplitudes[1], self.epsilon2, self.theta, 1)?,
        ))
    }
}

fn is_circular_pair(e1: f64, e2: f64) -> bool {
    let tol = 1e-12;
    ((e1 - FRAC_PI_4).abs() < tol && (e2 - FRAC_PI_4).abs() < tol)
        || ((e1 + FRAC_PI_4).abs() < tol && (e2 + FRAC_PI_4).abs() < tol)
}

/// Outcome of [`check_condition`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub satisfied: bool,
    pub residual: f64,
    /// Both components have the same circular polarization.
    pub degenerate: bool,
    /// One of the Λ systems has no coupling at all, so only the other
    /// constrains the dark state.
    pub unconstrained: bool,
}

fn cg_leg(f: HalfInt, m: HalfInt, q: i32, fe: HalfInt) -> Result<f64> {
    Ok(dipole_cg_or_zero(f, m, q, fe, m + HalfInt::from_int(q))?.to_f64())
}

/// Normalized residual of the dark-state condition for the Λ pair
/// `|F1,m>, |F2,m> ↔ |Fe,m±1>`; zero when a Λ has no coupling.
pub fn condition_residual(
    f1: HalfInt,
    f2: HalfInt,
    fe: HalfInt,
    m: HalfInt,
    field: &BichromaticField,
) -> Result<(f64, bool)> {
    for f in [f1, f2] {
        f.check_projection(m)?;
        if (f - fe).twice().abs() > 2 || f.twice() + fe.twice() < 2 {
            return Err(Error::domain(format!("F = {f} -> Fe = {fe} violates the dipole selection rules")));
        }
    }
    let (m1, p1) = field.comp1.spherical();
    let (m2, p2) = field.comp2.spherical();
    let plus = [p1 * cg_leg(f1, m, 1, fe)?, p2 * cg_leg(f2, m, 1, fe)?];
    let minus = [m1 * cg_leg(f1, m, -1, fe)?, m2 * cg_leg(f2, m, -1, fe)?];
    let norm = |r: &[Complex64; 2]| (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
    let (np, nm) = (norm(&plus), norm(&minus));
    // rows this small are rounding noise on an exact zero
    if np < 1e-14 || nm < 1e-14 {
        return Ok((0.0, true));
    }
    let det = plus[0] * minus[1] - plus[1] * minus[0];
    Ok((det.norm() / (np * nm), false))
}

pub fn check_condition(
    f1: HalfInt,
    f2: HalfInt,
    fe: HalfInt,
    m: HalfInt,
    field: &BichromaticField,
) -> Result<ConditionCheck> {
    check_condition_tol(f1, f2, fe, m, field, CONDITION_TOL)
}

pub fn check_condition_tol(
    f1: HalfInt,
    f2: HalfInt,
    fe: HalfInt,
    m: HalfInt,
    field: &BichromaticField,
    tol: f64,
) -> Result<ConditionCheck> {
    let (residual, unconstrained) = condition_residual(f1, f2, fe, m, field)?;
    Ok(ConditionCheck { satisfied: residual < tol, residual, degenerate: field.is_same_circular(1e-12), unconstrained })
}

/// `ε2` with `tan(ε1+π/4)/tan(ε2+π/4) = ratio` for `ratio > 0`.
fn partner_ellipticity(eps1: f64, ratio: f64) -> f64 {
    let (s, c) = eps1.sin_cos();
    (c + s).atan2(ratio * (c - s)) - FRAC_PI_4
}

fn check_range(name: &str, eps: f64) -> Result<f64> {
    if !eps.is_finite() || eps.abs() > FRAC_PI_4 + 1e-12 {
        return Err(Error::numerical(format!("{name} = {eps} left [-π/4, π/4]")));
    }
    Ok(eps.clamp(-FRAC_PI_4, FRAC_PI_4))
}

fn check_m(f: HalfInt, m: HalfInt) -> Result<()> {
    f.check_projection(m)
}

/// Orthogonal-axes solutions for `F1 = F`, `F2 = F+1`, where the condition
/// reads `(1+F-m)/(1+F+m) = tan(ε1+π/4)/tan(ε2+π/4)`.
///
/// `fixed` is `ε1` for `perp_general` and ignored by the one-parameter
/// families.
pub fn solve_perp(f: HalfInt, m: HalfInt, family: Family, fixed: Option<f64>) -> Result<ConfigSolution> {
    check_m(f, m)?;
    let (fv, mv) = (f.to_f64(), m.to_f64());
    let ratio = (1.0 + fv - mv) / (1.0 + fv + mv);
    let (e1, e2, note) = match family {
        Family::PerpGeneral => {
            let e1 = fixed.ok_or_else(|| Error::domain("perp_general needs a fixed ε1"))?;
            let e1 =
                check_range("ε1", e1).map_err(|_| Error::domain(format!("fixed ε1 = {e1} outside [-π/4, π/4]")))?;
            (e1, partner_ellipticity(e1, ratio), "ε1 fixed, ε2 from the ellipticity relation")
        }
        Family::PerpSymmetric => {
            let e = (-mv / (1.0 + fv)).asin() / 2.0;
            (e, -e, "ε1 = -ε2 = ε with sin 2ε = -m/(1+F)")
        }
        Family::LinPerpEps => (0.0, (mv / (1.0 + fv)).atan(), "component 1 linear, tan ε2 = m/(1+F)"),
        Family::EpsPerpLin => ((-mv / (1.0 + fv)).atan(), 0.0, "component 2 linear, tan ε1 = -m/(1+F)"),
        other => return Err(Error::domain(format!("{other} is not an orthogonal-axes family"))),
    };
    let e1 = check_range("ε1", e1)?;
    let e2 = check_range("ε2", e2)?;
    Ok(ConfigSolution::new(FRAC_PI_2, e1, e2, family, note))
}

/// Parallel-axes solution for `F1 = F`, `F2 = F+2` through `Fe = F+1`:
/// `(1+F-m)(2+F-m)/((1+F+m)(2+F+m)) = tan(ε1+π/4)/tan(ε2+π/4)`.
/// Without `fixed` the symmetric pair `ε1 = -ε2` is returned.
pub fn solve_parallel_fplus2(f: HalfInt, m: HalfInt, fixed: Option<f64>) -> Result<ConfigSolution> {
    check_m(f, m)?;
    let (fv, mv) = (f.to_f64(), m.to_f64());
    let ratio = (1.0 + fv - mv) * (2.0 + fv - mv) / ((1.0 + fv + mv) * (2.0 + fv + mv));
    let (e1, e2, note) = match fixed {
        Some(e1) => {
            let e1 =
                check_range("ε1", e1).map_err(|_| Error::domain(format!("fixed ε1 = {e1} outside [-π/4, π/4]")))?;
            (e1, partner_ellipticity(e1, ratio), "ε1 fixed, ε2 from the parallel-axes relation")
        }
        None => {
            let e = ((ratio - 1.0) / (ratio + 1.0)).asin() / 2.0;
            (e, -e, "symmetric choice ε1 = -ε2")
        }
    };
    let e1 = check_range("ε1", e1)?;
    let e2 = check_range("ε2", e2)?;
    Ok(ConfigSolution::new(0.0, e1, e2, Family::ParallelFplus2, note))
}

/// `F1 = F2`: identical polarizations with any common ellipticity, valid
/// for every `m` and every `Fe`.
pub fn solve_parallel_equal_f(eps: f64) -> Result<ConfigSolution> {
    let e = check_range("ε", eps).map_err(|_| Error::domain(format!("ε = {eps} outside [-π/4, π/4]")))?;
    Ok(ConfigSolution::new(0.0, e, e, Family::ParallelEqualF, "identical polarizations, independent of m and Fe"))
}

/// Residual at each `θ` for fixed ellipticities.
pub fn theta_scan(
    f1: HalfInt,
    f2: HalfInt,
    fe: HalfInt,
    m: HalfInt,
    eps1: f64,
    eps2: f64,
    thetas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let c1 = FieldComponent::new(Complex64::new(1.0, 0.0), eps1, 0.0, 0)?;
    thetas
        .iter()
        .map(|&theta| {
            let c2 = FieldComponent::new(Complex64::new(1.0, 0.0), eps2, theta, 1)?;
            let (r, _) = condition_residual(f1, f2, fe, m, &BichromaticField::new(c1, c2))?;
            Ok((theta, r))
        })
        .collect()
}

/// `n` points `k·π/n`, `k = 0..n`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| PI * k as f64 / n as f64).collect()
}

/// `n` points spanning `[-π/4, π/4]` inclusive.
pub fn ellipticity_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| -FRAC_PI_4 + FRAC_PI_2 * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub theta: f64,
    pub residual: f64,
}

/// Residual over the product grid `ε1 × ε2 × θ`, ordered with `θ` fastest.
#[allow(clippy::too_many_arguments)]
pub fn residual_grid(
    f1: HalfInt,
    f2: HalfInt,
    fe: HalfInt,
    m: HalfInt,
    eps1: &[f64],
    eps2: &[f64],
    thetas: &[f64],
    exec: Execution,
) -> Result<Vec<GridPoint>> {
    let pairs: Vec<(f64, f64)> = eps1.iter().flat_map(|&a| eps2.iter().map(move |&b| (a, b))).collect();
    let rows = par::try_map(exec, &pairs, |&(a, b)| {
        Ok::<_, Error>(
            theta_scan(f1, f2, fe, m, a, b, thetas)?
                .into_iter()
                .map(|(theta, residual)| GridPoint { epsilon1: a, epsilon2: b, theta, residual })
                .collect::<Vec<_>>(),
        )
    })?;
    Ok(rows.into_iter().flatten().collect())
}
