//! Rotating-wave coupling operator and dark states of the `m–m` resonance.
//!
//! Component `j` of the field drives only ground level `j`; the coupling
//! from `|F_j, m>` to `|Fe, μ>` is
//!
//! ```text
//! V(μ; j, m) = d(F_j, Fe) · E_j · C^{Fe μ}_{F_j m, 1 q} · (a_j)^q,   q = μ - m
//! ```
//!
//! A dark state of the `m–m` resonance is a superposition
//! `A1 |F1, m> + A2 |F2, m>` annihilated by `V`.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::dipole_cg_or_zero;
use crate::error::{Error, Result};
use crate::field::{BichromaticField, CombField};
use crate::halfint::HalfInt;
use crate::par::{self, Execution};
use crate::scheme::{GroundLevel, LevelScheme};

/// Relative singular-value threshold below which a direction counts as null.
pub const NULL_THRESHOLD: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A ground Zeeman state `|F_level, m>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundState {
    pub level: GroundLevel,
    pub f: HalfInt,
    pub m: HalfInt,
}

/// Ground Zeeman basis: all `m` of `F1`, then all `m` of `F2`.
pub fn ground_basis(scheme: &LevelScheme) -> Vec<GroundState> {
    (0..2)
        .flat_map(|level| {
            let f = scheme.ground_f(level);
            f.projections().map(move |m| GroundState { level, f, m })
        })
        .collect()
}

/// Column of `|F_level, m>` in [`ground_basis`] order.
pub fn ground_index(scheme: &LevelScheme, level: GroundLevel, m: HalfInt) -> usize {
    let f = scheme.ground_f(level);
    let offset = if level == 0 { 0 } else { scheme.f1().multiplicity() as usize };
    offset + ((m + f).twice() / 2) as usize
}

/// Coupling of every ground sublevel to the sublevels of one excited level.
#[derive(Clone, Debug)]
pub struct CouplingMatrix {
    pub fe: HalfInt,
    /// Rows `μ = -Fe..=Fe`, columns in [`ground_basis`] order.
    pub entries: Array2<Complex64>,
    pub columns: Vec<GroundState>,
}

impl CouplingMatrix {
    pub fn row(&self, mu: HalfInt) -> usize {
        ((mu + self.fe).twice() / 2) as usize
    }

    /// Field component responsible for a column: component `j` drives level `j`.
    pub fn component_of_column(&self, col: usize) -> usize {
        self.columns[col].level
    }
}

fn coupling_entry(
    scheme: &LevelScheme,
    field: &BichromaticField,
    level: GroundLevel,
    m: HalfInt,
    fe: HalfInt,
    mu: HalfInt,
) -> Result<Complex64> {
    let q = (mu - m).twice();
    if q != 2 && q != -2 {
        return Ok(ZERO);
    }
    let q = q / 2;
    let f = scheme.ground_f(level);
    let d = scheme.dipole(level, fe);
    if d.is_zero() {
        return Ok(ZERO);
    }
    let c = dipole_cg_or_zero(f, m, q, fe, mu)?;
    let comp = field.component(level);
    Ok(comp.amplitude * comp.spherical_q(q) * (d.to_f64() * c.to_f64()))
}

/// Coupling block for excited level `fe`.
pub fn build_coupling(scheme: &LevelScheme, field: &BichromaticField, fe: HalfInt) -> Result<CouplingMatrix> {
    if !scheme.excited().contains(&fe) {
        return Err(Error::domain(format!("excited level {fe} is not part of the scheme")));
    }
    if !scheme.couples(0, fe) && !scheme.couples(1, fe) {
        return Err(Error::domain(format!("excited level {fe} violates the selection rules for both ground levels")));
    }
    let columns = ground_basis(scheme);
    let mut entries = Array2::zeros((fe.multiplicity() as usize, columns.len()));
    for (row, mu) in fe.projections().enumerate() {
        for (col, g) in columns.iter().enumerate() {
            entries[[row, col]] = coupling_entry(scheme, field, g.level, g.m, fe, mu)?;
        }
    }
    Ok(CouplingMatrix { fe, entries, columns })
}

/// The two Λ systems sharing `|F1, m>` and `|F2, m>`: `σ+` legs to
/// `|Fe, m+1>` and `σ-` legs to `|Fe, m-1>`. A leg whose excited sublevel
/// does not exist is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaSystem {
    pub fe: HalfInt,
    pub m: HalfInt,
    /// `[F1 leg, F2 leg]` to `|Fe, m+1>`.
    pub plus: [Complex64; 2],
    /// `[F1 leg, F2 leg]` to `|Fe, m-1>`.
    pub minus: [Complex64; 2],
}

pub fn lambda_system(scheme: &LevelScheme, field: &BichromaticField, fe: HalfInt, m: HalfInt) -> Result<LambdaSystem> {
    scheme.check_common_projection(m)?;
    if !scheme.excited().contains(&fe) {
        return Err(Error::domain(format!("excited level {fe} is not part of the scheme")));
    }
    let leg = |level, mu| coupling_entry(scheme, field, level, m, fe, mu);
    let up = m + HalfInt::ONE;
    let down = m - HalfInt::ONE;
    Ok(LambdaSystem { fe, m, plus: [leg(0, up)?, leg(1, up)?], minus: [leg(0, down)?, leg(1, down)?] })
}

/// `A1 |F1, m> + A2 |F2, m>` with `|A1|² + |A2|² = 1`, `A1` real and
/// non-negative (or `A2` real positive when `A1 = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarkStateCandidate {
    pub m: HalfInt,
    pub a1: Complex64,
    pub a2: Complex64,
    /// `‖V ψ‖ / ‖V‖` for the coupling it was computed from, with `‖·‖` the
    /// spectral norm.
    pub residual: f64,
}

impl DarkStateCandidate {
    fn canonical(m: HalfInt, a1: Complex64, a2: Complex64) -> Self {
        let norm = (a1.norm_sqr() + a2.norm_sqr()).sqrt();
        let (a1, a2) = (a1 / norm, a2 / norm);
        let phase = if a1.norm() > 1e-14 { a1.conj() / a1.norm() } else { a2.conj() / a2.norm() };
        DarkStateCandidate { m, a1: a1 * phase, a2: a2 * phase, residual: 0.0 }
    }

    /// `A2 / A1`, infinite when `A1 = 0`.
    pub fn ratio(&self) -> Complex64 {
        self.a2 / self.a1
    }

    /// `|<self|other>|²`.
    pub fn overlap(&self, other: &DarkStateCandidate) -> f64 {
        (self.a1.conj() * other.a1 + self.a2.conj() * other.a2).norm_sqr()
    }

    pub fn amplitudes(&self) -> Array1<Complex64> {
        Array1::from(vec![self.a1, self.a2])
    }
}

/// Dark state of a single Λ system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaDark {
    Dark(DarkStateCandidate),
    /// Both legs vanish; this circular component imposes no constraint.
    Unconstrained,
}

impl LambdaDark {
    pub fn candidate(&self) -> Option<&DarkStateCandidate> {
        match self {
            LambdaDark::Dark(c) => Some(c),
            LambdaDark::Unconstrained => None,
        }
    }
}

fn lambda_dark(m: HalfInt, legs: [Complex64; 2]) -> LambdaDark {
    let [c1, c2] = legs;
    let scale = c1.norm().max(c2.norm());
    if scale == 0.0 {
        return LambdaDark::Unconstrained;
    }
    // c1 A1 + c2 A2 = 0  =>  (A1, A2) ∝ (c2, -c1), i.e. A2/A1 = -c1/c2
    let mut cand = DarkStateCandidate::canonical(m, c2, -c1);
    cand.residual = (c1 * cand.a1 + c2 * cand.a2).norm() / (c1.norm_sqr() + c2.norm_sqr()).sqrt();
    LambdaDark::Dark(cand)
}

/// Dark states of the `σ+` and `σ-` Λ systems through `fe`.
pub fn analytic_dark_pair(
    scheme: &LevelScheme,
    field: &BichromaticField,
    fe: HalfInt,
    m: HalfInt,
) -> Result<(LambdaDark, LambdaDark)> {
    let lam = lambda_system(scheme, field, fe, m)?;
    Ok((lambda_dark(m, lam.plus), lambda_dark(m, lam.minus)))
}

/// Which excited levels to stack when searching for a common null vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExcitedSet {
    All,
    Only(HalfInt),
}

impl ExcitedSet {
    pub fn levels(self, scheme: &LevelScheme) -> Vec<HalfInt> {
        match self {
            ExcitedSet::All => scheme.excited().to_vec(),
            ExcitedSet::Only(fe) => vec![fe],
        }
    }

    /// `All` for unresolved schemes, otherwise the given level.
    pub fn from_flag(use_all_excited: bool, single: HalfInt) -> Self {
        if use_all_excited {
            ExcitedSet::All
        } else {
            ExcitedSet::Only(single)
        }
    }
}

impl std::fmt::Display for ExcitedSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExcitedSet::All => write!(f, "all Fe"),
            ExcitedSet::Only(fe) => write!(f, "Fe={fe}"),
        }
    }
}

/// Couplings of `|F1, m>`, `|F2, m>` to every excited sublevel of the
/// selected levels: one row per excited sublevel, two columns.
pub fn restricted_coupling(
    scheme: &LevelScheme,
    field: &BichromaticField,
    m: HalfInt,
    excited: ExcitedSet,
) -> Result<Array2<Complex64>> {
    scheme.check_common_projection(m)?;
    let levels = excited.levels(scheme);
    let rows: usize = levels.iter().map(|fe| fe.multiplicity() as usize).sum();
    let mut out = Array2::zeros((rows, 2));
    let mut row = 0;
    for fe in levels {
        if !scheme.excited().contains(&fe) {
            return Err(Error::domain(format!("excited level {fe} is not part of the scheme")));
        }
        for mu in fe.projections() {
            for level in 0..2 {
                out[[row, level]] = coupling_entry(scheme, field, level, m, fe, mu)?;
            }
            row += 1;
        }
    }
    Ok(out)
}

/// Singular values (descending) and right singular vectors (as columns).
pub(crate) fn svd_right(a: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    let (_, sv, vt) = a.svd(false, true)?;
    let vt = vt.ok_or_else(|| Error::numerical("SVD returned no right singular vectors"))?;
    let v = vt.t().mapv(|z| z.conj());
    Ok((sv.to_vec(), v))
}

/// Null vectors of a stacked two-column coupling.
pub fn null_space_of(a: &Array2<Complex64>, m: HalfInt, tol: f64) -> Result<Vec<DarkStateCandidate>> {
    let (sv, v) = svd_right(a)?;
    let s_max = sv.first().copied().unwrap_or(0.0);
    if s_max == 0.0 {
        return Ok(vec![
            DarkStateCandidate { m, a1: Complex64::new(1.0, 0.0), a2: ZERO, residual: 0.0 },
            DarkStateCandidate { m, a1: ZERO, a2: Complex64::new(1.0, 0.0), residual: 0.0 },
        ]);
    }
    let rank = sv.iter().filter(|&&s| s > tol * s_max).count();
    Ok((rank..2)
        .map(|k| {
            let mut cand = DarkStateCandidate::canonical(m, v[[0, k]], v[[1, k]]);
            cand.residual = residual_of(a, &cand, s_max);
            cand
        })
        .collect())
}

fn residual_of(a: &Array2<Complex64>, cand: &DarkStateCandidate, spectral_norm: f64) -> f64 {
    if spectral_norm == 0.0 {
        return 0.0;
    }
    let applied = a.dot(&cand.amplitudes());
    applied.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / spectral_norm
}

/// Spectral norm of a small matrix.
pub fn spectral_norm(a: &Array2<Complex64>) -> Result<f64> {
    Ok(svd_right(a)?.0.first().copied().unwrap_or(0.0))
}

/// `‖V ψ‖ / ‖V‖` of a candidate against the selected excited levels.
pub fn darkness_residual(
    scheme: &LevelScheme,
    field: &BichromaticField,
    cand: &DarkStateCandidate,
    excited: ExcitedSet,
) -> Result<f64> {
    let a = restricted_coupling(scheme, field, cand.m, excited)?;
    Ok(residual_of(&a, cand, spectral_norm(&a)?))
}

/// Dark `m–m` states: the null space of the coupling restricted to
/// `span{|F1, m>, |F2, m>}`, stacked over the selected excited levels.
pub fn null_space_dark(
    scheme: &LevelScheme,
    field: &BichromaticField,
    m: HalfInt,
    excited: ExcitedSet,
) -> Result<Vec<DarkStateCandidate>> {
    null_space_dark_with_tol(scheme, field, m, excited, NULL_THRESHOLD)
}

pub fn null_space_dark_with_tol(
    scheme: &LevelScheme,
    field: &BichromaticField,
    m: HalfInt,
    excited: ExcitedSet,
    tol: f64,
) -> Result<Vec<DarkStateCandidate>> {
    let a = restricted_coupling(scheme, field, m, excited)?;
    null_space_of(&a, m, tol)
}

/// Singular values of the stacked restricted coupling, descending.
pub fn stacked_singular_values(
    scheme: &LevelScheme,
    field: &BichromaticField,
    m: HalfInt,
    excited: ExcitedSet,
) -> Result<Vec<f64>> {
    let a = restricted_coupling(scheme, field, m, excited)?;
    Ok(svd_right(&a)?.0)
}

/// [`null_space_dark`] for every common projection `m`.
pub fn dark_states_all_m(
    scheme: &LevelScheme,
    field: &BichromaticField,
    excited: ExcitedSet,
    exec: Execution,
) -> Result<Vec<(HalfInt, Vec<DarkStateCandidate>)>> {
    let ms = scheme.common_projections();
    par::try_map(exec, &ms, |&m| Ok((m, null_space_dark(scheme, field, m, excited)?)))
}

/// A ground sublevel that no field component couples to any excited level,
/// hence dark for every Raman detuning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapState {
    pub state: GroundState,
    pub m: HalfInt,
}

/// Ground sublevels left uncoupled by their own field component through
/// every excited level of the scheme.
pub fn trap_states(scheme: &LevelScheme, field: &BichromaticField) -> Result<Vec<TrapState>> {
    let blocks = scheme.excited().iter().map(|&fe| build_coupling(scheme, field, fe)).collect::<Result<Vec<_>>>()?;
    let columns = ground_basis(scheme);
    let column_norm = |col: usize| -> f64 {
        blocks
            .iter()
            .map(|b| b.entries.slice(s![.., col]).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    };
    let norms: Vec<f64> = (0..columns.len()).map(column_norm).collect();
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    Ok(columns
        .iter()
        .zip(&norms)
        .filter(|(_, &n)| n <= 1e-12 * scale)
        .map(|(g, _)| TrapState { state: *g, m: g.m })
        .collect())
}

/// A state dark for every adjacent pair of a comb, with the largest
/// per-pair residual. `None` if no single common state exists.
pub fn comb_dark_check(
    scheme: &LevelScheme,
    comb: &CombField,
    m: HalfInt,
    excited: ExcitedSet,
) -> Result<Option<DarkStateCandidate>> {
    let pairs: Vec<BichromaticField> = comb.adjacent_pairs().collect();
    let blocks = pairs.iter().map(|p| restricted_coupling(scheme, p, m, excited)).collect::<Result<Vec<_>>>()?;
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut stacked = Array2::zeros((rows, 2));
    let mut r = 0;
    for b in &blocks {
        stacked.slice_mut(s![r..r + b.nrows(), ..]).assign(b);
        r += b.nrows();
    }
    let candidates = null_space_of(&stacked, m, NULL_THRESHOLD)?;
    let [cand] = candidates.as_slice() else {
        return Ok(None);
    };
    let mut worst: f64 = 0.0;
    for b in &blocks {
        worst = worst.max(residual_of(b, cand, spectral_norm(b)?));
    }
    Ok(Some(DarkStateCandidate { residual: worst, ..*cand }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{comb_from_pair, named_config, ConfigKind, FieldComponent};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn field(kind: ConfigKind, eps: &[f64]) -> BichromaticField {
        named_config(kind, eps, [ONE, ONE]).unwrap()
    }

    fn symmetric_field(f: f64, m: f64) -> BichromaticField {
        let eps = (-m / (1.0 + f)).asin() / 2.0;
        field(ConfigKind::EpsPerpMinusEps, &[eps])
    }

    #[test]
    fn sigma_plus_only_has_q_plus_entries() {
        let scheme = LevelScheme::cs_d1();
        let f = field(ConfigKind::SigmaPlusSigmaPlus, &[]);
        for &fe in scheme.excited() {
            let c = build_coupling(&scheme, &f, fe).unwrap();
            for (row, mu) in fe.projections().enumerate() {
                for (col, g) in c.columns.iter().enumerate() {
                    if c.entries[[row, col]].norm() > 0.0 {
                        assert_eq!(mu - g.m, HalfInt::ONE);
                    }
                }
            }
        }
    }

    #[test]
    fn selection_rule_is_structural() {
        let scheme = LevelScheme::cs_d2();
        let f = field(ConfigKind::EpsPerpEps, &[0.3, -0.1]);
        for &fe in scheme.excited() {
            let c = build_coupling(&scheme, &f, fe).unwrap();
            for (row, mu) in fe.projections().enumerate() {
                for (col, g) in c.columns.iter().enumerate() {
                    let dm = (mu - g.m).twice().abs();
                    if dm != 2 {
                        assert_eq!(c.entries[[row, col]], ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn cesium_d1_lin_perp_lin_has_two_legged_lambdas() {
        let scheme = LevelScheme::cs_d1();
        let f = field(ConfigKind::LinPerpLin, &[]);
        let c = build_coupling(&scheme, &f, h(8)).unwrap();
        // every |F, m> of both levels reaches both μ = m ± 1 where they exist
        for (col, g) in c.columns.iter().enumerate() {
            for dm in [-2, 2] {
                let mu = g.m + h(dm);
                if h(8).admits_projection(mu) {
                    assert!(c.entries[[c.row(mu), col]].norm() > 1e-3, "{g:?} -> {mu}");
                }
            }
        }
        let lam = lambda_system(&scheme, &f, h(8), HalfInt::ZERO).unwrap();
        assert!(lam.plus.iter().chain(&lam.minus).all(|z| z.norm() > 1e-3));
        assert_eq!(c.component_of_column(0), 0);
        assert_eq!(c.component_of_column(c.columns.len() - 1), 1);
        assert!(build_coupling(&scheme, &f, h(10)).is_err());
    }

    #[test]
    fn stretched_lambda_loses_sigma_plus_leg() {
        let scheme = LevelScheme::generic(h(4), h(4), vec![h(4)], false).unwrap();
        let f = field(ConfigKind::EpsParEps, &[0.2]);
        let lam = lambda_system(&scheme, &f, h(4), h(4)).unwrap();
        assert_eq!(lam.plus, [ZERO, ZERO]);
        assert!(lam.minus[0].norm() > 0.0);
        assert!(lambda_system(&scheme, &f, h(4), h(6)).is_err());
        let f = field(ConfigKind::SigmaPlusSigmaPlus, &[]);
        let lam = lambda_system(&LevelScheme::cs_d1(), &f, h(8), HalfInt::ZERO).unwrap();
        assert_eq!(lam.minus, [ZERO, ZERO]);
        let (_, minus) = analytic_dark_pair(&LevelScheme::cs_d1(), &f, h(8), HalfInt::ZERO).unwrap();
        assert_eq!(minus, LambdaDark::Unconstrained);
    }

    #[test]
    fn equal_legs_give_antisymmetric_dark_state() {
        let scheme = LevelScheme::generic(h(4), h(4), vec![h(4)], false).unwrap();
        let f = field(ConfigKind::EpsParEps, &[0.1]);
        let (plus, minus) = analytic_dark_pair(&scheme, &f, h(4), HalfInt::ZERO).unwrap();
        let plus = plus.candidate().unwrap();
        let s = (0.5f64).sqrt();
        assert!((plus.a1 - s).norm() < 1e-15 && (plus.a2 + s).norm() < 1e-15);
        assert!(plus.overlap(minus.candidate().unwrap()) > 1.0 - 1e-15);
    }

    #[test]
    fn cesium_d1_symmetric_dark_state_matches_closed_form() {
        // (|F, m> - i (E1/E2) |F+1, m>) / N
        let scheme = LevelScheme::cs_d1();
        for tm in [-6, -2, 0, 2, 4, 6] {
            let m = h(tm);
            let f = symmetric_field(3.0, m.to_f64());
            for &fe in scheme.excited() {
                let (plus, minus) = analytic_dark_pair(&scheme, &f, fe, m).unwrap();
                for c in [plus, minus].iter().filter_map(LambdaDark::candidate) {
                    assert!((c.ratio() - Complex64::new(0.0, -1.0)).norm() < 1e-12, "m={m} fe={fe} {c:?}");
                }
            }
            let e = Complex64::new(0.6, 0.3);
            let scaled = f.scaled(e, ONE);
            let (plus, _) = analytic_dark_pair(&scheme, &scaled, h(8), m).unwrap();
            let r = plus.candidate().unwrap().ratio();
            assert!((r - Complex64::new(0.0, -1.0) * e).norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_dark_plus_annihilates_sigma_plus_rows() {
        let scheme = LevelScheme::cs_d2();
        let f = field(ConfigKind::EpsPerpEps, &[0.2, -0.35]);
        for &fe in &[h(6), h(8)] {
            let c = build_coupling(&scheme, &f, fe).unwrap();
            for m in scheme.common_projections() {
                let (plus, _) = analytic_dark_pair(&scheme, &f, fe, m).unwrap();
                let Some(plus) = plus.candidate() else { continue };
                let mu = m + HalfInt::ONE;
                let row = c.entries.row(c.row(mu));
                let i1 = ground_index(&scheme, 0, m);
                let i2 = ground_index(&scheme, 1, m);
                let applied = row[i1] * plus.a1 + row[i2] * plus.a2;
                let scale = (row[i1].norm_sqr() + row[i2].norm_sqr()).sqrt();
                assert!(applied.norm() / scale < 1e-12);
                assert!(plus.residual < 1e-12);
            }
        }
    }

    #[test]
    fn null_space_matches_analytic_when_condition_holds() {
        let scheme = LevelScheme::cs_d1().with_excited(vec![h(8)]).unwrap();
        let m = h(2);
        let f = symmetric_field(3.0, 1.0);
        let found = null_space_dark(&scheme, &f, m, ExcitedSet::Only(h(8))).unwrap();
        assert_eq!(found.len(), 1);
        let (plus, minus) = analytic_dark_pair(&scheme, &f, h(8), m).unwrap();
        for c in [plus, minus] {
            let c = c.candidate().unwrap();
            assert!((c.ratio() - found[0].ratio()).norm() < 1e-10 * c.ratio().norm());
        }
        assert!(found[0].residual < 1e-12);
        // a field that violates the condition has no dark state
        let off = field(ConfigKind::LinPerpLin, &[]);
        assert!(null_space_dark(&scheme, &off, m, ExcitedSet::Only(h(8))).unwrap().is_empty());
    }

    #[test]
    fn unresolved_d1_keeps_dark_state_d2_loses_it() {
        let d1 = LevelScheme::cs_d1();
        let d2 = LevelScheme::cs_d2();
        let f = symmetric_field(3.0, 1.0);
        let found = null_space_dark(&d1, &f, h(2), ExcitedSet::All).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0].ratio() - Complex64::new(0.0, -1.0)).norm() < 1e-10);
        let lin = field(ConfigKind::LinPerpLin, &[]);
        assert!(null_space_dark(&d2, &lin, HalfInt::ZERO, ExcitedSet::All).unwrap().is_empty());
        assert_eq!(null_space_dark(&d2, &lin, HalfInt::ZERO, ExcitedSet::Only(h(8))).unwrap().len(), 1);
    }

    #[test]
    fn sigma_plus_traps_end_state() {
        let scheme = LevelScheme::cs_d1();
        let traps = trap_states(&scheme, &field(ConfigKind::SigmaPlusSigmaPlus, &[])).unwrap();
        assert_eq!(traps.len(), 1);
        assert_eq!((traps[0].state.level, traps[0].m), (1, h(8)));
        let traps = trap_states(&scheme, &field(ConfigKind::SigmaMinusSigmaMinus, &[])).unwrap();
        assert_eq!(traps.len(), 1);
        assert_eq!((traps[0].state.level, traps[0].m), (1, h(-8)));
        assert!(trap_states(&scheme, &field(ConfigKind::LinPerpLin, &[])).unwrap().is_empty());
    }

    #[test]
    fn comb_checks() {
        let scheme = LevelScheme::cs_d1();
        let base = field(ConfigKind::EpsPerpEps, &[0.3]);
        let m = HalfInt::ZERO;
        let pair_only =
            comb_dark_check(&scheme, &comb_from_pair(&base, 2).unwrap(), m, ExcitedSet::All).unwrap().unwrap();
        let direct = null_space_dark(&scheme, &base, m, ExcitedSet::All).unwrap();
        assert_eq!(direct.len(), 1);
        assert!(pair_only.overlap(&direct[0]) > 1.0 - 1e-12);

        let comb = comb_from_pair(&base, 5).unwrap();
        let cand = comb_dark_check(&scheme, &comb, m, ExcitedSet::All).unwrap().unwrap();
        assert!(cand.residual < 1e-12);

        let mut comps = comb_from_pair(&base, 3).unwrap().components().to_vec();
        comps[2] = FieldComponent { ellipticity: -0.3, ..comps[2] };
        let bad = CombField::new(comps).unwrap();
        assert!(comb_dark_check(&scheme, &bad, m, ExcitedSet::All).unwrap().is_none());
    }

    #[test]
    fn per_m_map_agrees_between_modes() {
        let scheme = LevelScheme::cs_d1();
        let f = field(ConfigKind::EpsPerpEps, &[FRAC_PI_4 / 3.0]);
        let seq = dark_states_all_m(&scheme, &f, ExcitedSet::All, Execution::Sequential).unwrap();
        let par = dark_states_all_m(&scheme, &f, ExcitedSet::All, Execution::Parallel).unwrap();
        assert_eq!(seq.len(), 7);
        for ((m1, a), (m2, b)) in seq.iter().zip(&par) {
            assert_eq!(m1, m2);
            assert_eq!(a.len(), b.len());
        }
        // ε⊥ε is dark only for m = 0
        for (m, c) in &seq {
            assert_eq!(c.len(), usize::from(*m == HalfInt::ZERO), "m = {m}");
        }
        let _ = FRAC_PI_2;
    }
}
