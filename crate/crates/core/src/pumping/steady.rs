//! Steady states as null vectors of the Liouvillian.
//!
//! Every coupling changes `m` by one and moves between ground and excited
//! manifolds, and each jump operator shifts `m + [excited]` by a fixed
//! amount. The parity of `m - m_0 + [excited]` is therefore conserved on
//! both sides of `ρ`, and the Liouvillian splits into the block of elements
//! `ρ_ab` with equal parities, which holds every population, and the block
//! with opposite parities. Only the first block is built.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Solve, SVD};
use num_complex::Complex64;

use super::system::{DensityState, Lindblad, SimParams, ZeemanModel};
use crate::error::{Error, Result};
use crate::field::BichromaticField;
use crate::scheme::LevelScheme;

/// Singular values below this fraction of the largest count as zero.
pub const STEADY_NULL_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Map between matrix elements `(a, b)` of the even block and vector slots.
#[derive(Clone, Debug)]
pub struct SectorIndex {
    n: usize,
    pairs: Vec<(usize, usize)>,
    slot: Vec<usize>,
}

impl SectorIndex {
    pub fn new(system: &Lindblad) -> Self {
        let states = system.basis.states();
        let n = states.len();
        let m0 = states[0].m.twice();
        let parity: Vec<i32> =
            states.iter().map(|s| ((s.m.twice() - m0) / 2 + i32::from(s.is_excited())).rem_euclid(2)).collect();
        let mut pairs = Vec::new();
        let mut slot = vec![usize::MAX; n * n];
        for a in 0..n {
            for b in 0..n {
                if parity[a] == parity[b] {
                    slot[a * n + b] = pairs.len();
                    pairs.push((a, b));
                }
            }
        }
        SectorIndex { n, pairs, slot }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn slot(&self, a: usize, b: usize) -> Result<usize> {
        match self.slot[a * self.n + b] {
            usize::MAX => Err(Error::numerical(format!("Liouvillian leaks out of the even block at ({a}, {b})"))),
            s => Ok(s),
        }
    }

    pub fn to_matrix(&self, v: impl Fn(usize) -> Complex64) -> Array2<Complex64> {
        let mut rho = Array2::zeros((self.n, self.n));
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            rho[[a, b]] = v(k);
        }
        rho
    }
}

fn by_column(n: usize, entries: &[(usize, usize, Complex64)]) -> Vec<Vec<(usize, Complex64)>> {
    let mut cols = vec![Vec::new(); n];
    for &(i, j, z) in entries {
        cols[j].push((i, z));
    }
    cols
}

/// Even-block Liouvillian as a dense matrix acting on [`SectorIndex`] slots.
pub fn liouvillian_sector(system: &Lindblad) -> Result<(Array2<Complex64>, SectorIndex)> {
    let index = SectorIndex::new(system);
    let n = system.dim();
    let ns = index.len();
    let eff = by_column(n, &system.effective.entries);
    let jumps: Vec<_> = system.jumps.iter().map(|l| by_column(n, &l.entries)).collect();
    let mut lv = Array2::<Complex64>::zeros((ns, ns));
    for (col, &(c, d)) in index.pairs().iter().enumerate() {
        // -i H_eff E_cd
        for &(i, a) in &eff[c] {
            lv[[index.slot(i, d)?, col]] += -I * a;
        }
        // +i E_cd H_eff†
        for &(i, a) in &eff[d] {
            lv[[index.slot(c, i)?, col]] += I * a.conj();
        }
        // L E_cd L†
        for l in &jumps {
            for &(a, x) in &l[c] {
                for &(b, y) in &l[d] {
                    lv[[index.slot(a, b)?, col]] += x * y.conj();
                }
            }
        }
    }
    Ok((lv, index))
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    /// The trace-normalized steady state, when the manifold is
    /// one-dimensional.
    pub state: Option<DensityState>,
    /// Dimension of the steady manifold within the even block.
    pub dimension: usize,
    /// Null vectors as matrices; a basis of the manifold.
    pub basis: Vec<Array2<Complex64>>,
    /// Smallest singular value kept as nonzero, relative to the largest.
    pub gap: f64,
}

impl SteadyState {
    pub fn is_degenerate(&self) -> bool {
        self.dimension > 1
    }
}

pub fn steady_state(
    scheme: &LevelScheme,
    field: &BichromaticField,
    zeeman: &ZeemanModel,
    params: &SimParams,
) -> Result<SteadyState> {
    let system = Lindblad::new(scheme, field, zeeman, params)?;
    steady_state_of(&system)
}

pub(crate) fn steady_state_of(system: &Lindblad) -> Result<SteadyState> {
    let (lv, index) = liouvillian_sector(system)?;
    let (_, sv, _) = lv.svd(false, false)?;
    let s_max = sv[0];
    let rank = sv.iter().filter(|&&s| s > STEADY_NULL_TOL * s_max).count();
    let dimension = sv.len() - rank;
    if dimension == 0 {
        return Err(Error::numerical(format!(
            "Liouvillian has no zero mode (smallest singular value {:e} of {:e})",
            sv[sv.len() - 1],
            s_max
        )));
    }
    let gap = if rank > 0 { sv[rank - 1] / s_max } else { 0.0 };
    if dimension > 1 {
        let (_, _, vt) = lv.svd(false, true)?;
        let vt = vt.ok_or_else(|| Error::numerical("SVD returned no right singular vectors"))?;
        let basis = (rank..sv.len()).map(|k| index.to_matrix(|j| vt[[k, j]].conj())).collect();
        return Ok(SteadyState { state: None, dimension, basis, gap });
    }
    let rho = unique_null_state(&lv, &index, s_max)?;
    Ok(SteadyState { basis: vec![rho.rho.clone()], state: Some(rho), dimension, gap })
}

/// The populations' rows of the Liouvillian sum to zero, so one of them
/// can be traded for the trace condition; the system is then regular when
/// the null space is one-dimensional.
fn unique_null_state(lv: &Array2<Complex64>, index: &SectorIndex, s_max: f64) -> Result<DensityState> {
    let diagonal: Vec<usize> = index.pairs().iter().enumerate().filter(|(_, (a, b))| a == b).map(|(k, _)| k).collect();
    let pivot = diagonal[0];
    let mut a = lv.clone();
    a.row_mut(pivot).fill(Complex64::new(0.0, 0.0));
    for &k in &diagonal {
        a[[pivot, k]] = Complex64::new(s_max, 0.0);
    }
    let mut rhs = Array1::zeros(index.len());
    rhs[pivot] = Complex64::new(s_max, 0.0);
    let x = a.solve_into(rhs)?;
    let residual = lv.dot(&x).iter().map(|z| z.norm()).fold(0.0, f64::max) / s_max;
    if residual.is_nan() || residual >= 1e-9 {
        return Err(Error::numerical(format!("steady-state solve left residual {residual:e}")));
    }
    let rho = DensityState { rho: index.to_matrix(|k| x[k]) }.hermitian_part();
    Ok(DensityState { rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{named_config, ConfigKind};
    use crate::halfint::HalfInt;
    use crate::pumping::system::Basis;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn small() -> (LevelScheme, BichromaticField) {
        let scheme = LevelScheme::generic(
            HalfInt::from_int(1),
            HalfInt::from_int(2),
            vec![HalfInt::from_int(1), HalfInt::from_int(2)],
            false,
        )
        .unwrap();
        (scheme, named_config(ConfigKind::LinPerpLin, &[], [ONE, ONE]).unwrap())
    }

    #[test]
    fn sector_matches_full_rhs() {
        let (scheme, field) = small();
        let sys = Lindblad::new(&scheme, &field, &ZeemanModel::lande(&scheme, 4.0), &SimParams::default()).unwrap();
        let (lv, index) = liouvillian_sector(&sys).unwrap();
        // compare on a pseudo-random even-block matrix
        let x: Vec<Complex64> =
            (0..index.len()).map(|k| Complex64::new((k as f64 * 0.3).sin(), (k as f64 * 0.7).cos())).collect();
        let rho = index.to_matrix(|k| x[k]);
        let direct = sys.rhs(&rho);
        let via = lv.dot(&ndarray::Array1::from(x));
        let via = index.to_matrix(|k| via[k]);
        assert!((&direct - &via).iter().all(|z| z.norm() < 1e-12));
        assert!(index.len() < sys.dim() * sys.dim());
    }

    #[test]
    fn steady_state_is_physical() {
        let (scheme, field) = small();
        let z = ZeemanModel::lande(&scheme, 4.0);
        let ss = steady_state(&scheme, &field, &z, &SimParams::default()).unwrap();
        assert_eq!(ss.dimension, 1);
        let rho = ss.state.unwrap();
        let hy = rho.hygiene().unwrap();
        assert!(hy.is_clean(), "{hy:?}");
        let sys = Lindblad::new(&scheme, &field, &z, &SimParams::default()).unwrap();
        assert!(sys.rhs(&rho.rho).iter().all(|z| z.norm() < 1e-10));
        assert_eq!(Basis::new(&scheme).len(), rho.rho.nrows());
    }
}
