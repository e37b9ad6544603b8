use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dopri::Dopri5;
use crate::angular::{dipole_cg_or_zero, LineId};
use crate::coupling::{DarkStateCandidate, GroundState};
use crate::error::{Error, Result};
use crate::field::BichromaticField;
use crate::halfint::HalfInt;
use crate::scheme::{GroundLevel, LevelScheme};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateKind {
    Ground(GroundLevel),
    /// Index into the scheme's excited levels.
    Excited(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub kind: StateKind,
    pub f: HalfInt,
    pub m: HalfInt,
}

impl BasisState {
    pub fn is_excited(&self) -> bool {
        matches!(self.kind, StateKind::Excited(_))
    }
}

/// `F1` sublevels, `F2` sublevels, then every excited level in scheme order.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    states: Vec<BasisState>,
    n_ground: usize,
    offsets: Vec<usize>,
}

impl Basis {
    pub fn new(scheme: &LevelScheme) -> Self {
        let mut states = Vec::new();
        for level in 0..2 {
            let f = scheme.ground_f(level);
            states.extend(f.projections().map(|m| BasisState { kind: StateKind::Ground(level), f, m }));
        }
        let n_ground = states.len();
        let mut offsets = Vec::new();
        for (k, &fe) in scheme.excited().iter().enumerate() {
            offsets.push(states.len());
            states.extend(fe.projections().map(|m| BasisState { kind: StateKind::Excited(k), f: fe, m }));
        }
        Basis { states, n_ground, offsets }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_ground(&self) -> usize {
        self.n_ground
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn ground_index(&self, scheme: &LevelScheme, level: GroundLevel, m: HalfInt) -> usize {
        crate::coupling::ground_index(scheme, level, m)
    }

    pub fn excited_index(&self, k: usize, mu: HalfInt) -> usize {
        let fe = self.states[self.offsets[k]].f;
        self.offsets[k] + ((mu + fe).twice() / 2) as usize
    }

    /// Embed a dark-state candidate as a full-basis vector.
    pub fn embed(&self, scheme: &LevelScheme, cand: &DarkStateCandidate) -> Array1<Complex64> {
        let mut v = Array1::zeros(self.len());
        v[self.ground_index(scheme, 0, cand.m)] = cand.a1;
        v[self.ground_index(scheme, 1, cand.m)] = cand.a2;
        v
    }

    pub fn embed_ground(&self, scheme: &LevelScheme, g: &GroundState) -> usize {
        self.ground_index(scheme, g.level, g.m)
    }
}

/// Default spacing of adjacent `m–m` resonances, in units of `Γ`. At the
/// default Rabi frequencies the two-photon resonances are a few `10^-3 Γ`
/// wide, so neighbouring resonances stay well separated.
pub const DEFAULT_ZEEMAN_SPLITTING: f64 = 2.0;

/// Linear Zeeman shifts `g m B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeemanModel {
    pub g_ground: [f64; 2],
    pub g_excited: Vec<f64>,
    /// Field in energy units: a sublevel with `g m = 1` shifts by `b`.
    pub b: f64,
}

fn lande(gj: f64, j: f64, i: f64, f: f64) -> f64 {
    if f == 0.0 {
        return 0.0;
    }
    gj * (f * (f + 1.0) + j * (j + 1.0) - i * (i + 1.0)) / (2.0 * f * (f + 1.0))
}

impl ZeemanModel {
    /// Hyperfine Landé factors for alkali schemes (`g_J = 2` in the ground
    /// state, `2/3` or `4/3` in the excited state, nuclear moment
    /// neglected). Generic schemes get `g1 = -1/2`, `g2 = 1/2` and
    /// unshifted excited levels.
    pub fn lande(scheme: &LevelScheme, b: f64) -> Self {
        match scheme.line() {
            Some(line) => {
                let i = scheme.nuclear_spin().to_f64();
                let gje = match line {
                    LineId::D1 => 2.0 / 3.0,
                    LineId::D2 => 4.0 / 3.0,
                };
                let je = line.excited_j().to_f64();
                ZeemanModel {
                    g_ground: [lande(2.0, 0.5, i, scheme.f1().to_f64()), lande(2.0, 0.5, i, scheme.f2().to_f64())],
                    g_excited: scheme.excited().iter().map(|fe| lande(gje, je, i, fe.to_f64())).collect(),
                    b,
                }
            }
            None => ZeemanModel { g_ground: [-0.5, 0.5], g_excited: vec![0.0; scheme.excited().len()], b },
        }
    }

    /// Landé factors with `B` chosen so adjacent `m–m` resonances are
    /// `splitting` apart.
    pub fn with_splitting(scheme: &LevelScheme, splitting: f64) -> Result<Self> {
        let mut z = ZeemanModel::lande(scheme, 1.0);
        let dg = (z.g_ground[1] - z.g_ground[0]).abs();
        if dg == 0.0 {
            return Err(Error::domain("equal ground g-factors: m–m resonances do not split"));
        }
        z.b = splitting / dg;
        Ok(z)
    }

    pub fn field_off(scheme: &LevelScheme) -> Self {
        ZeemanModel::lande(scheme, 0.0)
    }
}

/// Dynamical parameters, all rates and energies in units of `Γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub rabi1: f64,
    pub rabi2: f64,
    /// One-photon detuning from the resonant excited level.
    pub detuning: f64,
    /// Two-photon offset from the target `m–m` resonance.
    pub raman_detuning: f64,
    pub gamma: f64,
    pub t_final: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Spacing between consecutive excited levels; zero for unresolved.
    pub hf_splitting: f64,
    /// Excited level the field is tuned to; by default the highest level
    /// reachable from both ground levels.
    pub resonant_fe: Option<HalfInt>,
    pub m_target: HalfInt,
    /// Number of output times, including `t = 0` and `t_final`.
    pub samples: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            rabi1: 0.3,
            rabi2: 0.3,
            detuning: 0.0,
            raman_detuning: 0.0,
            gamma: 1.0,
            t_final: 200.0,
            rtol: 1e-8,
            atol: 1e-14,
            hf_splitting: 0.0,
            resonant_fe: None,
            m_target: HalfInt::ZERO,
            samples: 201,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.rabi1, self.rabi2, self.detuning, self.raman_detuning, self.hf_splitting, self.t_final];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("simulation parameters must be finite"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain("gamma must be positive"));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::domain("tolerances must be positive"));
        }
        if self.t_final < 0.0 {
            return Err(Error::domain("t_final must be non-negative"));
        }
        if self.samples < 2 {
            return Err(Error::domain("need at least two output samples"));
        }
        Ok(())
    }

    pub fn resonant_level(&self, scheme: &LevelScheme) -> Result<HalfInt> {
        if let Some(fe) = self.resonant_fe {
            if !scheme.excited().contains(&fe) {
                return Err(Error::domain(format!("resonant level {fe} is not part of the scheme")));
            }
            return Ok(fe);
        }
        let both = scheme.excited().iter().copied().filter(|&fe| scheme.couples(0, fe) && scheme.couples(1, fe)).max();
        Ok(both.unwrap_or_else(|| *scheme.excited().iter().max().expect("scheme has excited levels")))
    }

    /// The field with amplitudes scaled by the Rabi frequencies, as seen by
    /// the atom.
    pub fn effective_field(&self, field: &BichromaticField) -> BichromaticField {
        field.scaled(Complex64::new(self.rabi1, 0.0), Complex64::new(self.rabi2, 0.0))
    }
}

/// Sparse matrix as `(row, col, value)` triplets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sparse {
    pub n: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl Sparse {
    fn from_dense(a: &Array2<Complex64>) -> Self {
        let entries = a.indexed_iter().filter(|(_, z)| z.norm() > 0.0).map(|((i, j), z)| (i, j, *z)).collect();
        Sparse { n: a.nrows(), entries }
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut a = Array2::zeros((self.n, self.n));
        for &(i, j, z) in &self.entries {
            a[[i, j]] += z;
        }
        a
    }

    /// `self · rho`
    pub fn left_mul(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros(rho.raw_dim());
        for &(i, j, a) in &self.entries {
            let src = rho.row(j);
            let mut dst = out.row_mut(i);
            dst.zip_mut_with(&src, |d, s| *d += a * s);
        }
        out
    }

    /// `rho · self†`
    pub fn right_mul_adj(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros(rho.raw_dim());
        for &(i, j, a) in &self.entries {
            let a = a.conj();
            let src = rho.column(j);
            let mut dst = out.column_mut(i);
            dst.zip_mut_with(&src, |d, s| *d += a * s);
        }
        out
    }
}

/// Hamiltonian and jump operators of one configuration.
#[derive(Clone, Debug)]
pub struct Lindblad {
    pub basis: Basis,
    pub hamiltonian: Sparse,
    /// `H - (i/2) Σ L†L`
    pub effective: Sparse,
    /// One per photon polarization `q = -1, 0, +1`.
    pub jumps: Vec<Sparse>,
}

impl Lindblad {
    pub fn new(
        scheme: &LevelScheme,
        field: &BichromaticField,
        zeeman: &ZeemanModel,
        params: &SimParams,
    ) -> Result<Self> {
        params.validate()?;
        if zeeman.g_excited.len() != scheme.excited().len() {
            return Err(Error::domain("Zeeman model does not match the scheme's excited levels"));
        }
        scheme.check_common_projection(params.m_target)?;
        let basis = Basis::new(scheme);
        let n = basis.len();
        let resonant = params.resonant_level(scheme)?;
        let k_res = scheme.excited().iter().position(|&fe| fe == resonant).expect("resonant level in scheme") as f64;
        let (g1, g2) = (zeeman.g_ground[0], zeeman.g_ground[1]);
        let mt = params.m_target.to_f64();

        let mut h = Array2::<Complex64>::zeros((n, n));
        for (i, s) in basis.states().iter().enumerate() {
            let m = s.m.to_f64();
            let e = match s.kind {
                StateKind::Ground(0) => g1 * m * zeeman.b,
                StateKind::Ground(_) => g2 * m * zeeman.b - (g2 - g1) * mt * zeeman.b - params.raman_detuning,
                StateKind::Excited(k) => {
                    -params.detuning + params.hf_splitting * (k as f64 - k_res) + zeeman.g_excited[k] * m * zeeman.b
                }
            };
            h[[i, i]] = Complex64::new(e, 0.0);
        }

        let eff = params.effective_field(field);
        let sqrt_gamma = params.gamma.sqrt();
        let mut jumps = vec![Array2::<Complex64>::zeros((n, n)); 3];
        for (k, &fe) in scheme.excited().iter().enumerate() {
            let strength: f64 = (0..2).map(|level| scheme.dipole(level, fe).to_f64().powi(2)).sum();
            let norm = 1.0 / strength.sqrt();
            for level in 0..2 {
                let d = scheme.dipole(level, fe).to_f64();
                if d == 0.0 {
                    continue;
                }
                let f = scheme.ground_f(level);
                let comp = eff.component(level);
                for m in f.projections() {
                    let g = basis.ground_index(scheme, level, m);
                    for q in -1..=1 {
                        let mu = m + HalfInt::from_int(q);
                        if !fe.admits_projection(mu) {
                            continue;
                        }
                        let c = dipole_cg_or_zero(f, m, q, fe, mu)?.to_f64();
                        if c == 0.0 {
                            continue;
                        }
                        let e = basis.excited_index(k, mu);
                        let amp = norm * d * c;
                        jumps[(q + 1) as usize][[g, e]] += sqrt_gamma * amp;
                        if q != 0 {
                            let v = comp.amplitude * comp.spherical_q(q) * (0.5 * amp);
                            h[[e, g]] += v;
                            h[[g, e]] += v.conj();
                        }
                    }
                }
            }
        }

        let mut effective = h.clone();
        for l in &jumps {
            let ll = l.t().mapv(|z| z.conj()).dot(l);
            effective.zip_mut_with(&ll, |e, x| *e -= 0.5 * I * x);
        }
        Ok(Lindblad {
            basis,
            hamiltonian: Sparse::from_dense(&h),
            effective: Sparse::from_dense(&effective),
            jumps: jumps.iter().map(Sparse::from_dense).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `dρ/dt = -i(H_eff ρ - ρ H_eff†) + Σ_q L_q ρ L_q†`
    pub fn rhs(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let a = self.effective.left_mul(rho);
        let b = self.effective.right_mul_adj(rho);
        let mut out = (a - b).mapv(|z| -I * z);
        for l in &self.jumps {
            let t = l.left_mul(rho);
            out += &l.right_mul_adj(&t);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    pub rho: Array2<Complex64>,
}

impl DensityState {
    pub fn new(rho: Array2<Complex64>) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::domain("density matrix must be square"));
        }
        Ok(DensityState { rho })
    }

    /// Equal mixture of every ground sublevel.
    pub fn uniform_ground(basis: &Basis) -> Self {
        let n = basis.len();
        let w = 1.0 / basis.n_ground() as f64;
        let mut rho = Array2::zeros((n, n));
        for i in 0..basis.n_ground() {
            rho[[i, i]] = Complex64::new(w, 0.0);
        }
        DensityState { rho }
    }

    /// `|ψ><ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &Array1<Complex64>) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::domain("zero state vector"));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        let n = psi.len();
        let rho = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj());
        Ok(DensityState { rho })
    }

    pub fn basis_state(n: usize, index: usize) -> Self {
        let mut rho = Array2::zeros((n, n));
        rho[[index, index]] = Complex64::new(1.0, 0.0);
        DensityState { rho }
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.diag().sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.rho.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.rho[[i, j]] - self.rho[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn hermitian_part(&self) -> Array2<Complex64> {
        let adj = self.rho.t().mapv(|z| z.conj());
        (&self.rho + &adj).mapv(|z| z * 0.5)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let ev = self.hermitian_part().eigvalsh(UPLO::Lower)?;
        Ok(ev.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    /// `<ψ|ρ|ψ>`
    pub fn expectation(&self, psi: &Array1<Complex64>) -> f64 {
        psi.mapv(|z| z.conj()).dot(&self.rho.dot(psi)).re
    }

    pub fn population(&self, index: usize) -> f64 {
        self.rho[[index, index]].re
    }

    /// `½ Σ|λ_i(ρ - σ)|`
    pub fn trace_distance(&self, other: &DensityState) -> Result<f64> {
        let diff = DensityState { rho: &self.rho - &other.rho };
        let ev = diff.hermitian_part().eigvalsh(UPLO::Lower)?;
        Ok(0.5 * ev.iter().map(|x| x.abs()).sum::<f64>())
    }

    pub fn hygiene(&self) -> Result<Hygiene> {
        Ok(Hygiene {
            max_trace_deviation: (self.trace() - 1.0).norm(),
            min_eigenvalue: self.min_eigenvalue()?,
            max_hermiticity_error: self.hermiticity_error(),
        })
    }
}

/// Worst-case invariant violations seen along a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hygiene {
    pub max_trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_error: f64,
}

impl Hygiene {
    pub fn merge(self, other: Hygiene) -> Hygiene {
        Hygiene {
            max_trace_deviation: self.max_trace_deviation.max(other.max_trace_deviation),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
            max_hermiticity_error: self.max_hermiticity_error.max(other.max_hermiticity_error),
        }
    }

    /// Trace within `1e-9`, eigenvalues above `-1e-8`.
    pub fn is_clean(&self) -> bool {
        self.max_trace_deviation < 1e-9 && self.min_eigenvalue > -1e-8
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityState>,
    pub hygiene: Hygiene,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last(&self) -> &DensityState {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Integrate from `rho0` to `params.t_final`, sampling `params.samples`
/// equally spaced times.
pub fn evolve(
    scheme: &LevelScheme,
    field: &BichromaticField,
    zeeman: &ZeemanModel,
    params: &SimParams,
    rho0: &DensityState,
) -> Result<Trajectory> {
    let system = Lindblad::new(scheme, field, zeeman, params)?;
    evolve_system(&system, params, rho0)
}

pub(crate) fn evolve_system(system: &Lindblad, params: &SimParams, rho0: &DensityState) -> Result<Trajectory> {
    if rho0.rho.nrows() != system.dim() {
        return Err(Error::domain(format!(
            "initial state has dimension {}, basis has {}",
            rho0.rho.nrows(),
            system.dim()
        )));
    }
    let initial = rho0.hygiene()?;
    if !initial.is_clean() || initial.max_hermiticity_error > 1e-9 {
        return Err(Error::domain(format!("initial state is not a density matrix: {initial:?}")));
    }
    let mut solver = Dopri5::new(params.rtol, params.atol);
    let mut rho = rho0.rho.clone();
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut hygiene = initial;
    for k in 1..params.samples {
        let target = params.t_final * k as f64 / (params.samples - 1) as f64;
        rho = solver.integrate(|r| system.rhs(r), t, target, rho)?;
        t = target;
        let state = DensityState { rho: rho.clone() };
        hygiene = hygiene.merge(state.hygiene()?);
        times.push(t);
        states.push(state);
    }
    let stats = solver.stats();
    Ok(Trajectory { times, states, hygiene, steps: stats.accepted, rejected: stats.rejected })
}
