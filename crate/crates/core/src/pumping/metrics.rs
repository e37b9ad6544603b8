use ndarray::{s, Array1};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::system::{Basis, DensityState, SimParams, Trajectory};
use crate::coupling::{null_space_dark, trap_states, DarkStateCandidate, ExcitedSet};
use crate::error::Result;
use crate::field::BichromaticField;
use crate::scheme::LevelScheme;

/// What the metrics are measured against.
#[derive(Clone, Debug)]
pub struct Probe {
    pub basis: Basis,
    /// Reference dark state of the target resonance, if one exists.
    pub dark: Option<DarkStateCandidate>,
    dark_vector: Option<Array1<Complex64>>,
    /// Basis index of the end state: the first trap state, or `|F2, +F2>`.
    pub end_state: usize,
}

impl Probe {
    /// The reference dark state is the common null vector over every
    /// excited level for unresolved schemes and, failing that (or for
    /// resolved schemes), the one through the resonant level alone. Both
    /// use the field as the atom sees it, amplitudes scaled by the Rabi
    /// frequencies.
    pub fn new(scheme: &LevelScheme, field: &BichromaticField, params: &SimParams) -> Result<Self> {
        let basis = Basis::new(scheme);
        let eff = params.effective_field(field);
        let m = params.m_target;
        let mut dark = None;
        if !scheme.resolved() {
            dark = single(null_space_dark(scheme, &eff, m, ExcitedSet::All)?);
        }
        if dark.is_none() {
            let fe = params.resonant_level(scheme)?;
            dark = single(null_space_dark(scheme, &eff, m, ExcitedSet::Only(fe))?);
        }
        let dark_vector = dark.as_ref().map(|d| basis.embed(scheme, d));
        let end_state = match trap_states(scheme, field)?.first() {
            Some(t) => basis.embed_ground(scheme, &t.state),
            None => basis.ground_index(scheme, 1, scheme.f2()),
        };
        Ok(Probe { basis, dark, dark_vector, end_state })
    }

    pub fn dark_population(&self, rho: &DensityState) -> f64 {
        self.dark_vector.as_ref().map_or(f64::NAN, |v| rho.expectation(v))
    }

    /// `Tr(ρ_g²) / Tr(ρ_g)²` over the ground block; one for a pure ground
    /// state, `1/N` for the uniform mixture of `N` sublevels.
    pub fn ground_purity(&self, rho: &DensityState) -> f64 {
        let n = self.basis.n_ground();
        let g = rho.rho.slice(s![..n, ..n]);
        let tr = g.diag().sum().re;
        let sq: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        sq / (tr * tr)
    }

    pub fn excited_population(&self, rho: &DensityState) -> f64 {
        let n = self.basis.n_ground();
        rho.rho.diag().iter().skip(n).map(|z| z.re).sum()
    }

    pub fn end_state_population(&self, rho: &DensityState) -> f64 {
        rho.population(self.end_state)
    }

    pub fn row(&self, t: f64, rho: &DensityState) -> MetricRow {
        MetricRow {
            t,
            dark_population: self.dark_population(rho),
            ground_purity: self.ground_purity(rho),
            excited_population: self.excited_population(rho),
            end_state_population: self.end_state_population(rho),
        }
    }
}

fn single(mut v: Vec<DarkStateCandidate>) -> Option<DarkStateCandidate> {
    if v.len() == 1 {
        v.pop()
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub t: f64,
    pub dark_population: f64,
    pub ground_purity: f64,
    pub excited_population: f64,
    pub end_state_population: f64,
}

pub fn metrics(traj: &Trajectory, probe: &Probe) -> Vec<MetricRow> {
    traj.times.iter().zip(&traj.states).map(|(&t, rho)| probe.row(t, rho)).collect()
}
