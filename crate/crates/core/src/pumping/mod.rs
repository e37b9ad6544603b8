//! Lindblad master equation for optical pumping over the full ground and
//! excited Zeeman manifolds.
//!
//! Energies are in units of the excited-state decay rate. In the rotating
//! frame each field component drives only its own ground level, which
//! makes the Hamiltonian time independent:
//!
//! ```text
//! |F1, m>   g1 m B
//! |F2, m>   g2 m B - (g2 - g1) m_t B - δ_R
//! |Fe, μ>   -δ + s·(k(Fe) - k(Fe_res)) + ge μ B
//! ```
//!
//! with `m_t` the target `m–m` resonance, `δ_R` the Raman detuning, `δ`
//! the one-photon detuning from the resonant excited level and `s` a
//! uniform spacing between consecutive excited levels.

mod dopri;
mod metrics;
mod scan;
mod steady;
mod system;

pub use dopri::{Dopri5, StepStats};
pub use metrics::{metrics, MetricRow, Probe};
pub use scan::{resolution_scan, ScanRow};
pub use steady::{liouvillian_sector, steady_state, SectorIndex, SteadyState, STEADY_NULL_TOL};
pub use system::{
    evolve, Basis, BasisState, DensityState, Hygiene, Lindblad, SimParams, Sparse, StateKind, Trajectory, ZeemanModel,
    DEFAULT_ZEEMAN_SPLITTING,
};
