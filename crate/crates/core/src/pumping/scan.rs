use serde::{Deserialize, Serialize};

use super::metrics::Probe;
use super::steady::steady_state_of;
use super::system::{Lindblad, SimParams, ZeemanModel};
use crate::error::Result;
use crate::field::BichromaticField;
use crate::par::{self, Execution};
use crate::scheme::LevelScheme;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub splitting: f64,
    /// Steady-state population of the reference dark state; NaN when the
    /// steady state is not unique or no reference exists.
    pub fidelity: f64,
    pub line: String,
    pub manifold_dimension: usize,
}

/// Steady-state dark fidelity against the spacing of the excited levels,
/// with the field tuned to `params.resonant_fe`.
pub fn resolution_scan(
    scheme: &LevelScheme,
    field: &BichromaticField,
    zeeman: &ZeemanModel,
    params: &SimParams,
    splittings: &[f64],
    exec: Execution,
) -> Result<Vec<ScanRow>> {
    let line = scheme.line().map_or_else(|| "generic".to_string(), |l| l.to_string());
    par::try_map(exec, splittings, |&splitting| {
        let p = SimParams { hf_splitting: splitting, ..params.clone() };
        let probe = Probe::new(scheme, field, &p)?;
        let system = Lindblad::new(scheme, field, zeeman, &p)?;
        let ss = steady_state_of(&system)?;
        let fidelity = ss.state.as_ref().map_or(f64::NAN, |rho| probe.dark_population(rho));
        Ok(ScanRow { splitting, fidelity, line: line.clone(), manifold_dimension: ss.dimension })
    })
}
