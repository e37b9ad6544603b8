//! Subcommand implementations. Each returns a JSON value; the record types
//! below are the schema of those values.

use std::path::Path;

use cpt_core::angular::{clebsch_gordan, wigner_6j};
use cpt_core::config::{
    ellipticity_grid, residual_grid, solve_parallel_equal_f, solve_parallel_fplus2, solve_perp, theta_grid,
    ConfigSolution, Family, GridPoint,
};
use cpt_core::coupling::{
    comb_dark_check, darkness_residual, null_space_dark_with_tol, trap_states, DarkStateCandidate, ExcitedSet,
};
use cpt_core::field::{comb_from_pair, parse_named_config, BichromaticField, CombField, ComplexJson, FieldSpec};
use cpt_core::identities::identity_suite;
use cpt_core::par::Execution;
use cpt_core::pumping::{
    evolve, metrics, resolution_scan, steady_state, DensityState, Hygiene, MetricRow, Probe, SimParams, ZeemanModel,
};
use cpt_core::scheme::LevelScheme;
use cpt_core::{HalfInt, Surd};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{CliError, Command, FieldArg, Format, Initial, SchemeArg, SimArgs};

pub struct Outcome {
    pub value: Value,
    pub default_format: Format,
    /// Set when the result reports a failed check; the output is still
    /// written.
    pub failure: Option<String>,
}

fn ok(value: impl Serialize, default_format: Format) -> Result<Outcome, CliError> {
    Ok(Outcome { value: serde_json::to_value(value)?, default_format, failure: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub exact: String,
    pub value: f64,
}

impl From<Surd> for Coefficient {
    fn from(s: Surd) -> Self {
        Coefficient { exact: s.to_string(), value: s.to_f64() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipoleRow {
    #[serde(rename = "F")]
    pub f: HalfInt,
    #[serde(rename = "Fe")]
    pub fe: HalfInt,
    pub exact: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationRow {
    pub tag: u32,
    pub ellipticity: f64,
    pub axis_angle: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub a_minus_re: f64,
    pub a_minus_im: f64,
    pub a_plus_re: f64,
    pub a_plus_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub m: HalfInt,
    pub excited: String,
    #[serde(rename = "A1")]
    pub a1: ComplexJson,
    #[serde(rename = "A2")]
    pub a2: ComplexJson,
    pub residual: f64,
}

impl CandidateRecord {
    fn new(c: &DarkStateCandidate, excited: ExcitedSet) -> Self {
        CandidateRecord { m: c.m, excited: excited.to_string(), a1: c.a1.into(), a2: c.a2.into(), residual: c.residual }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapRecord {
    #[serde(rename = "F")]
    pub f: HalfInt,
    pub m: HalfInt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarkFindReport {
    pub candidates: Vec<CandidateRecord>,
    pub traps: Vec<TrapRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResidual {
    pub pair: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombReport {
    pub components: usize,
    pub m: HalfInt,
    pub excited: String,
    pub dark: bool,
    pub candidate: Option<CandidateRecord>,
    pub pairs: Vec<PairResidual>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyReport {
    pub dimension: usize,
    pub unique: bool,
    /// Smallest kept singular value relative to the largest.
    pub gap: f64,
    pub dark_population: Option<f64>,
    pub ground_purity: Option<f64>,
    pub excited_population: Option<f64>,
    pub end_state_population: Option<f64>,
    pub min_eigenvalue: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub splitting: f64,
    pub fidelity: Option<f64>,
    pub line: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub identity: String,
    pub checked: usize,
    pub skipped: usize,
    pub failed: usize,
    pub status: String,
    pub note: String,
}

/// Inline JSON, the contents of an existing file, or `None` for a name.
fn json_text(arg: &str) -> Result<Option<String>, CliError> {
    if arg.trim_start().starts_with('{') {
        return Ok(Some(arg.to_string()));
    }
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(Some(std::fs::read_to_string(path)?));
    }
    Ok(None)
}

fn load_scheme(arg: &SchemeArg) -> Result<LevelScheme, CliError> {
    Ok(match json_text(&arg.scheme)? {
        Some(text) => LevelScheme::from_json(&text)?,
        None => LevelScheme::preset(&arg.scheme)?,
    })
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("not a complex amplitude: {s:?} (use re or re,im)"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn load_components(arg: &FieldArg) -> Result<CombField, CliError> {
    match json_text(&arg.field)? {
        Some(text) => Ok(FieldSpec::from_json(&text)?.to_comb()?),
        None => {
            let pair = parse_named_config(&arg.field, [parse_complex(&arg.e1)?, parse_complex(&arg.e2)?])?;
            Ok(CombField::new(vec![pair.comp1, pair.comp2])?)
        }
    }
}

fn load_pair(arg: &FieldArg) -> Result<BichromaticField, CliError> {
    match load_components(arg)?.components() {
        [c1, c2] => Ok(BichromaticField::new(*c1, *c2)),
        other => Err(CliError::Usage(format!("expected a two-component field, got {}", other.len()))),
    }
}

fn sim_params(sim: &SimArgs) -> SimParams {
    SimParams {
        rabi1: sim.rabi1,
        rabi2: sim.rabi2,
        detuning: sim.detuning,
        raman_detuning: sim.raman_detuning,
        t_final: sim.t_final,
        rtol: sim.rtol,
        atol: sim.atol,
        hf_splitting: sim.hf_splitting,
        resonant_fe: sim.resonant_fe,
        m_target: sim.m_target,
        samples: sim.samples,
        ..SimParams::default()
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn hygiene_failure(h: &Hygiene) -> Option<String> {
    (!h.is_clean()).then(|| {
        format!(
            "density matrix left the physical set: trace deviation {:e}, min eigenvalue {:e}",
            h.max_trace_deviation, h.min_eigenvalue
        )
    })
}

pub fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Cg { args } => {
            let [j1, m1, j2, m2, j, m] = args[..] else { unreachable!("clap enforces six values") };
            ok(Coefficient::from(clebsch_gordan(j1, m1, j2, m2, j, m)?), Format::Pretty)
        }
        Command::Sixj { args } => {
            let [a, b, c, d, e, f] = args[..] else { unreachable!("clap enforces six values") };
            ok(Coefficient::from(wigner_6j(a, b, c, d, e, f)?), Format::Pretty)
        }
        Command::Dipole { scheme } => dipole(&load_scheme(scheme)?),
        Command::Polarization { field } => polarization(&load_components(field)?),
        Command::DarkFind { scheme, field, m, all_excited, tol } => {
            dark_find(&load_scheme(scheme)?, &load_pair(field)?, *m, *all_excited, *tol)
        }
        Command::ConfigSolve { scheme, m, family, fix_eps1 } => {
            config_solve(&load_scheme(scheme)?, *m, family, *fix_eps1)
        }
        Command::ConfigScan { scheme, m, fe, eps1, eps2, eps_steps, theta_steps } => {
            config_scan(&load_scheme(scheme)?, *m, *fe, (*eps1, *eps2), *eps_steps, *theta_steps)
        }
        Command::CombCheck { scheme, field, n, m, all_excited, fe } => {
            let comb = match n {
                Some(n) => comb_from_pair(&load_pair(field)?, *n)?,
                None => load_components(field)?,
            };
            comb_check(&load_scheme(scheme)?, &comb, *m, *all_excited, *fe)
        }
        Command::Pump { scheme, field, sim, initial } => pump(&load_scheme(scheme)?, &load_pair(field)?, sim, *initial),
        Command::Steady { scheme, field, sim } => steady(&load_scheme(scheme)?, &load_pair(field)?, sim),
        Command::ResolutionScan { scheme, field, sim, splittings } => {
            let scheme = load_scheme(scheme)?;
            let field = load_pair(field)?;
            let zeeman = ZeemanModel::with_splitting(&scheme, sim.zeeman_splitting)?;
            let rows = resolution_scan(&scheme, &field, &zeeman, &sim_params(sim), splittings, Execution::default())?;
            let rows: Vec<ScanRecord> = rows
                .into_iter()
                .map(|r| ScanRecord { splitting: r.splitting, fidelity: finite(r.fidelity), line: r.line })
                .collect();
            ok(rows, Format::Csv)
        }
        Command::IdentitySuite { max_f } => identities(*max_f),
    }
}

fn dipole(scheme: &LevelScheme) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    for level in 0..2 {
        for &fe in scheme.excited() {
            if scheme.couples(level, fe) {
                let d = scheme.dipole(level, fe);
                rows.push(DipoleRow { f: scheme.ground_f(level), fe, exact: d.to_string(), value: d.to_f64() });
            }
        }
    }
    ok(rows, Format::Pretty)
}

fn polarization(comb: &CombField) -> Result<Outcome, CliError> {
    let rows: Vec<PolarizationRow> = comb
        .components()
        .iter()
        .map(|c| {
            let (am, ap) = c.spherical();
            PolarizationRow {
                tag: c.tag,
                ellipticity: c.ellipticity,
                axis_angle: c.axis_angle,
                amplitude_re: c.amplitude.re,
                amplitude_im: c.amplitude.im,
                a_minus_re: am.re,
                a_minus_im: am.im,
                a_plus_re: ap.re,
                a_plus_im: ap.im,
            }
        })
        .collect();
    ok(rows, Format::Pretty)
}

fn dark_find(
    scheme: &LevelScheme,
    field: &BichromaticField,
    m: Option<HalfInt>,
    all_excited: bool,
    tol: f64,
) -> Result<Outcome, CliError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {tol}")));
    }
    let ms = match m {
        Some(m) => vec![m],
        None => scheme.common_projections(),
    };
    let sets: Vec<ExcitedSet> = if all_excited {
        vec![ExcitedSet::All]
    } else {
        scheme.excited().iter().map(|&fe| ExcitedSet::Only(fe)).collect()
    };
    let mut candidates = Vec::new();
    for &m in &ms {
        for &set in &sets {
            for c in null_space_dark_with_tol(scheme, field, m, set, tol)? {
                candidates.push(CandidateRecord::new(&c, set));
            }
        }
    }
    let traps = trap_states(scheme, field)?
        .into_iter()
        .map(|t| TrapRecord { f: scheme.ground_f(t.state.level), m: t.m })
        .collect();
    ok(DarkFindReport { candidates, traps }, Format::Json)
}

fn config_solve(scheme: &LevelScheme, m: HalfInt, family: &str, fixed: Option<f64>) -> Result<Outcome, CliError> {
    let family: Family = family.parse()?;
    let (f1, f2) = (scheme.f1(), scheme.f2());
    let gap = (f2 - f1).twice();
    let needs = |want: i32, what: &str| {
        if gap == want {
            Ok(())
        } else {
            Err(CliError::Usage(format!("{family} needs {what}, scheme has F1 = {f1}, F2 = {f2}")))
        }
    };
    let sol: ConfigSolution = match family {
        Family::PerpGeneral | Family::PerpSymmetric | Family::LinPerpEps | Family::EpsPerpLin => {
            needs(2, "F2 = F1 + 1")?;
            solve_perp(f1, m, family, fixed)?
        }
        Family::ParallelFplus2 => {
            needs(4, "F2 = F1 + 2")?;
            solve_parallel_fplus2(f1, m, fixed)?
        }
        Family::ParallelEqualF => {
            needs(0, "F1 = F2")?;
            f1.check_projection(m)?;
            let eps = fixed.ok_or_else(|| CliError::Usage("parallel_equalF needs --fix-eps1".into()))?;
            solve_parallel_equal_f(eps)?
        }
        Family::DegenerateSigma => {
            return Err(CliError::Usage("degenerate_sigma labels solutions; it is not solved for".into()))
        }
    };
    ok(sol, Format::Json)
}

fn default_fe(scheme: &LevelScheme) -> Result<HalfInt, CliError> {
    scheme
        .excited()
        .iter()
        .copied()
        .filter(|&fe| scheme.couples(0, fe) && scheme.couples(1, fe))
        .max()
        .ok_or_else(|| CliError::Usage("no excited level couples to both ground levels".into()))
}

fn config_scan(
    scheme: &LevelScheme,
    m: HalfInt,
    fe: Option<HalfInt>,
    fixed: (Option<f64>, Option<f64>),
    eps_steps: usize,
    theta_steps: usize,
) -> Result<Outcome, CliError> {
    if eps_steps == 0 || theta_steps == 0 {
        return Err(CliError::Usage("grid sizes must be positive".into()));
    }
    let fe = match fe {
        Some(fe) => fe,
        None => default_fe(scheme)?,
    };
    scheme.check_common_projection(m)?;
    let axis = |x: Option<f64>| x.map_or_else(|| ellipticity_grid(eps_steps), |e| vec![e]);
    let rows: Vec<GridPoint> = residual_grid(
        scheme.f1(),
        scheme.f2(),
        fe,
        m,
        &axis(fixed.0),
        &axis(fixed.1),
        &theta_grid(theta_steps),
        Execution::default(),
    )?;
    ok(rows, Format::Csv)
}

fn comb_check(
    scheme: &LevelScheme,
    comb: &CombField,
    m: HalfInt,
    all_excited: bool,
    fe: Option<HalfInt>,
) -> Result<Outcome, CliError> {
    let excited = match (all_excited, fe) {
        (true, Some(_)) => return Err(CliError::Usage("--all-excited and --fe are exclusive".into())),
        (_, Some(fe)) => ExcitedSet::Only(fe),
        _ => ExcitedSet::All,
    };
    let cand = comb_dark_check(scheme, comb, m, excited)?;
    let pairs = match &cand {
        Some(c) => comb
            .adjacent_pairs()
            .enumerate()
            .map(|(pair, p)| Ok(PairResidual { pair, residual: darkness_residual(scheme, &p, c, excited)? }))
            .collect::<Result<Vec<_>, CliError>>()?,
        None => Vec::new(),
    };
    ok(
        CombReport {
            components: comb.len(),
            m,
            excited: excited.to_string(),
            dark: cand.is_some(),
            candidate: cand.as_ref().map(|c| CandidateRecord::new(c, excited)),
            pairs,
        },
        Format::Json,
    )
}

fn pump(scheme: &LevelScheme, field: &BichromaticField, sim: &SimArgs, initial: Initial) -> Result<Outcome, CliError> {
    let params = sim_params(sim);
    let zeeman = ZeemanModel::with_splitting(scheme, sim.zeeman_splitting)?;
    let probe = Probe::new(scheme, field, &params)?;
    let n = probe.basis.len();
    let rho0 = match initial {
        Initial::Uniform => DensityState::uniform_ground(&probe.basis),
        Initial::Dark => {
            let dark = probe
                .dark
                .as_ref()
                .ok_or_else(|| CliError::Usage(format!("no dark state at m = {} for this field", params.m_target)))?;
            DensityState::pure(&probe.basis.embed(scheme, dark))?
        }
        Initial::End => DensityState::basis_state(n, probe.end_state),
    };
    let traj = evolve(scheme, field, &zeeman, &params, &rho0)?;
    let rows: Vec<MetricRow> = metrics(&traj, &probe);
    let failure = hygiene_failure(&traj.hygiene);
    let value = serde_json::to_value(rows)?;
    Ok(Outcome { value, default_format: Format::Csv, failure })
}

fn steady(scheme: &LevelScheme, field: &BichromaticField, sim: &SimArgs) -> Result<Outcome, CliError> {
    let params = sim_params(sim);
    let zeeman = ZeemanModel::with_splitting(scheme, sim.zeeman_splitting)?;
    let probe = Probe::new(scheme, field, &params)?;
    let ss = steady_state(scheme, field, &zeeman, &params)?;
    let state = ss.state.as_ref();
    let metric = |f: &dyn Fn(&DensityState) -> f64| state.map(f).and_then(finite);
    let min_eigenvalue = match state {
        Some(rho) => Some(rho.min_eigenvalue()?),
        None => None,
    };
    let report = SteadyReport {
        dimension: ss.dimension,
        unique: !ss.is_degenerate(),
        gap: ss.gap,
        dark_population: metric(&|r| probe.dark_population(r)),
        ground_purity: metric(&|r| probe.ground_purity(r)),
        excited_population: metric(&|r| probe.excited_population(r)),
        end_state_population: metric(&|r| probe.end_state_population(r)),
        min_eigenvalue,
    };
    ok(report, Format::Json)
}

fn identities(max_f: HalfInt) -> Result<Outcome, CliError> {
    if max_f.twice() < 1 {
        return Err(CliError::Usage(format!("--max-F must be at least 1/2, got {max_f}")));
    }
    let reports = identity_suite(max_f, Execution::default())?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
    let rows: Vec<IdentityRow> = reports
        .iter()
        .map(|r| IdentityRow {
            identity: r.name.clone(),
            checked: r.checked,
            skipped: r.skipped,
            failed: r.failures.len(),
            status: if r.passed() { "pass" } else { "fail" }.to_string(),
            note: r.failures.first().cloned().unwrap_or_default(),
        })
        .collect();
    let failure = (!failed.is_empty()).then(|| format!("identities failed: {}", failed.join(", ")));
    Ok(Outcome { value: serde_json::to_value(rows)?, default_format: Format::Pretty, failure })
}
