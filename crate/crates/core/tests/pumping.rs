use cpt_core::config::{solve_perp, Family};
use cpt_core::coupling::{analytic_dark_pair, trap_states};
use cpt_core::field::{named_config, BichromaticField, ConfigKind};
use cpt_core::par::Execution;
use cpt_core::pumping::*;
use cpt_core::scheme::LevelScheme;
use cpt_core::HalfInt;
use num_complex::Complex64;

const ONE: [Complex64; 2] = [Complex64::new(1.0, 0.0); 2];

fn h(n: i32) -> HalfInt {
    HalfInt::from_int(n)
}

fn cs_d1_symmetric(m: i32) -> BichromaticField {
    solve_perp(h(3), h(m), Family::PerpSymmetric, None).unwrap().field(ONE).unwrap()
}

#[test]
fn long_evolution_reaches_the_liouvillian_steady_state() {
    let scheme = LevelScheme::rb87_d1();
    let field = named_config(ConfigKind::LinPerpLin, &[], ONE).unwrap();
    let zeeman = ZeemanModel::with_splitting(&scheme, 0.5).unwrap();
    let params = SimParams { rabi1: 1.0, rabi2: 1.0, t_final: 3000.0, samples: 31, ..SimParams::default() };
    let ss = steady_state(&scheme, &field, &zeeman, &params).unwrap();
    let rho_ss = ss.state.expect("unique steady state");
    let basis = Basis::new(&scheme);
    let traj = evolve(&scheme, &field, &zeeman, &params, &DensityState::uniform_ground(&basis)).unwrap();
    let dist = traj.last().trace_distance(&rho_ss).unwrap();
    assert!(dist < 1e-6, "trace distance {dist:e}");
    assert!(traj.hygiene.is_clean(), "{:?}", traj.hygiene);

    // pumped into the dark state, and the ground purity rises to one
    let probe = Probe::new(&scheme, &field, &params).unwrap();
    let rows = metrics(&traj, &probe);
    assert!((rows[0].ground_purity - 1.0 / 8.0).abs() < 1e-12);
    assert!(rows.last().unwrap().dark_population > 0.999);
    assert!(rows.last().unwrap().ground_purity > 0.998);
}

#[test]
fn unresolved_d1_steady_state_is_the_analytic_dark_state() {
    let scheme = LevelScheme::cs_d1();
    let field = cs_d1_symmetric(1);
    let params = SimParams { m_target: h(1), ..SimParams::default() };
    let zeeman = ZeemanModel::with_splitting(&scheme, DEFAULT_ZEEMAN_SPLITTING).unwrap();
    let ss = steady_state(&scheme, &field, &zeeman, &params).unwrap();
    assert_eq!(ss.dimension, 1);
    let rho = ss.state.unwrap();
    assert!(rho.hygiene().unwrap().is_clean());

    // the reference is the single-Λ dark state, built independently here
    let (plus, _) = analytic_dark_pair(&scheme, &field, h(4), h(1)).unwrap();
    let cand = *plus.candidate().unwrap();
    let basis = Basis::new(&scheme);
    let psi = basis.embed(&scheme, &cand);
    let fidelity = rho.expectation(&psi);
    assert!(fidelity > 0.999, "fidelity {fidelity}");
}

#[test]
fn dark_initial_state_does_not_absorb() {
    let scheme = LevelScheme::cs_d1();
    let field = cs_d1_symmetric(1);
    let params = SimParams { m_target: h(1), t_final: 100.0, samples: 51, ..SimParams::default() };
    let zeeman = ZeemanModel::with_splitting(&scheme, DEFAULT_ZEEMAN_SPLITTING).unwrap();
    let probe = Probe::new(&scheme, &field, &params).unwrap();
    let cand = probe.dark.expect("dark reference");
    assert!(cand.residual < 1e-12);
    let rho0 = DensityState::pure(&probe.basis.embed(&scheme, &cand)).unwrap();
    let traj = evolve(&scheme, &field, &zeeman, &params, &rho0).unwrap();
    for rho in &traj.states {
        assert!(probe.excited_population(rho) < 1e-6);
        assert!(probe.dark_population(rho) > 1.0 - 1e-6);
    }
    assert!(traj.hygiene.is_clean(), "{:?}", traj.hygiene);
}

#[test]
fn same_circular_polarizations_leave_a_trap() {
    let scheme = LevelScheme::cs_d1();
    let field = named_config(ConfigKind::SigmaPlusSigmaPlus, &[], ONE).unwrap();
    let traps = trap_states(&scheme, &field).unwrap();
    assert_eq!(traps.len(), 1);
    assert_eq!(traps[0].m, h(4));

    let zeeman = ZeemanModel::with_splitting(&scheme, DEFAULT_ZEEMAN_SPLITTING).unwrap();
    let ss = steady_state(&scheme, &field, &zeeman, &SimParams::default()).unwrap();
    assert!(ss.dimension >= 2, "dimension {}", ss.dimension);

    let basis = Basis::new(&scheme);
    let end = basis.embed_ground(&scheme, &traps[0].state);
    for delta in [-0.37, 0.0, 1.9] {
        let params = SimParams { raman_detuning: delta, t_final: 50.0, samples: 11, ..SimParams::default() };
        let traj = evolve(&scheme, &field, &zeeman, &params, &DensityState::basis_state(basis.len(), end)).unwrap();
        for rho in &traj.states {
            assert!((rho.population(end) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn d2_steady_state_is_mixed_when_unresolved() {
    let scheme = LevelScheme::cs_d2();
    let field = named_config(ConfigKind::LinPerpLin, &[], ONE).unwrap();
    let zeeman = ZeemanModel::with_splitting(&scheme, DEFAULT_ZEEMAN_SPLITTING).unwrap();
    let params = SimParams::default();
    let ss = steady_state(&scheme, &field, &zeeman, &params).unwrap();
    let rho = ss.state.expect("unique steady state");
    let probe = Probe::new(&scheme, &field, &params).unwrap();
    let purity = probe.ground_purity(&rho);
    assert!(purity < 0.5, "ground purity {purity}");
}

#[test]
fn resolution_scan_separates_the_lines() {
    let one_point = |scheme: LevelScheme, field: BichromaticField, m: i32, splitting: f64| {
        let zeeman = ZeemanModel::with_splitting(&scheme, DEFAULT_ZEEMAN_SPLITTING).unwrap();
        let params = SimParams { m_target: h(m), ..SimParams::default() };
        resolution_scan(&scheme, &field, &zeeman, &params, &[splitting], Execution::default()).unwrap()[0].clone()
    };
    let d1 = one_point(LevelScheme::cs_d1(), cs_d1_symmetric(0), 0, 0.0);
    assert!(d1.fidelity > 0.999, "{d1:?}");
    assert_eq!(d1.line, "D1");
    let d1 = one_point(LevelScheme::cs_d1().with_resolved(true), cs_d1_symmetric(0), 0, 100.0);
    assert!(d1.fidelity > 0.999, "{d1:?}");
    let d2 = one_point(LevelScheme::cs_d2(), named_config(ConfigKind::LinPerpLin, &[], ONE).unwrap(), 0, 0.0);
    assert!(d2.fidelity < 0.9, "{d2:?}");
}

#[test]
fn sequential_and_parallel_scans_agree() {
    let scheme = LevelScheme::rb87_d1();
    let field = named_config(ConfigKind::LinPerpLin, &[], ONE).unwrap();
    let zeeman = ZeemanModel::with_splitting(&scheme, 1.0).unwrap();
    let splittings = [0.0, 1.0, 10.0];
    let a =
        resolution_scan(&scheme, &field, &zeeman, &SimParams::default(), &splittings, Execution::Sequential).unwrap();
    let b = resolution_scan(&scheme, &field, &zeeman, &SimParams::default(), &splittings, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
