//! Command-line front end. [`run`] parses arguments, dispatches and maps
//! failures onto exit codes: 0 success, 1 numerical failure (or a failed
//! verification), 2 usage error.

pub mod commands;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cpt_core::HalfInt;

pub use output::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    /// The computation ran but a verification it reports on failed.
    #[error("{0}")]
    Failed(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Numerical(_) | CliError::Failed(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<cpt_core::Error> for CliError {
    fn from(e: cpt_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("JSON: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

#[derive(Debug, Parser)]
#[command(name = "cpt", version, about = "Dark states of alkali hyperfine manifolds in bichromatic fields")]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

/// Quantum numbers as `7/2`, `-1/2`, `3`.
fn half(s: &str) -> Result<HalfInt, String> {
    s.parse().map_err(|e: cpt_core::Error| e.to_string())
}

fn angle(s: &str) -> Result<f64, String> {
    cpt_core::field::parse_angle(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct SchemeArg {
    /// Preset (cs-d1, cs-d2, rb87-d1, rb87-d2), a JSON file, or inline JSON.
    #[arg(long)]
    pub scheme: String,
}

#[derive(Debug, Args)]
pub struct FieldArg {
    /// Shorthand (lin-perp-lin, eps-perp-minus-eps:<rad>, sigma++, ...), a
    /// JSON file, or inline JSON.
    #[arg(long)]
    pub field: String,
    /// Complex amplitude of component 1 for shorthand fields, as `re` or `re,im`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub e1: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub e2: String,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Target `m` of the `m–m` resonance.
    #[arg(long = "m-target", value_parser = half, default_value = "0", allow_hyphen_values = true)]
    pub m_target: HalfInt,
    #[arg(long, default_value_t = 0.3)]
    pub rabi1: f64,
    #[arg(long, default_value_t = 0.3)]
    pub rabi2: f64,
    /// One-photon detuning from the resonant excited level (Γ).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub detuning: f64,
    /// Two-photon offset from the target resonance (Γ).
    #[arg(long = "raman-detuning", default_value_t = 0.0, allow_hyphen_values = true)]
    pub raman_detuning: f64,
    /// Spacing of adjacent `m–m` resonances (Γ).
    #[arg(long = "zeeman-splitting", default_value_t = cpt_core::pumping::DEFAULT_ZEEMAN_SPLITTING)]
    pub zeeman_splitting: f64,
    /// Spacing of consecutive excited hyperfine levels (Γ); 0 for unresolved.
    #[arg(long = "hf-splitting", default_value_t = 0.0)]
    pub hf_splitting: f64,
    /// Excited level the field is tuned to.
    #[arg(long = "resonant-fe", value_parser = half)]
    pub resonant_fe: Option<HalfInt>,
    #[arg(long = "t-final", default_value_t = 200.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub atol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Initial {
    /// Equal mixture of all ground sublevels.
    Uniform,
    /// The reference dark state.
    Dark,
    /// The end state (first trap state, else `|F2, F2>`).
    End,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clebsch-Gordan coefficient <j1 m1, j2 m2 | j m>.
    Cg {
        #[arg(value_parser = half, allow_hyphen_values = true, num_args = 6, value_names = ["J1", "M1", "J2", "M2", "J", "M"])]
        args: Vec<HalfInt>,
    },
    /// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
    Sixj {
        #[arg(value_parser = half, num_args = 6, value_names = ["J1", "J2", "J3", "J4", "J5", "J6"])]
        args: Vec<HalfInt>,
    },
    /// Reduced dipole elements between the ground and excited levels.
    Dipole {
        #[command(flatten)]
        scheme: SchemeArg,
    },
    /// Spherical components of each field component.
    Polarization {
        #[command(flatten)]
        field: FieldArg,
    },
    /// Dark m–m superpositions and trap states.
    DarkFind {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        field: FieldArg,
        /// Only this `m`; all common projections otherwise.
        #[arg(long, value_parser = half, allow_hyphen_values = true)]
        m: Option<HalfInt>,
        /// Stack every excited level instead of treating each separately.
        #[arg(long = "all-excited")]
        all_excited: bool,
        /// Singular values below `tol` times the largest count as zero.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Field configuration satisfying the dark-state condition.
    ConfigSolve {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, value_parser = half, allow_hyphen_values = true)]
        m: HalfInt,
        /// general, symmetric, lin_perp_eps, eps_perp_lin, parallel_Fplus2, parallel_equalF.
        #[arg(long)]
        family: String,
        /// Fixed ellipticity of component 1 (radians or deg:<value>).
        #[arg(long = "fix-eps1", value_parser = angle, allow_hyphen_values = true)]
        fix_eps1: Option<f64>,
    },
    /// Condition residual over a grid of ellipticities and axis angles.
    ConfigScan {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, value_parser = half, allow_hyphen_values = true)]
        m: HalfInt,
        /// Excited level; by default the highest one coupled to both ground levels.
        #[arg(long, value_parser = half)]
        fe: Option<HalfInt>,
        /// Fix ε1 instead of scanning it.
        #[arg(long, value_parser = angle, allow_hyphen_values = true)]
        eps1: Option<f64>,
        /// Fix ε2 instead of scanning it.
        #[arg(long, value_parser = angle, allow_hyphen_values = true)]
        eps2: Option<f64>,
        #[arg(long = "eps-steps", default_value_t = 21)]
        eps_steps: usize,
        #[arg(long = "theta-steps", default_value_t = 180)]
        theta_steps: usize,
    },
    /// Common dark state of every adjacent pair of an equidistant comb.
    CombCheck {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        field: FieldArg,
        /// Extend a two-component ε⊥ε field to this many components.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_parser = half, default_value = "0", allow_hyphen_values = true)]
        m: HalfInt,
        #[arg(long = "all-excited")]
        all_excited: bool,
        /// Single excited level when not stacking.
        #[arg(long, value_parser = half)]
        fe: Option<HalfInt>,
    },
    /// Master-equation evolution; emits a trajectory of pumping metrics.
    Pump {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value = "uniform")]
        initial: Initial,
    },
    /// Liouvillian steady state and its metrics.
    Steady {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Steady-state dark fidelity against the excited hyperfine spacing.
    ResolutionScan {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        sim: SimArgs,
        /// Excited-level spacings (Γ), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0,1,3,10,30,100")]
        splittings: Vec<f64>,
    },
    /// Exact checks of the dark-state identities for all F up to a bound.
    IdentitySuite {
        #[arg(long = "max-F", value_parser = half, default_value = "5")]
        max_f: HalfInt,
    },
}

/// Run with `argv` (including the program name), writing to `stdout` and
/// `stderr`; returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    // every argument is a value or a flag; a bare separator means the
    // positionals were split by mistake
    if argv.iter().skip(1).any(|a| a == "--") {
        let _ = writeln!(stderr, "error: unexpected '--'; pass negative values directly, e.g. -1/2");
        return EXIT_USAGE;
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{rendered}") } else { write!(stdout, "{rendered}") };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let outcome = commands::dispatch(&cli.command)?;
    let format = cli.format.unwrap_or(outcome.default_format);
    match &cli.out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            output::emit(outcome.value, format, &mut file)?;
            file.flush()?;
        }
        None => output::emit(outcome.value, format, stdout)?,
    }
    match outcome.failure {
        Some(msg) => Err(CliError::Failed(msg)),
        None => Ok(()),
    }
}
