//! The `gmiv` command line tool.
//!
//! Exit codes: 0 on success, 2 for usage, configuration, input and I/O
//! errors, 3 for numerical failures.

use super::config::{parse_methods, ExperimentConfig, Scenario};
use super::csvio::{read_matrix_file, write_conditioning, write_evaluations, write_geometry, write_sweep};
use super::model_io::{load_model, save_model};
use super::sweep::run_error_sweep;
use super::tables::{run_conditioning_table, run_geometry_table};
use crate::error::{Error, Result};
use crate::interpolant::{fit_hermite, fit_lagrange, HermiteApproach, InterpolationMode, RefIndex};
use crate::manifold::{StiefelPoint, TangentLift};
use crate::polybasis::equispaced;
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gmiv", version, about = "Grassmann interpolation with MV coordinates and Arnoldi bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Condition numbers of monomial Vandermonde and Arnoldi bases
    Conditioning {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-node geometric condition numbers of three charts
    Geometry(GeometryArgs),
    /// Error sweep of all methods over equispaced probes
    Sweep(SweepArgs),
    /// Fit an interpolant from CSV matrices and save it
    Fit(FitArgs),
    /// Evaluate a saved interpolant
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct GeometryArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use n = 200
    #[arg(long)]
    small: bool,
    /// midpoint, last, or a node index
    #[arg(long, default_value = "midpoint")]
    ref_index: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// example1, example1_hard, example2 or helmholtz
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    /// lagrange or hermite
    #[arg(long, default_value = "hermite")]
    mode: String,
    /// augmented or surrogate
    #[arg(long, default_value = "augmented")]
    approach: String,
    #[arg(long, default_value = "midpoint")]
    ref_index: String,
    /// Comma separated subset of mv_cva, monomial_local, monomial_maxvol, normal_coords
    #[arg(long)]
    methods: Option<String>,
    /// Noise level override
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    small: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV with the m node values
    #[arg(long)]
    nodes: PathBuf,
    /// Comma separated CSV files, one n x p sample per node
    #[arg(long, value_delimiter = ',', required = true)]
    samples: Vec<PathBuf>,
    /// Comma separated CSV files with the tangent lifts (Hermite fit)
    #[arg(long, value_delimiter = ',')]
    lifts: Vec<PathBuf>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value = "augmented")]
    approach: String,
    #[arg(long, default_value = "midpoint")]
    ref_index: String,
    /// Model file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Comma separated evaluation points
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Vec<f64>,
    /// Number of equispaced points over the node range (used without --at)
    #[arg(long, default_value_t = 200)]
    probes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn sweep_config(args: &SweepArgs) -> Result<ExperimentConfig> {
    let scenario: Scenario = args.scenario.parse()?;
    let mode: InterpolationMode = args.mode.parse()?;
    let mut config = ExperimentConfig::for_scenario(scenario, args.seed);
    if mode == InterpolationMode::Lagrange {
        config = config.lagrange();
    }
    if args.small {
        config = config.small();
    }
    if let Some(k) = args.degree {
        config.degree = k;
    }
    if let Some(m) = args.probes {
        config.probes = m;
    }
    if let Some(eps) = args.noise {
        config.noise = eps;
    }
    if let Some(list) = &args.methods {
        config.methods = parse_methods(list)?;
    }
    config.approach = args.approach.parse()?;
    config.ref_index = args.ref_index.parse()?;
    config.output = args.out.clone();
    config.validate()?;
    Ok(config)
}

fn fit(args: &FitArgs) -> Result<()> {
    let nodes = read_matrix_file(&args.nodes)?.into_vec();
    let samples = args
        .samples
        .iter()
        .map(|p| StiefelPoint::new(read_matrix_file(p)?))
        .collect::<Result<Vec<_>>>()?;
    let ref_index: RefIndex = args.ref_index.parse()?;
    let interp = if args.lifts.is_empty() {
        fit_lagrange(&nodes, &samples, args.degree, ref_index)?
    } else {
        if args.lifts.len() != samples.len() {
            return Err(Error::Config(format!(
                "{} sample files but {} lift files",
                samples.len(),
                args.lifts.len()
            )));
        }
        let lifts = args
            .lifts
            .iter()
            .zip(&samples)
            .map(|(p, u)| TangentLift::new(u, read_matrix_file(p)?))
            .collect::<Result<Vec<_>>>()?;
        let approach: HermiteApproach = args.approach.parse()?;
        fit_hermite(&nodes, &samples, &lifts, args.degree, approach, ref_index)?
    };
    save_model(&interp, &args.out)
}

fn eval(args: &EvalArgs) -> Result<()> {
    let interp = load_model(&args.model)?;
    let points = if args.at.is_empty() {
        let (lo, hi) = crate::polybasis::nodes::range(interp.nodes());
        equispaced(args.probes, lo, hi)
    } else {
        args.at.clone()
    };
    let values = interp.evaluate_many(&points)?;
    let extrapolated = points.iter().filter(|&&s| interp.is_extrapolation(s)).count();
    if extrapolated > 0 {
        eprintln!("warning: {extrapolated} point(s) lie well outside the node range");
    }
    write_evaluations(&points, &values, output(&args.out)?)
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Conditioning { out } => write_conditioning(&run_conditioning_table()?, output(&out)?),
        Command::Geometry(args) => {
            let mut config = ExperimentConfig::for_scenario(Scenario::Example1, args.seed);
            if args.small {
                config = config.small();
            }
            config.ref_index = args.ref_index.parse()?;
            write_geometry(&run_geometry_table(&config)?, output(&args.out)?)
        }
        Command::Sweep(args) => {
            let config = sweep_config(&args)?;
            let result = run_error_sweep(&config)?;
            if result.ill_conditioned {
                eprintln!("warning: stacked surrogate system is ill-conditioned");
            }
            for (m, why) in &result.failed_fits {
                eprintln!("note: {m} failed to fit ({why}); its probes are recorded as diverged");
            }
            write_sweep(&result.records, output(&config.output)?)
        }
        Command::Fit(args) => fit(&args),
        Command::Eval(args) => eval(&args),
    }
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    }
}
