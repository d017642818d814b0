//! Argument parsing and dispatch.
//!
//! Exit codes: 0 success, 1 other failure, 2 malformed or empty input or a
//! dimension mismatch, 3 node limit reached (the incumbent is still written).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasifit_core::synth::SynthConfig;
use quasifit_core::{Curvature, Monotonicity, ShapeSpec, SolverParams};

use crate::commands::{
    cmd_bench, cmd_check, cmd_fit, cmd_oracle, cmd_predict, cmd_simulate, BenchConfig, CheckConfig, Estimator,
    FitConfig, OracleConfig, PredictConfig, SimulateConfig,
};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "quasifit", version, about = "Least-squares regression under quasiconvexity and monotonicity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model to `x1..xd,y[,w]` data and print a JSON report.
    Fit {
        #[arg(short, long)]
        input: PathBuf,
        /// Where to write the model JSON.
        #[arg(short, long)]
        model: Option<PathBuf>,
        /// Also write the report JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EstimatorArg::Lse)]
        estimator: EstimatorArg,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Evaluate a fitted model at the points of an `x1..xd` CSV.
    Predict {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether candidate values are attainable by a function of the shape.
    Check {
        #[arg(short, long)]
        input: PathBuf,
        /// Column with the candidate values.
        #[arg(long, default_value = "z")]
        column: String,
        #[command(flatten)]
        shape: ShapeArgs,
    },
    /// Draw a synthetic data set `x1..xd,y,truth`.
    Simulate {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the shape-constrained fit with isotonic regression over replications.
    Bench {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[command(flatten)]
        shape: ShapeArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact fit by enumeration, for small data sets (n ≤ 6).
    Oracle {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        shape: ShapeArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Lse,
    Isotonic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CurvatureArg {
    Quasiconvex,
    Quasiconcave,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MonotoneArg {
    Decreasing,
    Increasing,
    None,
}

#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    #[arg(long, value_enum, default_value_t = CurvatureArg::Quasiconvex)]
    pub curvature: CurvatureArg,
    /// Monotone direction; `bench` defaults to increasing, others to none.
    #[arg(long, value_enum)]
    pub monotone: Option<MonotoneArg>,
}

impl ShapeArgs {
    fn shape(&self, default: Monotonicity) -> ShapeSpec {
        ShapeSpec {
            curvature: match self.curvature {
                CurvatureArg::Quasiconvex => Curvature::Quasiconvex,
                CurvatureArg::Quasiconcave => Curvature::Quasiconcave,
            },
            monotonicity: match self.monotone {
                Some(MonotoneArg::Decreasing) => Monotonicity::Decreasing,
                Some(MonotoneArg::Increasing) => Monotonicity::Increasing,
                Some(MonotoneArg::None) => Monotonicity::None,
                None => default,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Sets both big-M constants.
    #[arg(long)]
    pub big_m: Option<f64>,
    #[arg(long)]
    pub big_m_z: Option<f64>,
    #[arg(long)]
    pub big_m_xi: Option<f64>,
    /// Margin replacing the strict separation inequality.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Bound on the absolute fitted values.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Absolute optimality gap.
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long, default_value_t = 200_000)]
    pub max_nodes: usize,
    /// Worker threads; defaults to the number of cores. Results do not
    /// depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl SolverArgs {
    fn params(&self) -> SolverParams {
        SolverParams {
            big_m_z: self.big_m_z.or(self.big_m),
            big_m_xi: self.big_m_xi.or(self.big_m),
            eps_strict: self.eps,
            gamma: self.gamma,
            gap: self.gap,
            max_nodes: self.max_nodes,
            parallel: self.threads != Some(1),
            ..SolverParams::default()
        }
    }

    fn install_threads(&self) -> CliResult<()> {
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(CliError::Input("--threads must be at least 1".into()));
            }
            // A pool may already exist when called more than once in-process.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long, default_value_t = 2)]
    pub d: usize,
    /// Smoothing level in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    /// Noise variance.
    #[arg(long, default_value_t = 0.1)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw from the misspecified truth instead.
    #[arg(long)]
    pub misspecified: bool,
}

impl SynthArgs {
    fn config(&self) -> SynthConfig {
        SynthConfig {
            n: self.n,
            d: self.d,
            xi: self.xi,
            sigma2: self.sigma2,
            misspecified: self.misspecified,
            seed: self.seed,
        }
    }
}

/// Runs one command and returns its exit code; errors go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Fit { input, model, report, estimator, shape, solver } => {
            solver.install_threads()?;
            let cfg = FitConfig {
                input,
                model,
                report,
                shape: shape.shape(Monotonicity::None),
                estimator: match estimator {
                    EstimatorArg::Lse => Estimator::Lse,
                    EstimatorArg::Isotonic => Estimator::Isotonic,
                },
                params: solver.params(),
            };
            cmd_fit(&cfg, stdout).map(drop)
        }
        Command::Predict { model, input, output } => cmd_predict(&PredictConfig { model, input, output }).map(drop),
        Command::Check { input, column, shape } => {
            let cfg = CheckConfig { input, column, shape: shape.shape(Monotonicity::None) };
            cmd_check(&cfg, stdout).map(drop)
        }
        Command::Simulate { synth, output } => cmd_simulate(&SimulateConfig { synth: synth.config(), output }),
        Command::Bench { synth, reps, shape, solver, output } => {
            solver.install_threads()?;
            let cfg = BenchConfig {
                synth: synth.config(),
                reps,
                shape: shape.shape(Monotonicity::Increasing),
                params: solver.params(),
                output,
            };
            cmd_bench(&cfg).map(drop)
        }
        Command::Oracle { input, shape } => {
            cmd_oracle(&OracleConfig { input, shape: shape.shape(Monotonicity::None) }, stdout).map(drop)
        }
    }
}
