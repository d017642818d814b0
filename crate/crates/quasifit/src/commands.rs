//! Command implementations. Each takes a fully resolved configuration and
//! writes its output; argument parsing lives in [`crate::cli`].

use std::io::Write;
use std::path::PathBuf;

use quasifit_core::estimator::{fit_isotonic, loss_vs_truth};
use quasifit_core::oracle::brute_force;
use quasifit_core::synth::{generate, SynthConfig};
use quasifit_core::{check, fit, FittedModel, Monotonicity, ShapeSpec, SolveStatus, SolverParams};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{output, write_csv, x_headers, Table};
use crate::model_file::{FitReport, ModelFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Lse,
    Isotonic,
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub input: PathBuf,
    pub model: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub shape: ShapeSpec,
    pub estimator: Estimator,
    pub params: SolverParams,
}

fn fit_model(data: &quasifit_core::DataSet, shape: ShapeSpec, estimator: Estimator, params: &SolverParams) -> CliResult<FittedModel> {
    match estimator {
        Estimator::Lse => Ok(fit(data, shape, params)?),
        Estimator::Isotonic => {
            if shape.monotonicity == Monotonicity::None {
                return Err(CliError::Input("the isotonic estimator needs --monotone".into()));
            }
            Ok(fit_isotonic(data, shape.monotonicity)?)
        }
    }
}

/// Fits a model, writes it (if a path is given) and prints the report.
/// A search cut off by the node limit still writes its incumbent, then fails
/// with [`CliError::NodeLimit`].
pub fn cmd_fit(cfg: &FitConfig, stdout: &mut dyn Write) -> CliResult<FitReport> {
    let data = Table::read(&cfg.input)?.dataset("y")?;
    let model = fit_model(&data, cfg.shape, cfg.estimator, &cfg.params)?;
    let report = FitReport::from(&model.stats);
    if let Some(path) = &cfg.model {
        ModelFile::new(model.clone()).save(path)?;
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &cfg.report {
        std::fs::write(path, &json).map_err(|e| CliError::io(path, e))?;
    }
    writeln!(stdout, "{json}").map_err(|e| CliError::Other(e.to_string()))?;
    if model.stats.status == SolveStatus::NodeLimit {
        return Err(CliError::NodeLimit { nodes: model.stats.nodes, gap: model.stats.gap });
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct PredictConfig {
    pub model: PathBuf,
    pub input: PathBuf,
    pub output: Option<PathBuf>,
}

/// Writes `x1..xd,prediction` for every row of the input.
pub fn cmd_predict(cfg: &PredictConfig) -> CliResult<Vec<f64>> {
    let file = ModelFile::load(&cfg.model)?;
    let table = Table::read(&cfg.input)?;
    let d = file.model.dim();
    if table.dim() != d {
        return Err(CliError::Input(format!(
            "model has {d} design columns, input has {}",
            table.dim()
        )));
    }
    let pts = table.points()?;
    let preds = pts.iter().map(|p| file.model.predict(p)).collect::<Result<Vec<_>, _>>()?;
    let mut headers = x_headers(d);
    headers.push("prediction".into());
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .zip(&preds)
        .map(|(p, v)| p.iter().copied().chain([*v]).collect())
        .collect();
    write_csv(&mut output(cfg.output.as_deref())?, &headers, &rows)?;
    Ok(preds)
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub input: PathBuf,
    /// Column holding the candidate values.
    pub column: String,
    pub shape: ShapeSpec,
}

/// Feasibility verdict with 1-based point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub feasible: bool,
    /// The point lying in the hull of points with smaller values.
    pub witness: Option<usize>,
    pub level_set: Vec<usize>,
    pub support: Vec<usize>,
}

pub fn cmd_check(cfg: &CheckConfig, stdout: &mut dyn Write) -> CliResult<Verdict> {
    let table = Table::read(&cfg.input)?;
    let x = table.points()?;
    let z = table.required(&cfg.column)?;
    let report = check(&z, &x, cfg.shape)?;
    let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    let verdict = Verdict {
        feasible: report.feasible,
        witness: report.witness.as_ref().map(|w| w.index + 1),
        level_set: report.witness.as_ref().map_or_else(Vec::new, |w| one(&w.level_set)),
        support: report.witness.as_ref().map_or_else(Vec::new, |w| one(&w.support)),
    };
    let json = serde_json::to_string_pretty(&verdict).expect("verdict serializes");
    writeln!(stdout, "{json}").map_err(|e| CliError::Other(e.to_string()))?;
    Ok(verdict)
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub synth: SynthConfig,
    pub output: Option<PathBuf>,
}

/// Writes `x1..xd,y,truth`.
pub fn cmd_simulate(cfg: &SimulateConfig) -> CliResult<()> {
    let s = generate(&cfg.synth).map_err(|e| CliError::Input(e.to_string()))?;
    let mut headers = x_headers(cfg.synth.d);
    headers.extend(["y".into(), "truth".into()]);
    let rows: Vec<Vec<f64>> = s
        .data
        .x
        .iter()
        .zip(&s.data.y)
        .zip(&s.truth)
        .map(|((p, y), t)| p.iter().copied().chain([*y, *t]).collect())
        .collect();
    write_csv(&mut output(cfg.output.as_deref())?, &headers, &rows)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Replication `r` uses seed `synth.seed + r`.
    pub synth: SynthConfig,
    pub reps: usize,
    pub shape: ShapeSpec,
    pub params: SolverParams,
    pub output: Option<PathBuf>,
}

/// One benchmark replication. Losses are per-point mean squared errors
/// against the noiseless truth; SSEs are against the observed responses.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub rep: usize,
    pub lse_loss: f64,
    pub iso_loss: f64,
    pub lse_sse: f64,
    pub iso_sse: f64,
    pub nodes: usize,
    pub gap: f64,
    pub wall_ms: f64,
}

pub const BENCH_COLUMNS: [&str; 8] = ["rep", "lse_loss", "iso_loss", "lse_sse", "iso_sse", "nodes", "gap", "wall_ms"];

pub fn cmd_bench(cfg: &BenchConfig) -> CliResult<Vec<BenchRow>> {
    if cfg.shape.monotonicity == Monotonicity::None {
        return Err(CliError::Input("bench compares against isotonic regression and needs --monotone".into()));
    }
    let mut out = Vec::with_capacity(cfg.reps);
    for rep in 0..cfg.reps {
        let synth = SynthConfig { seed: cfg.synth.seed.wrapping_add(rep as u64), ..cfg.synth.clone() };
        let s = generate(&synth).map_err(|e| CliError::Input(e.to_string()))?;
        let n = s.data.len() as f64;
        let lse = fit(&s.data, cfg.shape, &cfg.params)?;
        let iso = fit_isotonic(&s.data, cfg.shape.monotonicity)?;
        out.push(BenchRow {
            rep,
            lse_loss: loss_vs_truth(&lse.fitted, &s.truth) / n,
            iso_loss: loss_vs_truth(&iso.fitted, &s.truth) / n,
            lse_sse: s.data.sse(&lse.fitted),
            iso_sse: s.data.sse(&iso.fitted),
            nodes: lse.stats.nodes,
            gap: lse.stats.gap,
            wall_ms: lse.stats.wall_ms,
        });
    }
    let headers: Vec<String> = BENCH_COLUMNS.iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<f64>> = out
        .iter()
        .map(|r| vec![r.rep as f64, r.lse_loss, r.iso_loss, r.lse_sse, r.iso_sse, r.nodes as f64, r.gap, r.wall_ms])
        .collect();
    write_csv(&mut output(cfg.output.as_deref())?, &headers, &rows)?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub input: PathBuf,
    pub shape: ShapeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub objective: f64,
    /// Every optimal vector of fitted values found by enumeration.
    pub thetas: Vec<Vec<f64>>,
}

pub fn cmd_oracle(cfg: &OracleConfig, stdout: &mut dyn Write) -> CliResult<OracleReport> {
    let data = Table::read(&cfg.input)?.dataset("y")?;
    let r = brute_force(&data, cfg.shape)?;
    let report = OracleReport { objective: r.objective, thetas: r.thetas };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    writeln!(stdout, "{json}").map_err(|e| CliError::Other(e.to_string()))?;
    Ok(report)
}
