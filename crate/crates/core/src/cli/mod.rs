//! Command-line driver: reads a JSON run configuration and writes CSV data
//! plus SVG plots for sweeps, wavefunctions, singularity scans, PT-current
//! checks and the model profile.
//!
//! Exit codes: 0 success, 1 I/O or solver error, 2 invalid configuration or
//! broken PT phase, 3 more than 10% of sweep rows failed, 4 no spectral
//! singularity peak above threshold, 5 PT-current spread above 1e-4.

mod config;
mod output;
mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

pub use config::{EnergyWindow, Output, RunConfig, SolverChoice};
pub use output::format_number;

use crate::analytic::{wavefunction_trace, AnalyticError};
use crate::model::{mass_at, potential_at, pt_phase_classify, Incidence, ModelError, PtPhase};
use crate::observables::{
    locate_spectral_singularity, pt_current_trace, sweep, symmetric_grid, ObservablesError, SingularityReport, Solver,
    SweepRow,
};
use output::{csv_bytes, write_atomic};
use svg::{Plot, Series};

/// Samples across `[-a0 - 2, a0 + 2]` for spatial outputs; odd, so `z = 0`
/// is included.
const SPATIAL_SAMPLES: usize = 801;
const SPATIAL_PADDING: f64 = 2.0;
/// Largest PT-current spread accepted by `continuity`.
pub const SPREAD_GATE: f64 = 1e-4;
const MAX_FAILED_FRACTION: f64 = 0.1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("PT symmetry is broken: {0}")]
    BrokenPhase(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("{failed} of {total} sweep rows failed")]
    TooManyFailures { failed: usize, total: usize, summary: Summary },
    #[error("no spectral singularity: largest |T|^2 = {peak:.6e} at E = {energy:.9} is below {threshold}")]
    NoPeak { peak: f64, energy: f64, threshold: f64, summary: Summary },
    #[error("PT-current spread {spread:.3e} exceeds {SPREAD_GATE:e}")]
    NotConserved { spread: f64, summary: Summary },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Solver(_) => 1,
            CliError::Config(_) | CliError::BrokenPhase(_) => 2,
            CliError::TooManyFailures { .. } => 3,
            CliError::NoPeak { .. } => 4,
            CliError::NotConserved { .. } => 5,
        }
    }

    /// Summary of a command that wrote its files before failing.
    pub fn summary(&self) -> &[String] {
        match self {
            CliError::TooManyFailures { summary, .. }
            | CliError::NoPeak { summary, .. }
            | CliError::NotConserved { summary, .. } => summary,
            _ => &[],
        }
    }
}

impl From<ObservablesError> for CliError {
    fn from(e: ObservablesError) -> Self {
        match e {
            ObservablesError::InvalidWindow { .. }
            | ObservablesError::NotSingularRegime(_)
            | ObservablesError::Model(_)
            | ObservablesError::Analytic(AnalyticError::Model(_)) => CliError::Config(e.to_string()),
            ObservablesError::BrokenPhase => CliError::BrokenPhase(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Model(ModelError::SubThresholdEnergy { .. }) => CliError::Config(format!("--energy: {e}")),
            AnalyticError::Model(_) => CliError::Config(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "pdemscatter", version, about = "PT-symmetric position-dependent-mass scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// |T|^2 and |R|^2 for both incidences over the energy window.
    Sweep(CommonArgs),
    /// Re psi(z) of the scattering state at --energy.
    Wavefunction(CommonArgs),
    /// Scan for the spectral-singularity peak of a PT barrier.
    Singularity(CommonArgs),
    /// PT-current constancy check at --energy.
    Continuity(CommonArgs),
    /// Mass and potential profiles.
    Profile(CommonArgs),
    /// Every artifact listed under `outputs` in the configuration.
    Run(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Energy for `wavefunction` and `continuity`.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    energy: f64,
    /// Output directory; overrides `out_dir` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Side::Left)]
    incidence: Side,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

/// Everything a command needs besides the configuration itself.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub energy: f64,
    pub incidence: Incidence,
}

impl RunContext {
    pub fn new(config: RunConfig, out_dir: PathBuf) -> Self {
        Self { config, out_dir, energy: 1.0, incidence: Incidence::Left }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn spatial_grid(&self) -> Vec<f64> {
        symmetric_grid(self.config.params.a0 + SPATIAL_PADDING, SPATIAL_SAMPLES)
    }
}

/// Lines for the run summary printed on stdout.
pub type Summary = Vec<String>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    let (command, args) = match cli.command {
        Command::Sweep(a) => (Some(Output::Sweep), a),
        Command::Wavefunction(a) => (Some(Output::Wavefunction), a),
        Command::Singularity(a) => (Some(Output::Singularity), a),
        Command::Continuity(a) => (Some(Output::Continuity), a),
        Command::Profile(a) => (Some(Output::Profile), a),
        Command::Run(a) => (None, a),
    };
    let ctx = match context_from(&args) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let outputs = match command {
        Some(one) => vec![one],
        None if ctx.config.outputs.is_empty() => {
            eprintln!("error: configuration error: outputs: `run` needs at least one entry");
            return 2;
        }
        None => ctx.config.outputs.clone(),
    };
    let mut code = 0;
    for output in outputs {
        match dispatch(output, &ctx) {
            Ok(summary) => summary.iter().for_each(|line| println!("{line}")),
            Err(e) => {
                e.summary().iter().for_each(|line| println!("{line}"));
                eprintln!("error: {e}");
                if code == 0 {
                    code = e.exit_code();
                }
            }
        }
    }
    code
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("PDEMSCATTER_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!("PDEMSCATTER_THREADS must be a positive integer, got {value:?}"))
        })?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn context_from(args: &CommonArgs) -> Result<RunContext, CliError> {
    let config = RunConfig::load(&args.config)?;
    let out_dir = args.out.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    if !args.energy.is_finite() {
        return Err(CliError::Config(format!("--energy must be finite, got {}", args.energy)));
    }
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let incidence = match args.incidence {
        Side::Left => Incidence::Left,
        Side::Right => Incidence::Right,
    };
    Ok(RunContext { config, out_dir, energy: args.energy, incidence })
}

pub fn dispatch(output: Output, ctx: &RunContext) -> Result<Summary, CliError> {
    match output {
        Output::Sweep => cmd_sweep(ctx),
        Output::Wavefunction => cmd_wavefunction(ctx),
        Output::Singularity => cmd_singularity(ctx),
        Output::Continuity => cmd_continuity(ctx),
        Output::Profile => cmd_profile(ctx),
    }
}

fn num(v: f64) -> String {
    format_number(v)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    write_atomic(path, &csv_bytes(header, rows)?)
}

fn write_svg(path: &Path, plot: &Plot) -> Result<(), CliError> {
    write_atomic(path, plot.render().as_bytes())
}

pub const SWEEP_HEADER: [&str; 7] = ["energy", "T2", "R2_left", "R2_right", "flux_deficit", "solver", "condition_flag"];

/// Writes `sweep.csv` and `sweep.svg`. With `solver = both` each energy gets
/// an analytic row followed by an oracle row.
pub fn cmd_sweep(ctx: &RunContext) -> Result<Summary, CliError> {
    let cfg = &ctx.config;
    let w = cfg.energy_window;
    let solvers = match cfg.solver {
        SolverChoice::Analytic => vec![Solver::Analytic],
        SolverChoice::Oracle => vec![Solver::Oracle],
        SolverChoice::Both => vec![Solver::Analytic, Solver::Oracle],
    };
    let runs: Vec<Vec<SweepRow>> = solvers
        .iter()
        .map(|&s| sweep(&cfg.params, w.e_min, w.e_max, w.n_points, s, cfg.slices))
        .collect::<Result<_, _>>()?;
    let rows: Vec<&SweepRow> = (0..w.n_points).flat_map(|i| runs.iter().map(move |run| &run[i])).collect();

    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.energy),
                num(r.t2),
                num(r.r2_left),
                num(r.r2_right),
                num(r.flux_deficit),
                r.solver.name().to_string(),
                r.condition_flag.to_string(),
            ]
        })
        .collect();
    write_csv(&ctx.path("sweep.csv"), &SWEEP_HEADER, &records)?;

    let first = &runs[0];
    let mut plot = Plot::new(&format!("Scattering spectrum ({})", solvers[0].name()), "E", "probability");
    plot.series.push(Series::new("|T|^2", first.iter().map(|r| (r.energy, r.t2)).collect()));
    plot.series.push(Series::new("|R_L|^2", first.iter().map(|r| (r.energy, r.r2_left)).collect()));
    plot.series.push(Series::new("|R_R|^2", first.iter().map(|r| (r.energy, r.r2_right)).collect()));
    write_svg(&ctx.path("sweep.svg"), &plot)?;

    let failed = rows.iter().filter(|r| r.failure.is_some()).count();
    let flagged = rows.iter().filter(|r| r.condition_flag).count();
    let mut summary = vec![format!(
        "sweep: {} rows over E in [{}, {}], {failed} failed, {flagged} flagged",
        rows.len(),
        num(w.e_min),
        num(w.e_max)
    )];
    for run in &runs {
        let reciprocity = run.iter().map(|r| (r.t2 - r.t2_right).abs()).filter(|d| d.is_finite()).fold(0.0, f64::max);
        summary.push(format!("  {}: max ||T_L|^2 - |T_R|^2| = {}", run[0].solver.name(), num(reciprocity)));
    }
    if let [analytic, oracle] = runs.as_slice() {
        let diff = analytic
            .iter()
            .zip(oracle)
            .filter(|(a, o)| !a.condition_flag && !o.condition_flag)
            .map(|(a, o)| (a.t2 - o.t2).abs())
            .fold(0.0, f64::max);
        summary.push(format!("  max |T2 analytic - T2 oracle| on unflagged rows = {}", num(diff)));
    }
    for line in rows.iter().filter_map(|r| r.failure.as_ref().map(|f| format!("  E = {}: {f}", num(r.energy)))) {
        summary.push(line);
    }
    if failed as f64 > MAX_FAILED_FRACTION * rows.len() as f64 {
        return Err(CliError::TooManyFailures { failed, total: rows.len(), summary });
    }
    Ok(summary)
}

fn zero_crossings(z: &[f64], f: &[f64]) -> Vec<f64> {
    z.windows(2)
        .zip(f.windows(2))
        .filter(|(_, w)| w[0] != 0.0 && w[0].signum() != w[1].signum())
        .map(|(zz, w)| zz[0] - w[0] * (zz[1] - zz[0]) / (w[1] - w[0]))
        .collect()
}

/// Writes `psi.csv` and `psi.svg` for the scattering state at `ctx.energy`
/// and reports the spread of interior zero-crossing gaps of `Re ψ`, which
/// varies because the local wavelength follows `m(z)` and `V(z)`.
pub fn cmd_wavefunction(ctx: &RunContext) -> Result<Summary, CliError> {
    let params = &ctx.config.params;
    let z = ctx.spatial_grid();
    let psi = wavefunction_trace(ctx.energy, params, ctx.incidence, &z)?;
    let records: Vec<Vec<String>> =
        z.iter().zip(&psi).map(|(&z, p)| vec![num(z), num(p.re), num(p.im), num(p.norm())]).collect();
    write_csv(&ctx.path("psi.csv"), &["z", "re_psi", "im_psi", "abs_psi"], &records)?;

    let mut plot = Plot::new(&format!("Re psi(z) at E = {}", num(ctx.energy)), "z", "Re psi");
    plot.series.push(Series::new("Re psi", z.iter().zip(&psi).map(|(&z, p)| (z, p.re)).collect()));
    plot.vlines = vec![-params.a0, params.a0];
    write_svg(&ctx.path("psi.svg"), &plot)?;

    let mut summary =
        vec![format!("wavefunction: {} samples at E = {} ({:?} incidence)", z.len(), num(ctx.energy), ctx.incidence)];
    // a dense interior trace for the wavelength metric
    let inner: Vec<f64> = symmetric_grid(params.a0, 20_001);
    let re: Vec<f64> = wavefunction_trace(ctx.energy, params, ctx.incidence, &inner)?.iter().map(|p| p.re).collect();
    let crossings = zero_crossings(&inner, &re);
    let gaps: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    if gaps.is_empty() {
        summary.push(format!("  interior: {} zero crossings of Re psi, too few to measure spacing", crossings.len()));
    } else {
        let (min, max) = gaps.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &g| (a.min(g), b.max(g)));
        summary.push(format!(
            "  interior zero-crossing spacing: min {} max {} ratio {} ({} crossings)",
            num(min),
            num(max),
            num(max / min),
            crossings.len()
        ));
    }
    if let Some(k) = params.exterior_wavenumber(ctx.energy) {
        summary.push(format!("  exterior half-wavelength pi/k = {}", num(std::f64::consts::PI / k)));
    }
    Ok(summary)
}

#[derive(Serialize)]
struct SingularityFile<'a> {
    #[serde(flatten)]
    report: &'a SingularityReport,
    peak_threshold: f64,
    peak_found: bool,
}

/// Writes `singularity.json` and a log-scale `singularity.svg`. Both are
/// written even when no peak clears the threshold (exit code 4).
pub fn cmd_singularity(ctx: &RunContext) -> Result<Summary, CliError> {
    let cfg = &ctx.config;
    let window = (cfg.energy_window.e_min, cfg.energy_window.e_max);
    let (report, found) = match locate_spectral_singularity(&cfg.params, window, cfg.peak_threshold) {
        Ok(report) => (report, true),
        Err(ObservablesError::NoPeakFound { report, .. }) => (*report, false),
        Err(e) => return Err(e.into()),
    };
    let file = SingularityFile { report: &report, peak_threshold: cfg.peak_threshold, peak_found: found };
    let json = serde_json::to_string_pretty(&file).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    write_atomic(&ctx.path("singularity.json"), json.as_bytes())?;

    let mut plot = Plot::new("Spectral-singularity scan", "E", "probability (log scale)");
    plot.log_y = true;
    plot.series.push(Series::new("|T|^2", report.scan.iter().map(|p| (p.energy, p.t2)).collect()));
    plot.series.push(Series::new("|R_L|^2", report.scan.iter().map(|p| (p.energy, p.r2_left)).collect()));
    plot.series.push(Series::new("|R_R|^2", report.scan.iter().map(|p| (p.energy, p.r2_right)).collect()));
    plot.vlines = vec![report.e_located];
    plot.hlines = vec![cfg.peak_threshold];
    write_svg(&ctx.path("singularity.svg"), &plot)?;

    let summary = vec![
        format!(
            "singularity: peak |T|^2 = {} at E = {} (|R_L|^2 = {}, |R_R|^2 = {})",
            num(report.peak_t2),
            num(report.e_located),
            num(report.peak_r2_left),
            num(report.peak_r2_right)
        ),
        format!(
            "  closed-form candidate (linear reading): {} (located - candidate = {})",
            num(report.e_eq32),
            num(report.e_located - report.e_eq32)
        ),
        format!(
            "  closed-form candidate (squared reading): {} (located - candidate = {})",
            num(report.e_squared_variant),
            num(report.e_located - report.e_squared_variant)
        ),
        format!(
            "  untruncated constant-mass singularity: {} (located - candidate = {})",
            num(report.e_untruncated),
            num(report.e_located - report.e_untruncated)
        ),
    ];
    if !found {
        return Err(CliError::NoPeak {
            peak: report.peak_t2,
            energy: report.e_located,
            threshold: cfg.peak_threshold,
            summary,
        });
    }
    Ok(summary)
}

/// Writes `ptcurrent.csv` for the scattering state at `ctx.energy`.
pub fn cmd_continuity(ctx: &RunContext) -> Result<Summary, CliError> {
    let params = &ctx.config.params;
    if let PtPhase::Broken { boundary } = pt_phase_classify(params) {
        let at = if boundary { " (on the threshold)" } else { "" };
        return Err(CliError::BrokenPhase(format!(
            "mu2 = {} is not below mu1 + 1/(2 beta^2) = {}{at}",
            params.mu2,
            params.mu1 + 0.5 / (params.beta * params.beta)
        )));
    }
    let trace = pt_current_trace(ctx.energy, params, ctx.incidence, &ctx.spatial_grid())?;
    let records: Vec<Vec<String>> =
        trace.z.iter().zip(&trace.j).map(|(&z, j)| vec![num(z), num(j.re), num(j.im)]).collect();
    write_csv(&ctx.path("ptcurrent.csv"), &["z", "re_J", "im_J"], &records)?;
    let mean = trace.j.iter().sum::<num_complex::Complex64>() / trace.j.len() as f64;
    let summary = vec![format!(
        "continuity: spread = {} over {} points, mean J = ({}, {})",
        num(trace.spread),
        trace.z.len(),
        num(mean.re),
        num(mean.im)
    )];
    if trace.spread > SPREAD_GATE {
        return Err(CliError::NotConserved { spread: trace.spread, summary });
    }
    Ok(summary)
}

/// Writes `profile.csv` and `profile.svg` with `m(z)`, `Re V(z)`, `Im V(z)`.
pub fn cmd_profile(ctx: &RunContext) -> Result<Summary, CliError> {
    let params = &ctx.config.params;
    let z = ctx.spatial_grid();
    let m: Vec<f64> = z.iter().map(|&z| mass_at(z, params)).collect();
    let v: Vec<_> = z.iter().map(|&z| potential_at(z, params)).collect();
    let records: Vec<Vec<String>> =
        (0..z.len()).map(|i| vec![num(z[i]), num(m[i]), num(v[i].re), num(v[i].im)]).collect();
    write_csv(&ctx.path("profile.csv"), &["z", "m", "re_V", "im_V"], &records)?;

    let mut plot = Plot::new("Mass and potential profiles", "z", "value");
    plot.series.push(Series::new("m(z)", z.iter().copied().zip(m.iter().copied()).collect()));
    plot.series.push(Series::new("Re V(z)", z.iter().zip(&v).map(|(&z, v)| (z, v.re)).collect()));
    plot.series.push(Series::new("Im V(z)", z.iter().zip(&v).map(|(&z, v)| (z, v.im)).collect()));
    plot.vlines = vec![-params.a0, params.a0];
    write_svg(&ctx.path("profile.svg"), &plot)?;
    Ok(vec![format!(
        "profile: {} samples, m(0) = {}, V(0) = {}",
        z.len(),
        num(mass_at(0.0, params)),
        num(potential_at(0.0, params).re)
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(CliError::Io(String::new()).exit_code(), 1);
        assert_eq!(CliError::Solver(String::new()).exit_code(), 1);
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::BrokenPhase(String::new()).exit_code(), 2);
        assert_eq!(CliError::TooManyFailures { failed: 3, total: 10, summary: vec![] }.exit_code(), 3);
        assert_eq!(CliError::NoPeak { peak: 1.0, energy: 1.0, threshold: 100.0, summary: vec![] }.exit_code(), 4);
        assert_eq!(CliError::NotConserved { spread: 1.0, summary: vec![] }.exit_code(), 5);
    }

    #[test]
    fn too_many_failed_rows_exit_3() {
        let config = RunConfig::from_json(r#"{"params": {"mu1": 3.0, "mu2": 3.0, "beta": 4.0, "a0": 4.0}}"#).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut ctx = RunContext::new(config, dir.path().to_path_buf());
        ctx.config.solver = SolverChoice::Oracle;
        ctx.config.energy_window = EnergyWindow { e_min: 0.1, e_max: 1.0, n_points: 4 };
        // bypasses validation: too few slices make every oracle row fail
        ctx.config.slices = 10;
        assert!(matches!(cmd_sweep(&ctx), Err(CliError::TooManyFailures { failed: 4, total: 4, .. })));
        assert!(dir.path().join("sweep.csv").exists());
    }

    #[test]
    fn zero_crossings_interpolate() {
        let z = [0.0, 1.0, 2.0, 3.0];
        let f = [1.0, -1.0, -1.0, 3.0];
        assert_eq!(zero_crossings(&z, &f), vec![0.5, 2.25]);
    }
}
