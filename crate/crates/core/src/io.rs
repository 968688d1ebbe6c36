//! Command execution and artifact output.
//!
//! Every command writes plain CSV files plus a `manifest.json` describing
//! them into an output directory. Numbers are written with 15 significant
//! digits and nothing time- or host-dependent is recorded, so two runs of the
//! same configuration produce byte-identical directories.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analysis::{asymmetry_metric, asymmetry_metric_complex, trajectory};
use crate::ci::{ci_continuity_at, probability_density, run_ci, run_ci_with_states, snapshot_norms, Evolver};
use crate::config::{ConfigError, RunConfig};
use crate::error::Error;
use crate::field::SpinorField;
use crate::grid::Grid1D;
use crate::oracle::{validate_against_spectral, FdConfig, StencilOrder};
use crate::rsi::{amplitude_density, prepare_advanced, prepare_retarded, rsi_continuity_at, run_rsi};
use crate::scenario::Scenario;
use crate::spectral::{dirac_residual, EnergySign, EquationForm, SpectralEngine};

/// Formats a value with 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SimulateCi,
    SimulateRsi,
    Compare,
    Validate,
    EmitFigures,
}

impl Command {
    pub const ALL: [Command; 5] =
        [Command::SimulateCi, Command::SimulateRsi, Command::Compare, Command::Validate, Command::EmitFigures];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::SimulateCi => "simulate-ci",
            Command::SimulateRsi => "simulate-rsi",
            Command::Compare => "compare",
            Command::Validate => "validate",
            Command::EmitFigures => "emit-figures",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Energy channel of the time-symmetric pipeline.
    pub channel: EnergySign,
    /// Treat pipeline warnings as invariant breaches.
    pub strict: bool,
    /// Recorded in the manifest; no command is stochastic.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { channel: EnergySign::Positive, strict: false, seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Config,
    Numerical,
    Io,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Config => 2,
            FailureKind::Numerical => 3,
            FailureKind::Io => 4,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{message}")]
pub struct CommandError {
    pub kind: FailureKind,
    pub message: String,
    /// Manifest of whatever was written before the failure.
    pub manifest: Option<Box<RunManifest>>,
}

impl CommandError {
    fn new(kind: FailureKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into(), manifest: None }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::new(FailureKind::Config, e.to_string())
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::GridSize(_)
            | Error::DegenerateInterval { .. }
            | Error::Parameter { .. }
            | Error::Scenario { .. }
            | Error::UnderResolved { .. }
            | Error::ZeroWeight
            | Error::AsymmetricGrid
            | Error::OracleConfig(_)
            | Error::TooFewSnapshots { .. } => FailureKind::Config,
            _ => FailureKind::Numerical,
        };
        CommandError::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::new(FailureKind::Io, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub kind: String,
    pub rows: usize,
}

/// Headline numbers; absent when the command does not compute them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalarSummary {
    pub amplitude_ci: Option<[f64; 2]>,
    pub probability_ci: Option<f64>,
    pub amplitude_rsi: Option<[f64; 2]>,
    pub probability_rsi: Option<f64>,
    pub zitter_amplitude_ci: Option<f64>,
    pub zitter_amplitude_rsi: Option<f64>,
    pub asymmetry_ci: Option<f64>,
    pub asymmetry_rsi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `true` when the value must not exceed the threshold, `false` when it
    /// must not fall below it.
    pub upper_bound: bool,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, upper_bound: true, passed: value <= threshold }
    }

    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, upper_bound: false, passed: value >= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub config_digest: String,
    pub scenario_fingerprint: String,
    pub channel: String,
    pub seed: Option<u64>,
    pub status: String,
    pub outputs: Vec<OutputEntry>,
    pub scalars: ScalarSummary,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

struct Writer {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Writer {
    fn new(dir: &Path, command: Command, config: &RunConfig, options: &RunOptions) -> Self {
        Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: command.as_str().to_string(),
                config_digest: config.digest(),
                scenario_fingerprint: config.scenario.fingerprint(),
                channel: options.channel.label().to_string(),
                seed: options.seed,
                status: "running".into(),
                outputs: Vec::new(),
                scalars: ScalarSummary::default(),
                checks: Vec::new(),
                warnings: Vec::new(),
            },
        }
    }

    fn table(&mut self, name: &str, kind: &str, header: &[String], rows: &[Vec<f64>]) -> Result<(), CommandError> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.file(name, kind, &text, rows.len())
    }

    fn named_values(&mut self, name: &str, kind: &str, values: &[(String, f64)]) -> Result<(), CommandError> {
        let mut text = String::from("name,value\n");
        for (k, v) in values {
            let _ = writeln!(text, "{k},{}", fmt_num(*v));
        }
        self.file(name, kind, &text, values.len())
    }

    fn file(&mut self, name: &str, kind: &str, text: &str, rows: usize) -> Result<(), CommandError> {
        fs::write(self.dir.join(name), text)
            .map_err(|e| CommandError::new(FailureKind::Io, format!("writing {name}: {e}")))?;
        self.manifest.outputs.push(OutputEntry { path: name.into(), kind: kind.into(), rows });
        Ok(())
    }

    fn write_manifest(&self) -> Result<(), CommandError> {
        let json = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| CommandError::new(FailureKind::Io, e.to_string()))?;
        fs::write(self.dir.join(MANIFEST_FILE), json + "\n")
            .map_err(|e| CommandError::new(FailureKind::Io, format!("writing {MANIFEST_FILE}: {e}")))
    }
}

/// Runs `command` and writes its artifacts plus `manifest.json` into `out_dir`.
///
/// On failure a manifest recording the partial outputs is still written when
/// the directory is writable.
pub fn run_command(
    command: Command,
    config: &RunConfig,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<RunManifest, CommandError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CommandError::new(FailureKind::Io, format!("creating {}: {e}", out_dir.display())))?;
    let mut w = Writer::new(out_dir, command, config, options);
    let outcome = match command {
        Command::SimulateCi => simulate_ci(&mut w, config, options),
        Command::SimulateRsi => simulate_rsi(&mut w, config, options),
        Command::Compare => compare(&mut w, config, options),
        Command::Validate => validate(&mut w, config, options),
        Command::EmitFigures => emit_figures(&mut w, config, options),
    };
    match outcome {
        Ok(()) => {
            w.manifest.status = "ok".into();
            w.write_manifest()?;
            Ok(w.manifest)
        }
        Err(mut err) => {
            w.manifest.status = format!("failed: {}", err.message);
            let _ = w.write_manifest();
            err.manifest = Some(Box::new(w.manifest));
            Err(err)
        }
    }
}

fn note_warnings(w: &mut Writer, warnings: &[String], options: &RunOptions) -> Result<(), CommandError> {
    w.manifest.warnings.extend(warnings.iter().cloned());
    match warnings.first() {
        Some(first) if options.strict => {
            Err(CommandError::new(FailureKind::Numerical, format!("strict mode: {first}")))
        }
        _ => Ok(()),
    }
}

fn breach(w: &Writer) -> Result<(), CommandError> {
    match w.manifest.checks.iter().find(|c| !c.passed) {
        Some(c) => Err(CommandError::new(
            FailureKind::Numerical,
            format!("invariant `{}` breached: {:e} against {:e}", c.name, c.value, c.threshold),
        )),
        None => Ok(()),
    }
}

fn sampled_header(first: &str, grid: &Grid1D<f64>, stride: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((0..grid.n()).step_by(stride).map(|j| format!("x={}", fmt_num(grid.x(j)))))
        .collect()
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn complex_pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

const NORM_TOLERANCE: f64 = 1e-12;
const AMPLITUDE_DRIFT_TOLERANCE: f64 = 1e-10;

fn simulate_ci(w: &mut Writer, config: &RunConfig, options: &RunOptions) -> Result<(), CommandError> {
    let scenario = &config.scenario;
    let result = run_ci(scenario)?;
    let stride = config.output.density_stride;
    let series = &result.series;
    let (norm, mean, edge) = (
        series.observable("norm").unwrap_or_default(),
        series.observable("mean_x").unwrap_or_default(),
        series.observable("boundary_density").unwrap_or_default(),
    );
    let rows: Vec<Vec<f64>> =
        (0..series.len()).map(|i| vec![series.records()[i].time, norm[i], mean[i], edge[i]]).collect();
    w.table("ci_observables.csv", "time-series", &header(&["t", "norm", "mean_x", "boundary_density"]), &rows)?;
    let rows: Vec<Vec<f64>> = series
        .records()
        .iter()
        .map(|r| std::iter::once(r.time).chain(r.profile.magnitudes().into_iter().step_by(stride)).collect())
        .collect();
    w.table("ci_density.csv", "space-time", &sampled_header("t", &scenario.grid, stride), &rows)?;
    w.named_values(
        "ci_scalars.csv",
        "scalars",
        &[
            ("amplitude_re".into(), result.amplitude.re),
            ("amplitude_im".into(), result.amplitude.im),
            ("probability".into(), result.probability),
            ("collapse_discontinuity".into(), result.collapse.discontinuity()),
        ],
    )?;
    w.manifest.scalars.amplitude_ci = Some(complex_pair(result.amplitude));
    w.manifest.scalars.probability_ci = Some(result.probability);
    let drift = snapshot_norms(series).iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    w.manifest.checks.push(Check::at_most("ci_norm_drift", drift, NORM_TOLERANCE));
    note_warnings(w, &result.warnings, options)?;
    breach(w)
}

fn simulate_rsi(w: &mut Writer, config: &RunConfig, options: &RunOptions) -> Result<(), CommandError> {
    let scenario = &config.scenario;
    let result = run_rsi(scenario, options.channel)?;
    let stride = config.output.density_stride;
    let label = options.channel.label();
    let series = &result.series;
    let (mean, edge) = (
        series.observable("mean_abs_x").unwrap_or_default(),
        series.observable("boundary_density").unwrap_or_default(),
    );
    let rows: Vec<Vec<f64>> =
        result.amplitude_trace.iter().enumerate().map(|(i, (t, a))| vec![*t, a.re, a.im, mean[i], edge[i]]).collect();
    w.table(
        &format!("rsi_{label}_observables.csv"),
        "time-series",
        &header(&["t", "amplitude_re", "amplitude_im", "mean_abs_x", "boundary_density"]),
        &rows,
    )?;
    for (part, pick) in [("re", 0usize), ("im", 1)] {
        let rows: Vec<Vec<f64>> = series
            .records()
            .iter()
            .map(|r| {
                let values = match &r.profile {
                    crate::scenario::Profile::Complex(v) => v.iter().map(|z| complex_pair(*z)[pick]).collect(),
                    crate::scenario::Profile::Real(v) => v.clone(),
                };
                std::iter::once(r.time).chain(values.into_iter().step_by(stride)).collect()
            })
            .collect();
        w.table(
            &format!("rsi_{label}_density_{part}.csv"),
            "space-time",
            &sampled_header("t", &scenario.grid, stride),
            &rows,
        )?;
    }
    let mut scalars = vec![
        ("amplitude_re".to_string(), result.amplitude.re),
        ("amplitude_im".to_string(), result.amplitude.im),
        ("probability".to_string(), result.probability),
        ("amplitude_drift".to_string(), result.amplitude_drift()),
    ];
    if let Some(r) = result.continuity_residual {
        scalars.push(("continuity_residual".into(), r));
    }
    w.named_values(&format!("rsi_{label}_scalars.csv"), "scalars", &scalars)?;
    w.manifest.scalars.amplitude_rsi = Some(complex_pair(result.amplitude));
    w.manifest.scalars.probability_rsi = Some(result.probability);
    w.manifest.checks.push(Check::at_most("rsi_amplitude_drift", result.amplitude_drift(), AMPLITUDE_DRIFT_TOLERANCE));
    note_warnings(w, &result.warnings, options)?;
    breach(w)
}

/// Probability density at time `t` under the conventional reading.
pub fn ci_profile_at(scenario: &Scenario<f64>, t: f64) -> crate::Result<Vec<f64>> {
    scenario.validate()?;
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    let evolver = Evolver::new(&engine, &scenario.initial_state()?);
    Ok(probability_density(&evolver.at(t)))
}

/// Amplitude density at time `t` under the time-symmetric reading.
pub fn rsi_profile_at(scenario: &Scenario<f64>, sign: EnergySign, t: f64) -> crate::Result<Vec<Complex<f64>>> {
    let retarded = prepare_retarded(scenario, sign)?;
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    let forward = Evolver::new(&engine, &retarded.with_time(scenario.t_i));
    let advanced = prepare_advanced(scenario, sign)?;
    amplitude_density(&advanced.at(t), &forward.at(t))
}

fn compare(w: &mut Writer, config: &RunConfig, options: &RunOptions) -> Result<(), CommandError> {
    let scenario = &config.scenario;
    let ci = run_ci(scenario)?;
    let rsi = run_rsi(scenario, options.channel)?;
    let t0 = scenario.t_i;
    let t1 = t0 + config.output.zitter_window;
    let ci_traj = trajectory(&ci.series.window(t0, t1), false)?;
    let rsi_traj = trajectory(&rsi.series.window(t0, t1), true)?;
    let rows: Vec<Vec<f64>> = (0..ci_traj.times.len())
        .map(|i| vec![ci_traj.times[i], ci_traj.raw[i], ci_traj.detrended[i], rsi_traj.raw[i], rsi_traj.detrended[i]])
        .collect();
    w.table(
        "fig2_trajectories.csv",
        "trajectories",
        &header(&["t", "ci_mean_x", "ci_detrended", "rsi_mean_abs_x", "rsi_detrended"]),
        &rows,
    )?;
    let ts = config.output.symmetry_time;
    let asym_ci = asymmetry_metric(&ci_profile_at(scenario, ts)?, &scenario.grid)?;
    let asym_rsi = asymmetry_metric_complex(&rsi_profile_at(scenario, options.channel, ts)?, &scenario.grid)?;
    w.named_values(
        "compare_scalars.csv",
        "scalars",
        &[
            ("ci_amplitude_re".into(), ci.amplitude.re),
            ("ci_amplitude_im".into(), ci.amplitude.im),
            ("ci_probability".into(), ci.probability),
            ("rsi_amplitude_re".into(), rsi.amplitude.re),
            ("rsi_amplitude_im".into(), rsi.amplitude.im),
            ("rsi_probability".into(), rsi.probability),
            ("ci_zitter_amplitude".into(), ci_traj.amplitude),
            ("ci_zitter_frequency".into(), ci_traj.dominant_frequency),
            ("ci_drift_velocity".into(), ci_traj.drift_velocity),
            ("rsi_zitter_amplitude".into(), rsi_traj.amplitude),
            ("rsi_drift_velocity".into(), rsi_traj.drift_velocity),
            ("ci_asymmetry".into(), asym_ci),
            ("rsi_asymmetry".into(), asym_rsi.complex),
            ("rsi_asymmetry_magnitude".into(), asym_rsi.magnitude),
        ],
    )?;
    let s = &mut w.manifest.scalars;
    s.amplitude_ci = Some(complex_pair(ci.amplitude));
    s.probability_ci = Some(ci.probability);
    s.amplitude_rsi = Some(complex_pair(rsi.amplitude));
    s.probability_rsi = Some(rsi.probability);
    s.zitter_amplitude_ci = Some(ci_traj.amplitude);
    s.zitter_amplitude_rsi = Some(rsi_traj.amplitude);
    s.asymmetry_ci = Some(asym_ci);
    s.asymmetry_rsi = Some(asym_rsi.complex);
    let mut warnings = ci.warnings.clone();
    warnings.extend(rsi.warnings.iter().cloned());
    note_warnings(w, &warnings, options)
}

fn emit_figures(w: &mut Writer, config: &RunConfig, options: &RunOptions) -> Result<(), CommandError> {
    let scenario = &config.scenario;
    let grid = &scenario.grid;
    let (ti, tf) = (scenario.t_i, scenario.t_f);
    let tm = 0.5 * (ti + tf);
    let xs = grid.positions();
    let real_rows = |rho: &[f64]| -> Vec<Vec<f64>> { xs.iter().zip(rho).map(|(x, r)| vec![*x, *r, 0.0]).collect() };
    let complex_rows =
        |rho: &[Complex<f64>]| -> Vec<Vec<f64>> { xs.iter().zip(rho).map(|(x, z)| vec![*x, z.re, z.im]).collect() };
    let cols = header(&["x", "re", "im"]);

    let post = probability_density(&scenario.final_field()?);
    let ci_profiles = [
        ("fig1a_ci_initial.csv", ci_profile_at(scenario, ti)?),
        ("fig1b_ci_midpoint.csv", ci_profile_at(scenario, tm)?),
        ("fig1c_ci_final_pre.csv", ci_profile_at(scenario, tf)?),
        ("fig1d_ci_final_post.csv", post),
    ];
    for (name, rho) in &ci_profiles {
        w.table(name, "profile", &cols, &real_rows(rho))?;
    }
    let sign = options.channel;
    let at_final = rsi_profile_at(scenario, sign, tf)?;
    let rsi_profiles = [
        ("fig1e_rsi_initial.csv", rsi_profile_at(scenario, sign, ti)?),
        ("fig1f_rsi_midpoint.csv", rsi_profile_at(scenario, sign, tm)?),
        ("fig1g_rsi_final_pre.csv", at_final.clone()),
        ("fig1h_rsi_final_post.csv", at_final),
    ];
    for (name, rho) in &rsi_profiles {
        w.table(name, "profile", &cols, &complex_rows(rho))?;
    }
    Ok(())
}

/// Continuity residuals at `dt, dt/2, dt/4, dt/8` around `t_center` and the
/// smallest observed order between successive halvings.
fn continuity_sweep(mut residual: impl FnMut(f64) -> crate::Result<f64>) -> crate::Result<(Vec<f64>, f64)> {
    let values: Vec<f64> = (0..4).map(|i| residual(0.04 / f64::from(1u32 << i))).collect::<crate::Result<_>>()?;
    let order = values.windows(2).map(|p| (p[0] / p[1]).log2()).fold(f64::INFINITY, f64::min);
    Ok((values, order))
}

/// Domain, resolution and duration of the finite-difference comparison.
pub const ORACLE_HALF_WIDTH: f64 = 20.0;
pub const ORACLE_POINTS: usize = 512;
pub const ORACLE_DURATION: f64 = 2.0;
pub const ORACLE_DT: f64 = 1e-2;

/// The scenario used by the finite-difference comparison: the configured
/// physics and initial packet on a small grid over a short interval.
pub fn oracle_scenario(scenario: &Scenario<f64>) -> crate::Result<Scenario<f64>> {
    let mut small = scenario.clone();
    small.grid = Grid1D::new(-ORACLE_HALF_WIDTH, ORACLE_HALF_WIDTH, ORACLE_POINTS)?;
    small.t_i = 0.0;
    small.t_f = ORACLE_DURATION;
    small.n_steps = 1;
    small.snapshot_stride = 1;
    small.final_state = crate::FinalState::SameAsInitial;
    Ok(small)
}

fn validate(w: &mut Writer, config: &RunConfig, options: &RunOptions) -> Result<(), CommandError> {
    let scenario = &config.scenario;
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    let initial = scenario.initial_state()?;
    let mut checks = Vec::new();

    let ci = run_ci(scenario)?;
    let norm_drift = snapshot_norms(&ci.series).iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("ci_norm_drift", norm_drift, NORM_TOLERANCE));
    let rsi = run_rsi(scenario, options.channel)?;
    checks.push(Check::at_most("rsi_amplitude_drift", rsi.amplitude_drift(), AMPLITUDE_DRIFT_TOLERANCE));

    let plus = engine.project_energy(&initial, EnergySign::Positive);
    let minus = engine.project_energy(&initial, EnergySign::Negative);
    checks.push(Check::at_most("projector_completeness", plus.plus(&minus)?.sup_distance(&initial)?, 1e-12));
    let twice = engine.project_energy(&plus, EnergySign::Positive);
    checks.push(Check::at_most("projector_idempotency", twice.sup_distance(&plus)?, 1e-12));
    let cross = engine.project_energy(&plus, EnergySign::Negative);
    checks.push(Check::at_most("projector_orthogonality", cross.max_abs(), 1e-12));

    let span = scenario.t_f - scenario.t_i;
    let there = engine.propagate(&initial, span);
    let back = engine.propagate(&there, -span).with_time(initial.time());
    checks.push(Check::at_most("propagator_reversibility", back.sup_distance(&initial)?, 1e-12));

    let evolver = Evolver::new(&engine, &initial);
    let tm = 0.5 * (scenario.t_i + scenario.t_f);
    let eq = dirac_residual(&engine, |t| evolver.at(t), tm, 1e-3, EquationForm::Retarded);
    checks.push(Check::at_most("equation_residual", eq, 1e-8));
    let advanced = prepare_advanced(scenario, options.channel)?;
    checks.push(Check::at_most("adjoint_equation_residual", advanced.adjoint_residual(tm, 1e-3), 1e-8));

    let (ci_cont, ci_order) = continuity_sweep(|dt| ci_continuity_at(scenario, tm, dt))?;
    checks.push(Check::at_least("ci_continuity_order", ci_order, 1.8));
    checks.push(Check::at_most("ci_continuity_residual", ci_cont[3], 1e-5));
    let (rsi_cont, rsi_order) = continuity_sweep(|dt| rsi_continuity_at(scenario, options.channel, tm, dt))?;
    checks.push(Check::at_least("rsi_continuity_order", rsi_order, 1.8));
    checks.push(Check::at_most("rsi_continuity_residual", rsi_cont[3], 1e-5));

    let retarded = prepare_retarded(scenario, options.channel)?;
    let target = advanced.at(scenario.t_f);
    let projected_ci = run_ci_with_states(scenario, &retarded, &target)?;
    checks.push(Check::at_most("ci_rsi_equivalence", (projected_ci.amplitude - rsi.amplitude).norm(), 1e-12));

    let oracle =
        validate_against_spectral(&oracle_scenario(scenario)?, &FdConfig::new(ORACLE_DT, StencilOrder::Fourth), 2)?;
    let order = oracle.observed_orders.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("oracle_order", order, 1.9));
    checks.push(Check::at_most("oracle_gap", oracle.entries.last().map_or(f64::INFINITY, |e| e.linf), 1e-5));

    let rows: Vec<Vec<f64>> = oracle.entries.iter().map(|e| vec![e.dt, e.steps as f64, e.linf, e.l2]).collect();
    w.table("oracle_convergence.csv", "convergence", &header(&["dt", "steps", "linf", "l2"]), &rows)?;
    let rows: Vec<Vec<f64>> = (0..4).map(|i| vec![0.04 / f64::from(1u32 << i), ci_cont[i], rsi_cont[i]]).collect();
    w.table("continuity_convergence.csv", "convergence", &header(&["dt", "ci", "rsi"]), &rows)?;
    let mut text = String::from("name,value,threshold,bound,passed\n");
    for c in &checks {
        let bound = if c.upper_bound { "max" } else { "min" };
        let _ = writeln!(text, "{},{},{},{bound},{}", c.name, fmt_num(c.value), fmt_num(c.threshold), c.passed);
    }
    w.file("validate.csv", "checks", &text, checks.len())?;
    w.manifest.checks = checks;
    let mut warnings = ci.warnings.clone();
    warnings.extend(rsi.warnings.iter().cloned());
    note_warnings(w, &warnings, options)?;
    breach(w)
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{path}: line {line}: {reason}")]
    Parse { path: String, line: usize, reason: String },
}

/// Reads a CSV file into its header and string cells.
pub fn read_csv_records(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CsvError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CsvError::Io { path: display.clone(), reason: e.to_string() })?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let header: Vec<String> = match lines.next() {
        Some((_, l)) => l.split(',').map(|s| s.trim().to_string()).collect(),
        None => return Err(CsvError::Parse { path: display, line: 1, reason: "empty file".into() }),
    };
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let cells: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if cells.len() != header.len() {
            return Err(CsvError::Parse {
                path: display,
                line: idx + 1,
                reason: format!("{} cells for {} columns", cells.len(), header.len()),
            });
        }
        rows.push(cells);
    }
    Ok((header, rows))
}

/// Reads an all-numeric CSV file into its header and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CsvError> {
    let (header, records) = read_csv_records(path)?;
    let display = path.display().to_string();
    let rows = records
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|cell| {
                    cell.parse::<f64>().map_err(|_| CsvError::Parse {
                        path: display.clone(),
                        line: i + 2,
                        reason: format!("`{cell}` is not a number"),
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}

/// Writes a field as `x,re1,im1,re2,im2`, the format accepted for explicit
/// final states.
pub fn write_spinor_profile(path: &Path, field: &SpinorField<f64>) -> std::io::Result<()> {
    let mut text = String::from("x,re1,im1,re2,im2\n");
    for (j, s) in field.values().iter().enumerate() {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            fmt_num(field.grid().x(j)),
            fmt_num(s[0].re),
            fmt_num(s[0].im),
            fmt_num(s[1].re),
            fmt_num(s[1].im)
        );
    }
    fs::write(path, text)
}
