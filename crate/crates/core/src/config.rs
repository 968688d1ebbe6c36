//! Scenario configuration files.
//!
//! Flat `key = value` lines grouped under `[grid]`, `[physics]`,
//! `[scenario]` and `[output]` headers; `#` starts a comment. Omitted keys
//! take the default experiment's values, unknown sections and keys are
//! rejected with their line number.
//!
//! ```text
//! [grid]
//! x_min = -80
//! x_max = 80
//! n = 4096
//!
//! [physics]
//! m = 1
//! c = 1
//! hbar = 1
//! mass_term = sigma_z        # or identity
//!
//! [scenario]
//! sigma = 2
//! weight_upper = 1, 0        # re, im
//! weight_lower = 1, 0
//! t_i = 0
//! t_f = 40
//! n_steps = 400
//! snapshot_stride = 1
//! final_state = same-as-initial   # or a profile CSV: x,re1,im1,re2,im2
//! projection = unit          # or raw
//!
//! [output]
//! density_stride = 16
//! zitter_window = 6.283185307179586
//! symmetry_time = 20
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field::SpinorField;
use crate::grid::Grid1D;
use crate::io::read_csv;
use crate::params::MassTerm;
use crate::scenario::{FinalState, ProjectionNorm, Scenario};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("{}invalid `{field}`: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { line: Option<usize>, field: String, reason: String },
}

/// Output-side options that do not affect the physics.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    /// Every `density_stride`-th site is written to space-time density files.
    pub density_stride: usize,
    /// Length of the window, from `t_i`, used for the mean-position analysis.
    pub zitter_window: f64,
    /// Time at which the spatial symmetry of the densities is compared.
    pub symmetry_time: f64,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self { density_stride: 16, zitter_window: std::f64::consts::TAU, symmetry_time: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario<f64>,
    pub output: OutputOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { scenario: Scenario::default_experiment(), output: OutputOptions::default() }
    }
}

impl RunConfig {
    /// Digest of everything that influences command outputs.
    pub fn digest(&self) -> String {
        let mut text = self.scenario.canonical();
        let _ = writeln!(
            text,
            "output {} {:e} {:e}",
            self.output.density_stride, self.output.zitter_window, self.output.symmetry_time
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Replaces the grid resolution, keeping the interval.
    pub fn with_grid_n(mut self, n: usize) -> Result<Self, ConfigError> {
        let g = &self.scenario.grid;
        self.scenario.grid = Grid1D::new(g.x_min(), g.x_max(), n).map_err(|e| ConfigError::Invalid {
            line: None,
            field: "n".into(),
            reason: e.to_string(),
        })?;
        if let FinalState::Explicit(_) = self.scenario.final_state {
            return Err(ConfigError::Invalid {
                line: None,
                field: "n".into(),
                reason: "cannot regrid an explicit final state".into(),
            });
        }
        Ok(self)
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["x_min", "x_max", "n"]),
    ("physics", &["m", "c", "hbar", "mass_term"]),
    (
        "scenario",
        &[
            "sigma",
            "weight_upper",
            "weight_lower",
            "t_i",
            "t_f",
            "n_steps",
            "snapshot_stride",
            "final_state",
            "projection",
        ],
    ),
    ("output", &["density_stride", "zitter_window", "symmetry_time"]),
];

struct Entries {
    values: BTreeMap<(String, String), (usize, String)>,
}

impl Entries {
    fn get(&self, section: &str, key: &str) -> Option<&(usize, String)> {
        self.values.get(&(section.to_string(), key.to_string()))
    }

    fn float(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some((line, raw)) => {
                parse_float(raw).ok_or_else(|| invalid(*line, key, format!("`{raw}` is not a number")))
            }
        }
    }

    fn count(&self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some((line, raw)) => {
                raw.parse::<usize>().map_err(|_| invalid(*line, key, format!("`{raw}` is not a non-negative integer")))
            }
        }
    }

    fn complex(&self, section: &str, key: &str, default: Complex<f64>) -> Result<Complex<f64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some((line, raw)) => {
                let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
                let parsed: Option<Vec<f64>> = parts.iter().map(|p| parse_float(p)).collect();
                match parsed.as_deref() {
                    Some([re]) => Ok(Complex::new(*re, 0.0)),
                    Some([re, im]) => Ok(Complex::new(*re, *im)),
                    _ => Err(invalid(*line, key, format!("`{raw}` is not `re` or `re, im`"))),
                }
            }
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.values.iter().find(|((_, k), _)| k == key).map(|(_, (line, _))| *line)
    }
}

fn parse_float(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn invalid(line: usize, field: &str, reason: String) -> ConfigError {
    ConfigError::Invalid { line: Some(line), field: field.to_string(), reason }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut section: Option<String> = None;
    let mut values = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line, message: format!("malformed section header `{content}`") })?
                .trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::UnknownSection { line, section: name.to_string() });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, message: format!("expected `key = value`, got `{content}`") })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax { line, message: "empty key or value".into() });
        }
        let current = section
            .as_deref()
            .ok_or_else(|| ConfigError::Syntax { line, message: "key outside of any [section]".into() })?;
        let allowed = KEYS.iter().find(|(s, _)| *s == current).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(ConfigError::UnknownKey { line, section: current.to_string(), key: key.to_string() });
        }
        let slot = (current.to_string(), key.to_string());
        if let Some((first, _)) = values.get(&slot) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        values.insert(slot, (line, value.to_string()));
    }
    Ok(Entries { values })
}

/// Parses configuration text; relative file references resolve against `base_dir`.
pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<RunConfig, ConfigError> {
    let e = tokenize(text)?;
    let defaults = RunConfig::default();
    let d = &defaults.scenario;

    let x_min = e.float("grid", "x_min", d.grid.x_min())?;
    let x_max = e.float("grid", "x_max", d.grid.x_max())?;
    let n = e.count("grid", "n", d.grid.n())?;
    let grid = Grid1D::new(x_min, x_max, n).map_err(|err| ConfigError::Invalid {
        line: e.get("grid", "n").or(e.get("grid", "x_max")).map(|(l, _)| *l),
        field: "grid".into(),
        reason: err.to_string(),
    })?;

    let mut params = d.params;
    params.m = e.float("physics", "m", params.m)?;
    params.c = e.float("physics", "c", params.c)?;
    params.hbar = e.float("physics", "hbar", params.hbar)?;
    if let Some((line, raw)) = e.get("physics", "mass_term") {
        params.mass_term = match raw.as_str() {
            "sigma_z" => MassTerm::PauliZ,
            "identity" => MassTerm::Identity,
            other => return Err(invalid(*line, "mass_term", format!("`{other}` is not sigma_z or identity"))),
        };
    }

    let projection = match e.get("scenario", "projection") {
        None => d.projection,
        Some((_, v)) if v == "unit" => ProjectionNorm::Unit,
        Some((_, v)) if v == "raw" => ProjectionNorm::Raw,
        Some((line, v)) => return Err(invalid(*line, "projection", format!("`{v}` is not unit or raw"))),
    };

    let final_state = match e.get("scenario", "final_state") {
        None => FinalState::SameAsInitial,
        Some((_, v)) if v == "same-as-initial" => FinalState::SameAsInitial,
        Some((line, v)) => {
            let path = base_dir.join(v);
            FinalState::Explicit(load_profile(&path, &grid).map_err(|reason| invalid(*line, "final_state", reason))?)
        }
    };

    let scenario = Scenario {
        grid,
        params,
        initial_sigma: e.float("scenario", "sigma", d.initial_sigma)?,
        spinor_weights: [
            e.complex("scenario", "weight_upper", d.spinor_weights[0])?,
            e.complex("scenario", "weight_lower", d.spinor_weights[1])?,
        ],
        t_i: e.float("scenario", "t_i", d.t_i)?,
        t_f: e.float("scenario", "t_f", d.t_f)?,
        n_steps: e.count("scenario", "n_steps", d.n_steps)?,
        snapshot_stride: e.count("scenario", "snapshot_stride", d.snapshot_stride)?,
        final_state,
        projection,
    };
    validate_scenario(&scenario, &e)?;

    let od = &defaults.output;
    let output = OutputOptions {
        density_stride: e.count("output", "density_stride", od.density_stride)?,
        zitter_window: e.float("output", "zitter_window", od.zitter_window)?,
        symmetry_time: e.float("output", "symmetry_time", od.symmetry_time)?,
    };
    if output.density_stride == 0 {
        return Err(invalid(e.line_of("density_stride").unwrap_or(0), "density_stride", "must be at least 1".into()));
    }
    if !(output.zitter_window > 0.0) {
        return Err(invalid(e.line_of("zitter_window").unwrap_or(0), "zitter_window", "must be positive".into()));
    }
    Ok(RunConfig { scenario, output })
}

/// Validates a scenario, attributing failures to the offending line.
fn validate_scenario(scenario: &Scenario<f64>, e: &Entries) -> Result<(), ConfigError> {
    use crate::error::Error;
    scenario.validate().map_err(|err| {
        let field = match &err {
            Error::Scenario { field, .. } => field.to_string(),
            Error::Parameter { name, .. } => name.to_string(),
            Error::GridMismatch => "final_state".to_string(),
            _ => "scenario".to_string(),
        };
        ConfigError::Invalid { line: e.line_of(&field), field, reason: err.to_string() }
    })?;
    scenario.initial_state().map_err(|err| ConfigError::Invalid {
        line: e.line_of("sigma").or(e.line_of("weight_upper")),
        field: "sigma".into(),
        reason: err.to_string(),
    })?;
    Ok(())
}

/// Loads a `x,re1,im1,re2,im2` profile onto `grid`.
pub fn load_profile(path: &Path, grid: &Grid1D<f64>) -> Result<SpinorField<f64>, String> {
    let (header, rows) = read_csv(path).map_err(|e| e.to_string())?;
    if header.len() != 5 {
        return Err(format!("{}: expected 5 columns x,re1,im1,re2,im2", path.display()));
    }
    if rows.len() != grid.n() {
        return Err(format!("{}: {} rows for a grid of {} sites", path.display(), rows.len(), grid.n()));
    }
    let tol = 1e-9 * grid.length();
    let mut values = Vec::with_capacity(rows.len());
    for (j, row) in rows.iter().enumerate() {
        if (row[0] - grid.x(j)).abs() > tol {
            return Err(format!(
                "{}: row {} has x = {} but the grid site is {}",
                path.display(),
                j + 1,
                row[0],
                grid.x(j)
            ));
        }
        values.push([Complex::new(row[1], row[2]), Complex::new(row[3], row[4])]);
    }
    SpinorField::new(grid.clone(), values, 0.0).map_err(|e| e.to_string())
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    parse_config_str(&text, &base)
}

/// Reads and validates the scenario part of a configuration file.
pub fn parse_scenario(path: &Path) -> Result<Scenario<f64>, ConfigError> {
    Ok(parse_config(path)?.scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        parse_config_str(text, Path::new("."))
    }

    #[test]
    fn empty_config_is_the_default_experiment() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let s = &cfg.scenario;
        assert_eq!((s.initial_sigma, s.t_i, s.t_f), (2.0, 0.0, 40.0));
        assert_eq!((s.params.m, s.params.c, s.params.hbar), (1.0, 1.0, 1.0));
        assert_eq!(parse("# only a comment\n\n[grid]\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn grid_override_changes_only_the_grid() {
        let cfg = parse("[grid]\nn = 8192\n").unwrap();
        let mut expected = RunConfig::default();
        expected.scenario.grid = Grid1D::new(-80.0, 80.0, 8192).unwrap();
        assert_eq!(cfg, expected);
        assert_ne!(cfg.digest(), RunConfig::default().digest());
    }

    #[test]
    fn reversed_times_name_the_field() {
        let err = parse("[scenario]\nt_i = 5\nt_f = 1\n").unwrap_err();
        match err {
            ConfigError::Invalid { line, field, .. } => {
                assert_eq!(field, "t_f");
                assert_eq!(line, Some(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stride_must_divide_steps() {
        let err = parse("[scenario]\nn_steps = 10\nsnapshot_stride = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, line: Some(3), .. } if field == "snapshot_stride"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert_eq!(
            parse("[grid]\nn 4096\n").unwrap_err(),
            ConfigError::Syntax { line: 2, message: "expected `key = value`, got `n 4096`".into() }
        );
        assert!(matches!(parse("[grid]\nwidth = 3\n").unwrap_err(), ConfigError::UnknownKey { line: 2, .. }));
        assert!(matches!(parse("\n[mesh]\n").unwrap_err(), ConfigError::UnknownSection { line: 2, .. }));
        assert!(matches!(parse("n = 4\n").unwrap_err(), ConfigError::Syntax { line: 1, .. }));
        assert!(matches!(parse("[grid]\nn = 64\nn = 64\n").unwrap_err(), ConfigError::Syntax { line: 3, .. }));
        assert!(matches!(parse("[grid]\nn = 100\n").unwrap_err(), ConfigError::Invalid { line: Some(2), .. }));
        assert!(matches!(parse("[physics]\nm = abc\n").unwrap_err(), ConfigError::Invalid { line: Some(2), .. }));
        assert!(matches!(parse("[physics]\nm = -1\n").unwrap_err(), ConfigError::Invalid { line: Some(2), .. }));
    }

    #[test]
    fn weights_and_enums() {
        let cfg = parse(
            "[scenario]\nweight_upper = 1, 0.5\nweight_lower = 0\nprojection = raw\n[physics]\nmass_term = identity\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario.spinor_weights, [Complex::new(1.0, 0.5), Complex::new(0.0, 0.0)]);
        assert_eq!(cfg.scenario.projection, ProjectionNorm::Raw);
        assert_eq!(cfg.scenario.params.mass_term, MassTerm::Identity);
        assert!(parse("[scenario]\nweight_upper = 1, 2, 3\n").is_err());
        assert!(parse("[scenario]\nprojection = half\n").is_err());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        assert!(matches!(parse_config(Path::new("/nonexistent/run.cfg")), Err(ConfigError::Io { .. })));
    }
}
