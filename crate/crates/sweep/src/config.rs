//! Command-line and config-file parsing.
//!
//! A config file holds flat `key = value` lines using the flag names without the
//! leading dashes (`alpha-max = 1.2566`, `slits = 3 5`). Blank lines and lines
//! starting with `#` are ignored. Flags given on the command line win over the file.

use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use angular_qudit::CorrelationModel;
use clap::Parser;
use serde_json::{json, Value};

use crate::error::{Result, SweepError};
use crate::presets::Preset;

pub const DEFAULT_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Oam,
    Path,
}

impl FromStr for Mode {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oam" => Ok(Self::Oam),
            "path" => Ok(Self::Path),
            _ => Err(SweepError::usage(format!(
                "unknown mode `{s}` (expected oam or path)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Oam => "oam",
            Self::Path => "path",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(SweepError::usage(format!(
                "unknown format `{s}` (expected csv or json)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Concurrence-vs-aperture sweeps for OAM- and path-entangled photon pairs.
#[derive(Debug, Default, Parser)]
#[command(name = "qudit-sweep", version)]
pub struct Cli {
    /// Flat `key = value` config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Scenario: `oam` (single aperture, D-dimensional OAM input) or `path` (N x M slits)
    #[arg(long, value_parser = ["oam", "path"])]
    pub mode: Option<String>,
    /// OAM dimension D = 2n + 1 (mode oam)
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Slit counts of the signal and idler masks (mode path)
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub slits: Option<Vec<usize>>,
    /// Input OAM l0 of the product state |l0>|-l0> (mode path)
    #[arg(long, allow_negative_numbers = true)]
    pub l0: Option<i64>,
    /// Path-correlation model (mode path)
    #[arg(long, value_parser = ["constant", "overlap", "diagonal"])]
    pub correlation_model: Option<String>,
    /// Smallest slit width in radians (default 0, evaluated at 1e-4)
    #[arg(long)]
    pub alpha_min: Option<f64>,
    /// Largest slit width in radians (default 2π for oam, 2π/max(N, M) for path)
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Number of points on the inclusive alpha grid
    #[arg(long)]
    pub steps: Option<usize>,
    /// OAM truncation bound overriding the default
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Figure preset (fig2, fig3, fig4, fig5, figA1, figA2, figA3); writes one file per curve
    #[arg(long)]
    pub preset: Option<String>,
    /// Output file, or directory for presets; stdout when omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format (default csv)
    #[arg(long, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    /// Worker threads (default: available cores)
    #[arg(long)]
    pub parallelism: Option<usize>,
}

/// Unvalidated settings gathered from the config file and the command line.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct RawConfig {
    pub mode: Option<String>,
    pub dimension: Option<usize>,
    pub slits: Option<(usize, usize)>,
    pub l0: Option<i64>,
    pub correlation_model: Option<String>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub steps: Option<usize>,
    pub truncation: Option<usize>,
    pub preset: Option<String>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub parallelism: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| SweepError::usage(format!("invalid value `{value}` for `{key}`")))
}

impl RawConfig {
    /// Parses a config file body. Unknown or repeated keys are usage errors.
    pub fn from_file_contents(text: &str) -> Result<Self> {
        let mut raw = Self::default();
        let mut seen = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SweepError::usage(format!("config line {}: expected `key = value`", no + 1))
            })?;
            let key = key.trim().replace('_', "-");
            let value = value.trim().trim_matches('"');
            if seen.contains(&key) {
                return Err(SweepError::usage(format!("config key `{key}` given twice")));
            }
            raw.set(&key, value)?;
            seen.push(key);
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SweepError::Io {
            action: "read config file",
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_file_contents(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mode" => self.mode = Some(value.to_string()),
            "dimension" => self.dimension = Some(parse_value(key, value)?),
            "slits" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(SweepError::usage(
                        "`slits` takes two counts, e.g. `slits = 3 5`",
                    ));
                }
                self.slits = Some((parse_value(key, parts[0])?, parse_value(key, parts[1])?));
            }
            "l0" => self.l0 = Some(parse_value(key, value)?),
            "correlation-model" => self.correlation_model = Some(value.to_string()),
            "alpha-min" => self.alpha_min = Some(parse_value(key, value)?),
            "alpha-max" => self.alpha_max = Some(parse_value(key, value)?),
            "steps" => self.steps = Some(parse_value(key, value)?),
            "truncation" => self.truncation = Some(parse_value(key, value)?),
            "preset" => self.preset = Some(value.to_string()),
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.to_string()),
            "parallelism" => self.parallelism = Some(parse_value(key, value)?),
            other => return Err(SweepError::usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Entries of `self` where present, otherwise those of `base`.
    pub fn over(self, base: RawConfig) -> RawConfig {
        RawConfig {
            mode: self.mode.or(base.mode),
            dimension: self.dimension.or(base.dimension),
            slits: self.slits.or(base.slits),
            l0: self.l0.or(base.l0),
            correlation_model: self.correlation_model.or(base.correlation_model),
            alpha_min: self.alpha_min.or(base.alpha_min),
            alpha_max: self.alpha_max.or(base.alpha_max),
            steps: self.steps.or(base.steps),
            truncation: self.truncation.or(base.truncation),
            preset: self.preset.or(base.preset),
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            parallelism: self.parallelism.or(base.parallelism),
        }
    }
}

impl From<Cli> for RawConfig {
    fn from(cli: Cli) -> Self {
        RawConfig {
            mode: cli.mode,
            dimension: cli.dimension,
            slits: cli.slits.map(|v| (v[0], v[1])),
            l0: cli.l0,
            correlation_model: cli.correlation_model,
            alpha_min: cli.alpha_min,
            alpha_max: cli.alpha_max,
            steps: cli.steps,
            truncation: cli.truncation,
            preset: cli.preset,
            output: cli.output,
            format: cli.format,
            parallelism: cli.parallelism,
        }
    }
}

/// Scenario of one sweep curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Oam {
        dimension: usize,
    },
    Path {
        n_signal: usize,
        n_idler: usize,
        l0: i64,
        model: CorrelationModel,
    },
}

/// A fully validated sweep over one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub steps: usize,
    pub truncation: Option<usize>,
    pub format: Format,
    pub parallelism: Option<usize>,
}

impl SweepConfig {
    pub fn mode(&self) -> Mode {
        match self.scenario {
            Scenario::Oam { .. } => Mode::Oam,
            Scenario::Path { .. } => Mode::Path,
        }
    }

    /// Checks ranges and scenario constraints.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min >= 0.0 && self.alpha_min < self.alpha_max && self.alpha_max <= TAU) {
            return Err(SweepError::usage(format!(
                "need 0 <= alpha-min < alpha-max <= 2π, got [{}, {}]",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.steps < 2 {
            return Err(SweepError::usage("steps must be at least 2"));
        }
        if self.parallelism == Some(0) {
            return Err(SweepError::usage("parallelism must be positive"));
        }
        match self.scenario {
            Scenario::Oam { dimension } => {
                if dimension < 3 || dimension % 2 == 0 {
                    return Err(SweepError::usage(format!(
                        "dimension must be odd and at least 3 (D = 2n + 1), got {dimension}"
                    )));
                }
                if let Some(t) = self.truncation {
                    if t < dimension / 2 {
                        return Err(SweepError::usage(format!(
                            "truncation {t} is below the largest input OAM {}",
                            dimension / 2
                        )));
                    }
                }
            }
            Scenario::Path {
                n_signal,
                n_idler,
                l0,
                model,
            } => {
                if n_signal == 0 || n_idler == 0 {
                    return Err(SweepError::usage("slit counts must be positive"));
                }
                if model == CorrelationModel::Diagonal && n_signal != n_idler {
                    return Err(SweepError::usage(
                        "the diagonal correlation model needs N = M",
                    ));
                }
                if let Some(t) = self.truncation {
                    if t as u64 <= l0.unsigned_abs() {
                        return Err(SweepError::usage(format!(
                            "truncation {t} leaves no margin around l0 = {l0}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolved configuration as a JSON object.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "mode": self.mode().to_string(),
            "alpha_min": self.alpha_min,
            "alpha_max": self.alpha_max,
            "steps": self.steps,
            "truncation": self.truncation,
            "format": self.format.to_string(),
        });
        let obj = v.as_object_mut().expect("object literal");
        match self.scenario {
            Scenario::Oam { dimension } => {
                obj.insert("dimension".into(), json!(dimension));
            }
            Scenario::Path {
                n_signal,
                n_idler,
                l0,
                model,
            } => {
                obj.insert("slits".into(), json!([n_signal, n_idler]));
                obj.insert("l0".into(), json!(l0));
                obj.insert("correlation_model".into(), json!(model.to_string()));
            }
        }
        v
    }
}

/// What a command line asks for.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    /// One curve, written to `output` or stdout.
    Single {
        config: SweepConfig,
        output: Option<PathBuf>,
    },
    /// A figure preset, one file per curve in `dir`.
    Preset {
        preset: Preset,
        curves: Vec<(String, SweepConfig)>,
        dir: PathBuf,
        parallelism: Option<usize>,
    },
}

fn reject_with_preset(raw: &RawConfig) -> Result<()> {
    let fixed = [
        ("mode", raw.mode.is_some()),
        ("dimension", raw.dimension.is_some()),
        ("slits", raw.slits.is_some()),
        ("alpha-min", raw.alpha_min.is_some()),
        ("alpha-max", raw.alpha_max.is_some()),
    ];
    if let Some((key, _)) = fixed.iter().find(|(_, set)| *set) {
        return Err(SweepError::usage(format!(
            "`{key}` is fixed by the preset and cannot be set"
        )));
    }
    Ok(())
}

/// Validates merged settings into a [`Plan`].
pub fn resolve(raw: RawConfig) -> Result<Plan> {
    let format = raw
        .format
        .as_deref()
        .map(str::parse)
        .transpose()?
        .unwrap_or(Format::Csv);
    let model = raw
        .correlation_model
        .as_deref()
        .map(|s| {
            s.parse::<CorrelationModel>()
                .map_err(|e| SweepError::usage(e.to_string()))
        })
        .transpose()?;
    if let Some(name) = &raw.preset {
        reject_with_preset(&raw)?;
        let preset: Preset = name.parse()?;
        let dir = raw.output.clone().ok_or_else(|| {
            SweepError::usage("presets write one file per curve and need --output DIR")
        })?;
        let curves = preset.curves(
            raw.steps,
            raw.truncation,
            raw.l0,
            model,
            format,
            raw.parallelism,
        )?;
        return Ok(Plan::Preset {
            preset,
            curves,
            dir,
            parallelism: raw.parallelism,
        });
    }

    let mode: Mode = raw
        .mode
        .as_deref()
        .ok_or_else(|| SweepError::usage("--mode (oam or path) or --preset is required"))?
        .parse()?;
    let scenario = match mode {
        Mode::Oam => {
            if raw.slits.is_some() || raw.l0.is_some() || model.is_some() {
                return Err(SweepError::usage(
                    "slits, l0 and correlation-model only apply to --mode path",
                ));
            }
            let dimension = raw
                .dimension
                .ok_or_else(|| SweepError::usage("--mode oam needs --dimension"))?;
            Scenario::Oam { dimension }
        }
        Mode::Path => {
            if raw.dimension.is_some() {
                return Err(SweepError::usage("dimension only applies to --mode oam"));
            }
            let (n_signal, n_idler) = raw
                .slits
                .ok_or_else(|| SweepError::usage("--mode path needs --slits N M"))?;
            Scenario::Path {
                n_signal,
                n_idler,
                l0: raw.l0.unwrap_or(0),
                model: model.unwrap_or(CorrelationModel::Overlap),
            }
        }
    };
    let default_max = match scenario {
        Scenario::Oam { .. } => TAU,
        Scenario::Path {
            n_signal, n_idler, ..
        } => TAU / n_signal.max(n_idler).max(1) as f64,
    };
    let config = SweepConfig {
        scenario,
        alpha_min: raw.alpha_min.unwrap_or(0.0),
        alpha_max: snap_to_full_turn(raw.alpha_max.unwrap_or(default_max)),
        steps: raw.steps.unwrap_or(DEFAULT_STEPS),
        truncation: raw.truncation,
        format,
        parallelism: raw.parallelism,
    };
    config.validate()?;
    Ok(Plan::Single {
        config,
        output: raw.output,
    })
}

/// Treats values within rounding of 2π (e.g. a typed `6.2831853072`) as 2π.
fn snap_to_full_turn(alpha: f64) -> f64 {
    if (alpha - TAU).abs() <= 1e-9 {
        TAU
    } else {
        alpha
    }
}

/// Parses command-line arguments (after the program name has been consumed by
/// clap) plus an optional config file into a [`Plan`].
pub fn parse_config<I, T>(args: I) -> Result<Plan>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| SweepError::usage(e.to_string()))?;
    let file = match &cli.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    resolve(RawConfig::from(cli).over(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(args: &str) -> Result<Plan> {
        parse_config(std::iter::once("qudit-sweep").chain(args.split_whitespace()))
    }

    fn single(args: &str) -> SweepConfig {
        match plan(args).unwrap() {
            Plan::Single { config, .. } => config,
            other => panic!("expected a single sweep, got {other:?}"),
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn oam_example() {
        let c = single("--mode oam --dimension 5 --alpha-max 6.283185 --steps 200");
        assert_eq!(c.scenario, Scenario::Oam { dimension: 5 });
        assert_eq!(c.steps, 200);
        assert_eq!(c.alpha_max, 6.283185);
    }

    #[test]
    fn path_example() {
        let c = single("--mode path --slits 3 5 --alpha-max 1.2566");
        assert_eq!(
            c.scenario,
            Scenario::Path {
                n_signal: 3,
                n_idler: 5,
                l0: 0,
                model: CorrelationModel::Overlap
            }
        );
        assert_eq!(c.alpha_min, 0.0);
    }

    #[test]
    fn even_dimension_is_a_usage_error() {
        let e = plan("--mode oam --dimension 4").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn range_and_conflict_errors() {
        for args in [
            "--mode oam --dimension 3 --alpha-min 1 --alpha-max 0.5",
            "--mode oam --dimension 3 --alpha-max 7",
            "--mode oam --dimension 3 --steps 1",
            "--mode oam --dimension 3 --slits 2 2",
            "--mode path --slits 2 3 --correlation-model diagonal",
            "--mode path --dimension 3 --slits 2 2",
            "--mode path --slits 2 2 --l0 3 --truncation 3",
            "--mode path",
            "--mode oam --dimension 3 --parallelism 0",
            "--mode oam --dimension 3 --format xml",
            "--preset fig3",
            "--preset fig9 --output out",
            "--preset fig3 --output out --slits 2 2",
            "--dimension 3",
        ] {
            let e = plan(args).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{args}: {e}");
        }
    }

    #[test]
    fn negative_l0_is_accepted() {
        let c = single("--mode path --slits 2 2 --l0 -3");
        assert!(matches!(c.scenario, Scenario::Path { l0: -3, .. }));
    }

    #[test]
    fn file_values_are_overridden_by_flags() {
        let file = RawConfig::from_file_contents(
            "# sweep\nmode = path\nslits = 2 4\nalpha_max = 0.9\nsteps = 11\n",
        )
        .unwrap();
        let cli = RawConfig {
            steps: Some(21),
            ..RawConfig::default()
        };
        let Plan::Single { config, .. } = resolve(cli.over(file)).unwrap() else {
            panic!()
        };
        assert_eq!(config.steps, 21);
        assert_eq!(config.alpha_max, 0.9);
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        for text in [
            "mode = oam\ncolour = blue\n",
            "just words\n",
            "steps = 3\nsteps = 4\n",
        ] {
            let e = RawConfig::from_file_contents(text).unwrap_err();
            assert_eq!(e.exit_code(), 2);
        }
    }

    #[test]
    fn config_file_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.conf");
        std::fs::write(&path, "mode = oam\ndimension = 7\n").unwrap();
        let c = single(&format!("--config {} --steps 5", path.display()));
        assert_eq!(c.scenario, Scenario::Oam { dimension: 7 });
        assert_eq!(c.steps, 5);
        let missing = plan("--config /nonexistent/sweep.conf").unwrap_err();
        assert_eq!(missing.exit_code(), 3);
    }
}
