//! Concurrence-vs-aperture sweeps for OAM- and path-entangled photon pairs
//! diffracted by angular slit masks, with CSV/JSON output.

pub mod config;
pub mod emit;
pub mod error;
pub mod presets;
pub mod sweep;

use std::path::PathBuf;

use serde_json::{json, Value};

pub use config::{parse_config, Format, Mode, Plan, Scenario, SweepConfig};
pub use emit::emit;
pub use error::{Result, SweepError};
pub use presets::Preset;
pub use sweep::{alpha_grid, run_oam_sweep, run_path_sweep, run_sweep, SweepRow};

/// Fraction of unconverged rows above which a run fails with exit code 4.
pub const UNCONVERGED_LIMIT: f64 = 0.1;

/// Counts over every row a run produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub rows: usize,
    /// Rows with a value that failed the truncation-doubling check.
    pub unconverged: usize,
    /// Rows where no state exists or evaluation failed.
    pub without_value: usize,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    fn add(&mut self, rows: &[SweepRow]) {
        self.rows += rows.len();
        self.unconverged += rows.iter().filter(|r| r.is_unconverged()).count();
        self.without_value += rows.iter().filter(|r| !r.has_value()).count();
    }

    pub fn check_convergence(&self) -> Result<()> {
        if self.unconverged as f64 > UNCONVERGED_LIMIT * self.rows as f64 {
            return Err(SweepError::Convergence {
                unconverged: self.unconverged,
                total: self.rows,
            });
        }
        Ok(())
    }
}

/// `meta` object of JSON output. Holds no timestamps, paths or thread counts,
/// so identical sweeps give identical bytes.
pub fn meta(config: &SweepConfig, curve: Option<(Preset, &str)>) -> Value {
    let mut m = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config.to_json(),
    });
    if let Some((preset, name)) = curve {
        let obj = m.as_object_mut().expect("object literal");
        obj.insert("preset".into(), json!(preset.name()));
        obj.insert("curve".into(), json!(name));
    }
    m
}

/// Runs every sweep of `plan` and writes its output.
pub fn execute(plan: &Plan) -> Result<RunSummary> {
    let mut summary = RunSummary::default();
    match plan {
        Plan::Single { config, output } => {
            let rows = run_sweep(config)?;
            emit(&rows, &meta(config, None), config.format, output.as_deref())?;
            summary.add(&rows);
            summary.files.extend(output.clone());
        }
        Plan::Preset {
            preset,
            curves,
            dir,
            ..
        } => {
            std::fs::create_dir_all(dir).map_err(|source| SweepError::Io {
                action: "create output directory",
                path: dir.clone(),
                source,
            })?;
            for (name, config) in curves {
                let rows = run_sweep(config)?;
                let path = dir.join(format!("{name}.{}", config.format.extension()));
                emit(
                    &rows,
                    &meta(config, Some((*preset, name))),
                    config.format,
                    Some(&path),
                )?;
                summary.add(&rows);
                summary.files.push(path);
            }
        }
    }
    Ok(summary)
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = <config::Cli as clap::Parser>::try_parse_from(&args);
    if let Err(e) = &cli {
        if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
        ) {
            let _ = e.print();
            return 0;
        }
    }
    let outcome = parse_config(&args).and_then(|plan| {
        let summary = execute(&plan)?;
        if summary.without_value > 0 {
            eprintln!(
                "note: {} of {} rows have no value (see the notes column)",
                summary.without_value, summary.rows
            );
        }
        summary.check_convergence()
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qudit-sweep: {e}");
            e.exit_code()
        }
    }
}
