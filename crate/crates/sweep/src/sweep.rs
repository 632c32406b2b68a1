//! Sweep execution: alpha grid, per-point evaluation, rows.

use std::f64::consts::TAU;

use angular_qudit::entanglement::{uniform_coeffs, EntanglementReport};
use angular_qudit::optics::{
    oam_range, single_aperture_overlaps, truncated_single_aperture_overlaps,
};
use angular_qudit::path::{path_concurrence_curve, TRUNCATION_TOL};
use angular_qudit::{
    concurrence, purity, purity_symmetric, schmidt_oracle, ApertureMask, BiphotonState,
    Error as NumericsError, OverlapMatrix, PathConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Scenario, SweepConfig};
use crate::error::{Result, SweepError};

/// Smallest aperture evaluated; a zero aperture has no transmitted state.
pub const ALPHA_FLOOR: f64 = 1e-4;

/// Effective-rank threshold on Schmidt weights.
pub const RANK_TOL: f64 = 1e-10;

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha_rad: f64,
    #[serde(with = "nan_as_null")]
    pub concurrence: f64,
    #[serde(with = "nan_as_null")]
    pub purity: f64,
    pub schmidt_rank_effective: usize,
    pub truncation_used: usize,
    pub converged: bool,
    pub notes: String,
}

impl SweepRow {
    /// Whether the point produced an entanglement value at all.
    pub fn has_value(&self) -> bool {
        !self.purity.is_nan()
    }

    /// A computed value that failed the truncation-doubling check.
    pub fn is_unconverged(&self) -> bool {
        self.has_value() && !self.converged
    }

    fn from_report(alpha: f64, report: &EntanglementReport, notes: Vec<String>) -> Self {
        Self {
            alpha_rad: alpha,
            concurrence: report.concurrence,
            purity: report.purity,
            schmidt_rank_effective: report.schmidt_rank(RANK_TOL),
            truncation_used: report.truncation_used,
            converged: report.converged,
            notes: notes.join(";"),
        }
    }

    fn without_value(alpha: f64, truncation: usize, notes: Vec<String>) -> Self {
        Self {
            alpha_rad: alpha,
            concurrence: f64::NAN,
            purity: f64::NAN,
            schmidt_rank_effective: 0,
            truncation_used: truncation,
            converged: false,
            notes: notes.join(";"),
        }
    }
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Inclusive uniform grid from `alpha_min` to `alpha_max` (the last point is
/// exactly `alpha_max`). A zero aperture is replaced by [`ALPHA_FLOOR`]; the
/// flag marks replaced points.
pub fn alpha_grid(alpha_min: f64, alpha_max: f64, steps: usize) -> Vec<(f64, bool)> {
    let span = alpha_max - alpha_min;
    (0..steps)
        .map(|i| {
            let a = if i + 1 == steps {
                alpha_max
            } else {
                alpha_min + span * i as f64 / (steps - 1) as f64
            };
            if a == 0.0 {
                (ALPHA_FLOOR, true)
            } else {
                (a, false)
            }
        })
        .collect()
}

fn floor_note(replaced: bool) -> Option<String> {
    replaced.then(|| format!("alpha=0 evaluated at {ALPHA_FLOOR:e}"))
}

fn with_pool<T: Send>(parallelism: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = parallelism {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| {
        SweepError::usage(format!("cannot start {parallelism:?} worker threads: {e}"))
    })?;
    Ok(pool.install(job))
}

fn closed_form_point(
    d: usize,
    alpha: f64,
) -> std::result::Result<EntanglementReport, NumericsError> {
    let b = single_aperture_overlaps(alpha, &oam_range(d / 2))?;
    let p = purity_symmetric(&b, d)?;
    let state = BiphotonState::from_schmidt_weights(&uniform_coeffs(d))?;
    let mut report = schmidt_oracle(&state, &b, &b)?;
    report.purity = p;
    report.concurrence = concurrence(p)?;
    report.truncation_used = 0;
    report.converged = true;
    Ok(report)
}

fn truncated_point(
    d: usize,
    alpha: f64,
    truncation: usize,
) -> std::result::Result<EntanglementReport, NumericsError> {
    let mask = ApertureMask::single(alpha)?;
    let ls = oam_range(d / 2);
    let c = uniform_coeffs(d);
    let at = |t: usize| -> std::result::Result<(f64, OverlapMatrix), NumericsError> {
        let b = truncated_single_aperture_overlaps(&mask, &ls, t)?;
        Ok((purity(&c, &b)?, b))
    };
    let (p, b) = at(truncation)?;
    let (p2, _) = at(2 * truncation)?;
    let state = BiphotonState::from_schmidt_weights(&c)?;
    let mut report = schmidt_oracle(&state, &b, &b)?;
    report.purity = p;
    report.concurrence = concurrence(p)?;
    report.truncation_used = truncation;
    report.converged = (report.concurrence - concurrence(p2)?).abs() < TRUNCATION_TOL;
    Ok(report)
}

/// Single-aperture sweep for a uniform `D`-dimensional OAM input.
///
/// Without a truncation override the overlaps are the closed-form sinc values
/// and the purity is the symmetric form, so rows are exact (`truncation_used = 0`).
/// With an override the normalized truncated mode sums are used instead and each
/// row carries the doubling check.
pub fn run_oam_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let Scenario::Oam { dimension: d } = config.scenario else {
        return Err(SweepError::usage(
            "run_oam_sweep needs an OAM configuration",
        ));
    };
    config.validate()?;
    let grid = alpha_grid(config.alpha_min, config.alpha_max, config.steps);
    let truncation = config.truncation;
    with_pool(config.parallelism, || {
        grid.par_iter()
            .map(|&(alpha, replaced)| {
                let mut notes: Vec<String> = floor_note(replaced).into_iter().collect();
                let result = match truncation {
                    None => {
                        notes.push("closed-form".into());
                        closed_form_point(d, alpha)
                    }
                    Some(t) => truncated_point(d, alpha, t),
                };
                match result {
                    Ok(r) => SweepRow::from_report(alpha, &r, notes),
                    Err(e) => {
                        notes.push(format!("failed: {e}"));
                        SweepRow::without_value(alpha, truncation.unwrap_or(0), notes)
                    }
                }
            })
            .collect()
    })
}

/// Path-entanglement sweep for an `N x M` slit configuration.
pub fn run_path_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let Scenario::Path {
        n_signal,
        n_idler,
        l0,
        model,
    } = config.scenario
    else {
        return Err(SweepError::usage(
            "run_path_sweep needs a path configuration",
        ));
    };
    config.validate()?;
    let grid = alpha_grid(config.alpha_min, config.alpha_max, config.steps);
    let base = PathConfig::new(n_signal, n_idler, TAU / n_signal.max(n_idler) as f64)
        .with_l0(l0)
        .with_model(model)
        .with_truncation(config.truncation);
    let alphas: Vec<f64> = grid.iter().map(|&(a, _)| a).collect();
    let points = with_pool(config.parallelism, || {
        path_concurrence_curve(&base, &alphas)
    })?;
    Ok(points
        .iter()
        .zip(&grid)
        .map(|(point, &(_, replaced))| {
            let mut notes = vec![format!("model={model}")];
            notes.extend(floor_note(replaced));
            if point.capped(&base) {
                notes.push(format!("capped={}x{}", point.n_signal, point.n_idler));
            }
            let bound = PathConfig {
                alpha: point.alpha,
                ..base
            }
            .truncation_bound();
            match &point.result {
                Ok(r) => {
                    if r.deflated_modes > 0 {
                        notes.push(format!("deflated={}", r.deflated_modes));
                    }
                    SweepRow::from_report(point.alpha, r, notes)
                }
                Err(NumericsError::DegenerateState(_)) => {
                    notes.push("degenerate: signal and idler slits share no aperture".into());
                    SweepRow::without_value(point.alpha, bound, notes)
                }
                Err(e) => {
                    notes.push(format!("failed: {e}"));
                    SweepRow::without_value(point.alpha, bound, notes)
                }
            }
        })
        .collect())
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    match config.scenario {
        Scenario::Oam { .. } => run_oam_sweep(config),
        Scenario::Path { .. } => run_path_sweep(config),
    }
}
