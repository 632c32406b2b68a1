//! Figure presets: named sets of concurrence curves.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use angular_qudit::CorrelationModel;

use crate::config::{Format, Scenario, SweepConfig, DEFAULT_STEPS};
use crate::error::{Result, SweepError};

/// OAM dimensions of the single-aperture figure.
pub const FIG2_DIMENSIONS: [usize; 5] = [3, 5, 7, 9, 11];
/// Symmetric slit counts, `N_max = 6`.
pub const FIG3_PAIRS: [(usize, usize); 5] = [(2, 2), (3, 3), (4, 4), (5, 5), (6, 6)];
/// Asymmetric slit counts, `N_max = 5`.
pub const FIG4_PAIRS: [(usize, usize); 6] = [(2, 2), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)];
/// Asymmetric slit counts, `N_max = 8`.
pub const FIG5_PAIRS: [(usize, usize); 6] = [(5, 6), (5, 7), (5, 8), (6, 7), (6, 8), (7, 8)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    FigA1,
    FigA2,
    FigA3,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Self::Fig2,
        Self::Fig3,
        Self::Fig4,
        Self::Fig5,
        Self::FigA1,
        Self::FigA2,
        Self::FigA3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::FigA1 => "figA1",
            Self::FigA2 => "figA2",
            Self::FigA3 => "figA3",
        }
    }

    /// Slit pairs of a path preset; `None` for the OAM preset.
    pub fn pairs(&self) -> Option<&'static [(usize, usize)]> {
        match self {
            Self::Fig2 => None,
            Self::Fig3 | Self::FigA1 => Some(&FIG3_PAIRS),
            Self::Fig4 | Self::FigA2 => Some(&FIG4_PAIRS),
            Self::Fig5 | Self::FigA3 => Some(&FIG5_PAIRS),
        }
    }

    /// Upper end of the aperture range.
    pub fn alpha_max(&self) -> f64 {
        match self.pairs() {
            Some(pairs) if matches!(self, Self::Fig3 | Self::Fig4 | Self::Fig5) => {
                let n_max = pairs
                    .iter()
                    .map(|&(n, m)| n.max(m))
                    .max()
                    .expect("non-empty");
                TAU / n_max as f64
            }
            _ => TAU,
        }
    }

    /// Named, validated curves of the preset with the optional overrides applied.
    pub fn curves(
        &self,
        steps: Option<usize>,
        truncation: Option<usize>,
        l0: Option<i64>,
        model: Option<CorrelationModel>,
        format: Format,
        parallelism: Option<usize>,
    ) -> Result<Vec<(String, SweepConfig)>> {
        let make = |scenario| SweepConfig {
            scenario,
            alpha_min: 0.0,
            alpha_max: self.alpha_max(),
            steps: steps.unwrap_or(DEFAULT_STEPS),
            truncation,
            format,
            parallelism,
        };
        let curves: Vec<(String, SweepConfig)> = match self.pairs() {
            None => {
                if l0.is_some() || model.is_some() {
                    return Err(SweepError::usage(
                        "l0 and correlation-model do not apply to the OAM preset",
                    ));
                }
                FIG2_DIMENSIONS
                    .iter()
                    .map(|&d| {
                        (
                            format!("{}_D{d}", self.name()),
                            make(Scenario::Oam { dimension: d }),
                        )
                    })
                    .collect()
            }
            Some(pairs) => pairs
                .iter()
                .map(|&(n, m)| {
                    (
                        format!("{}_N{n}xM{m}", self.name()),
                        make(Scenario::Path {
                            n_signal: n,
                            n_idler: m,
                            l0: l0.unwrap_or(0),
                            model: model.unwrap_or(CorrelationModel::Overlap),
                        }),
                    )
                })
                .collect(),
        };
        for (_, c) in &curves {
            c.validate()?;
        }
        Ok(curves)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                SweepError::usage(format!(
                    "unknown preset `{s}` (expected fig2, fig3, fig4, fig5, figA1, figA2 or figA3)"
                ))
            })
    }
}
