//! Angular qudits: OAM-entangled photon pairs diffracted by angular slit masks.
//!
//! The crate is organised bottom-up:
//!
//! - [`optics`]: OAM modes, angular slit masks, diffracted single-photon modes and
//!   their mutual overlaps (truncated mode sums and closed forms).
//! - [`quadrature`]: position-space (angular grid) integration used as an
//!   independent check of the mode-space results.
//! - [`entanglement`]: normalization, reduced density matrix, purity and concurrence
//!   of diffracted biphoton pure states, plus the Schmidt-decomposition oracle.
//! - [`grid_oracle`]: Schmidt spectrum computed directly from the sampled
//!   joint wavefunction.
//! - [`path`]: path-entangled states produced by `N x M` slit masks.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod arc;
pub mod entanglement;
pub mod error;
pub mod grid_oracle;
pub mod optics;
pub mod path;
pub mod quadrature;

mod phase;

pub use entanglement::{
    concurrence, normalization_constant, purity, purity_symmetric, reduced_density, schmidt_oracle,
    BiphotonState, EntanglementReport,
};
pub use error::{Error, Result};
pub use grid_oracle::{grid_oracle, BiphotonExpansion, ModeFunction};
pub use optics::{
    diffracted_mode, mode_overlap_general, overlap_matrix, sinc, single_aperture_overlap_closed,
    ApertureMask, ModeLabel, ModeVector, OamIndex, OverlapMatrix, SlitIndex,
};
pub use path::{
    build_masks, generalized_overlap, path_coefficients, path_concurrence_curve, path_report,
    CorrelationModel, CorrelationWeights, CurvePoint, PathConfig,
};

pub use num_complex::Complex64;
