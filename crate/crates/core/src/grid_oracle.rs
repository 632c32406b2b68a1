//! Schmidt spectrum from the joint wavefunction sampled on an angular grid.
//!
//! The diffracted state is written as `ψ(φ_s, φ_i) = Σ_ab W_ab f_a(φ_s) g_b(φ_i)` with
//! position-space mode functions `f_a(φ) = A_k(φ) exp(i l φ) / sqrt(2π)`. Sampling
//! with square-root quadrature weights gives matrices `S_s`, `S_i` such that the
//! discretized wavefunction is `S_s W S_iᵀ`. A thin QR `S = Q R` of each side maps
//! that onto `Q_s (R_s W R_iᵀ) Q_iᵀ`, so the nonzero eigenvalues of the one-photon
//! correlation matrix `Ψ Ψ†` are those of `M M†` with `M = R_s W R_iᵀ`.
//!
//! None of this touches OAM mode sums or closed-form overlaps.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::arc::Wedge;
use crate::entanglement::{BiphotonState, EntanglementReport};
use crate::error::{invalid, Result};
use crate::optics::{ApertureMask, ModeLabel, OamIndex, OverlapMatrix, SlitIndex};
use crate::quadrature::{exp_integral, open_intervals, AngularGrid};

/// Smallest accepted grid (points per full turn).
pub const MIN_GRID_POINTS: usize = 1 << 12;

/// Concurrence change under grid doubling above which the result is flagged.
pub const GRID_CONVERGENCE_TOL: f64 = 1e-6;

/// Position-space diffracted mode `A_k(φ) exp(i l φ) / sqrt(2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFunction {
    mask: ApertureMask,
    slit: SlitIndex,
    l: OamIndex,
}

impl ModeFunction {
    pub fn new(mask: ApertureMask, slit: SlitIndex, l: OamIndex) -> Result<Self> {
        mask.slit_center(slit)?;
        Ok(Self { mask, slit, l })
    }

    pub fn mask(&self) -> &ApertureMask {
        &self.mask
    }

    pub fn slit(&self) -> SlitIndex {
        self.slit
    }

    pub fn l(&self) -> OamIndex {
        self.l
    }

    pub fn support(&self) -> Wedge {
        Wedge::new(self.mask.center_unchecked(self.slit), self.mask.alpha())
    }

    pub fn label(&self) -> ModeLabel {
        ModeLabel::new(self.l, self.slit)
    }
}

/// A biphoton state given by position-space mode functions on each side and the
/// weight matrix coupling them.
#[derive(Debug, Clone)]
pub struct BiphotonExpansion {
    signal: Vec<ModeFunction>,
    idler: Vec<ModeFunction>,
    weights: DMatrix<Complex64>,
}

impl BiphotonExpansion {
    pub fn new(
        signal: Vec<ModeFunction>,
        idler: Vec<ModeFunction>,
        weights: DMatrix<Complex64>,
    ) -> Result<Self> {
        if signal.is_empty() || idler.is_empty() {
            return Err(invalid("both photons need at least one mode function"));
        }
        if weights.shape() != (signal.len(), idler.len()) {
            return Err(invalid(format!(
                "weights are {:?} but there are {} signal and {} idler modes",
                weights.shape(),
                signal.len(),
                idler.len()
            )));
        }
        Ok(Self {
            signal,
            idler,
            weights,
        })
    }

    /// `Σ_l c_l ψ_l(φ_s) ψ_{-l}(φ_i)` behind one mask on both photons, with
    /// `c` indexed over `l = -N..N`.
    pub fn oam(mask: ApertureMask, c: &[Complex64]) -> Result<Self> {
        let state = BiphotonState::from_schmidt_weights(c)?;
        let n = (c.len() / 2) as i64;
        let family = (-n..=n)
            .map(|l| ModeFunction::new(mask, SlitIndex::CENTER, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(family.clone(), family, state.coeffs().clone())
    }

    pub fn signal(&self) -> &[ModeFunction] {
        &self.signal
    }

    pub fn idler(&self) -> &[ModeFunction] {
        &self.idler
    }

    pub fn weights(&self) -> &DMatrix<Complex64> {
        &self.weights
    }

    pub fn state(&self) -> BiphotonState {
        BiphotonState::new(self.weights.clone()).expect("weights validated on construction")
    }
}

/// Exact Gram matrix of position-space mode functions from closed-form
/// integrals of `exp(i Δl φ)` over the intersection of their slit arcs.
pub fn exact_gram(functions: &[ModeFunction]) -> Result<OverlapMatrix> {
    let n = functions.len();
    let mut g = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let (fa, fb) = (&functions[a], &functions[b]);
            let dl = (fb.l - fa.l) as f64;
            let z: Complex64 = fa
                .support()
                .intersection(&fb.support())
                .iter()
                .map(|&(lo, hi)| exp_integral(lo, hi, dl))
                .sum();
            g[(a, b)] = z / TAU;
        }
    }
    OverlapMatrix::new(g, functions.iter().map(ModeFunction::label).collect())
}

/// `sqrt(w) f(φ)` for every function at every node of an edge-aligned grid.
fn sample(functions: &[ModeFunction], grid_points: usize) -> Result<DMatrix<Complex64>> {
    let masks: Vec<&ApertureMask> = functions.iter().map(|f| &f.mask).collect();
    let intervals = open_intervals(&masks);
    let grid = AngularGrid::on_intervals(&intervals, grid_points)?;
    let open: Vec<Vec<bool>> = functions
        .iter()
        .map(|f| {
            let support = f.support();
            (0..intervals.len())
                .map(|iv| support.contains(grid.interval_midpoint(iv)))
                .collect()
        })
        .collect();
    let norm = TAU.sqrt().recip();
    Ok(DMatrix::from_fn(grid.len(), functions.len(), |a, r| {
        if open[r][grid.interval_of(a)] {
            let phi = grid.nodes()[a];
            Complex64::from_polar(grid.weights()[a].sqrt() * norm, functions[r].l as f64 * phi)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

fn check_grid(grid_points: usize) -> Result<()> {
    if grid_points < MIN_GRID_POINTS || !grid_points.is_power_of_two() {
        return Err(invalid(format!(
            "grid_points must be a power of two >= {MIN_GRID_POINTS}, got {grid_points}"
        )));
    }
    Ok(())
}

/// Gram matrix of the mode functions by angular quadrature.
pub fn sampled_gram(functions: &[ModeFunction], grid_points: usize) -> Result<OverlapMatrix> {
    check_grid(grid_points)?;
    if functions.is_empty() {
        return Err(invalid("no mode functions"));
    }
    let s = sample(functions, grid_points)?;
    OverlapMatrix::new(
        s.adjoint() * &s,
        functions.iter().map(ModeFunction::label).collect(),
    )
}

fn spectrum_on_grid(desc: &BiphotonExpansion, grid_points: usize) -> Result<EntanglementReport> {
    let rs = sample(&desc.signal, grid_points)?.qr().r();
    let ri = sample(&desc.idler, grid_points)?.qr().r();
    let m = rs * &desc.weights * ri.transpose();
    let corr = &m * m.adjoint();
    let eig = corr.symmetric_eigenvalues();
    EntanglementReport::from_weights(eig.iter().copied())
}

/// Schmidt spectrum of the sampled joint wavefunction, with a grid-doubling check.
pub fn grid_oracle(desc: &BiphotonExpansion, grid_points: usize) -> Result<EntanglementReport> {
    check_grid(grid_points)?;
    let mut report = spectrum_on_grid(desc, grid_points)?;
    let finer = spectrum_on_grid(desc, 2 * grid_points)?;
    report.converged = (report.concurrence - finer.concurrence).abs() <= GRID_CONVERGENCE_TOL;
    report.truncation_used = grid_points;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{max_concurrence, uniform_coeffs};

    #[test]
    fn full_aperture_keeps_maximal_entanglement() {
        let desc =
            BiphotonExpansion::oam(ApertureMask::single(TAU).unwrap(), &uniform_coeffs(3)).unwrap();
        let r = grid_oracle(&desc, 1 << 14).unwrap();
        assert!((r.concurrence - max_concurrence(3)).abs() < 1e-6);
        assert!(r.converged);
    }

    #[test]
    fn tiny_aperture_is_nearly_product() {
        let desc = BiphotonExpansion::oam(ApertureMask::single(1e-3).unwrap(), &uniform_coeffs(3))
            .unwrap();
        let r = grid_oracle(&desc, 1 << 12).unwrap();
        assert!(r.concurrence < 1e-3, "{}", r.concurrence);
    }

    #[test]
    fn sampled_gram_matches_exact_gram() {
        let mask = ApertureMask::new(3, 0.9, 1.7, 0.4).unwrap();
        let fs: Vec<_> = [(-1, 2), (0, 0), (1, -1), (1, 3)]
            .iter()
            .map(|&(k, l)| ModeFunction::new(mask, SlitIndex::integer(k), l).unwrap())
            .collect();
        let a = sampled_gram(&fs, 1 << 14).unwrap();
        let b = exact_gram(&fs).unwrap();
        assert!((a.entries() - b.entries()).camax() < 1e-12);
    }

    #[test]
    fn grid_size_is_checked() {
        let desc =
            BiphotonExpansion::oam(ApertureMask::single(1.0).unwrap(), &uniform_coeffs(3)).unwrap();
        assert!(grid_oracle(&desc, 1000).is_err());
        assert!(grid_oracle(&desc, 1 << 11).is_err());
    }
}
