//! Angular-grid quadrature in the position basis.
//!
//! Binary masks make the integrands discontinuous at slit edges, so the grid is
//! laid out piecewise: `[-π, π)` is cut at every slit edge and each piece gets its
//! own uniform composite-Simpson grid. Inside a piece the integrand is a smooth
//! trigonometric polynomial.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::optics::{ApertureMask, OamIndex, SlitIndex};

/// Quadrature nodes and weights over a set of disjoint angular intervals.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Interval each node belongs to. Nodes on a shared endpoint appear once per interval.
    interval_of: Vec<usize>,
    intervals: Vec<(f64, f64)>,
}

impl AngularGrid {
    /// Composite Simpson on each interval with cell width about `2π / points_per_turn`
    /// (at least two cells per interval).
    pub fn on_intervals(intervals: &[(f64, f64)], points_per_turn: usize) -> Result<Self> {
        if points_per_turn < 2 {
            return Err(invalid("need at least two grid points per turn"));
        }
        let mut grid = AngularGrid {
            nodes: Vec::new(),
            weights: Vec::new(),
            interval_of: Vec::new(),
            intervals: intervals.to_vec(),
        };
        for (idx, &(lo, hi)) in intervals.iter().enumerate() {
            if !(hi > lo) {
                return Err(invalid(format!("empty interval ({lo}, {hi})")));
            }
            let cells = (points_per_turn as f64 * (hi - lo) / TAU).ceil() as usize;
            let cells = cells.max(2).next_multiple_of(2);
            let h = (hi - lo) / cells as f64;
            for i in 0..=cells {
                let w = if i == 0 || i == cells {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                grid.nodes
                    .push(if i == cells { hi } else { lo + i as f64 * h });
                grid.weights.push(w * h / 3.0);
                grid.interval_of.push(idx);
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Interval index of node `i`.
    pub fn interval_of(&self, i: usize) -> usize {
        self.interval_of[i]
    }

    /// Midpoint of interval `idx`; masks are constant on each interval, so this
    /// decides transmission for every node in it (including shared endpoints).
    pub fn interval_midpoint(&self, idx: usize) -> f64 {
        let (lo, hi) = self.intervals[idx];
        0.5 * (lo + hi)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex64::new(0.0, 0.0), |acc, (&x, &w)| acc + f(x) * w)
    }
}

/// Closed form of `∫_lo^hi exp(i dl φ) dφ`.
pub fn exp_integral(lo: f64, hi: f64, dl: f64) -> Complex64 {
    if dl == 0.0 {
        return Complex64::new(hi - lo, 0.0);
    }
    (Complex64::from_polar(1.0, dl * hi) - Complex64::from_polar(1.0, dl * lo))
        / Complex64::new(0.0, dl)
}

/// Cut `[-π, π)` at every slit edge of the given masks and keep the pieces
/// where some slit of the masks is open.
pub fn open_intervals(masks: &[&ApertureMask]) -> Vec<(f64, f64)> {
    let mut cuts = vec![-PI, PI];
    for mask in masks {
        for k in mask.slits() {
            let support = mask.slit_support(k).expect("slit from the mask's own grid");
            for (lo, hi) in support.pieces() {
                cuts.push(lo);
                cuts.push(hi);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts.windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(lo, hi)| hi - lo > 1e-15)
        .filter(|&(lo, hi)| masks.iter().any(|m| m.is_open(0.5 * (lo + hi))))
        .collect()
}

/// Position-space overlap `<ψ_m^j|ψ_l^k> = (1/2π) ∫ A_j(φ) A_k(φ) exp(i (l - m) φ) dφ`
/// of two diffracted modes (unnormalized convention), by Simpson quadrature over
/// the intersection of the two slit supports.
pub fn position_overlap(
    mask_a: &ApertureMask,
    j: SlitIndex,
    m: OamIndex,
    mask_b: &ApertureMask,
    k: SlitIndex,
    l: OamIndex,
    points_per_turn: usize,
) -> Result<Complex64> {
    let pieces = mask_a
        .slit_support(j)?
        .intersection(&mask_b.slit_support(k)?);
    if pieces.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let grid = AngularGrid::on_intervals(&pieces, points_per_turn)?;
    let dl = (l - m) as f64;
    Ok(grid.integrate(|phi| Complex64::from_polar(1.0, dl * phi)) / TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::sinc;

    #[test]
    fn simpson_integrates_trig_polynomials() {
        let grid = AngularGrid::on_intervals(&[(-0.4, 1.1)], 1 << 12).unwrap();
        let z = grid.integrate(|x| Complex64::from_polar(1.0, 3.0 * x));
        let exact = (Complex64::from_polar(1.0, 3.3) - Complex64::from_polar(1.0, -1.2))
            / Complex64::new(0.0, 3.0);
        assert!((z - exact).norm() < 1e-10);
    }

    #[test]
    fn single_slit_overlap_is_scaled_sinc() {
        let mask = ApertureMask::single(1.3).unwrap();
        for (m, l) in [(0, 0), (1, -2), (3, 1)] {
            let z = position_overlap(
                &mask,
                SlitIndex::CENTER,
                m,
                &mask,
                SlitIndex::CENTER,
                l,
                1 << 16,
            )
            .unwrap();
            let want = 1.3 / TAU * sinc((l - m) as f64 * 1.3 / 2.0).unwrap();
            assert!((z - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn disjoint_slits_do_not_overlap() {
        let mask = ApertureMask::tiled(3, 1.0).unwrap();
        let z = position_overlap(
            &mask,
            SlitIndex::integer(-1),
            0,
            &mask,
            SlitIndex::integer(1),
            0,
            1 << 14,
        )
        .unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn open_intervals_cover_the_mask() {
        let mask = ApertureMask::tiled(4, 1.0)
            .unwrap()
            .with_offset(0.2)
            .unwrap();
        let total: f64 = open_intervals(&[&mask]).iter().map(|(l, h)| h - l).sum();
        assert!((total - 4.0).abs() < 1e-12);
        let full = ApertureMask::tiled(5, TAU / 5.0).unwrap();
        let total: f64 = open_intervals(&[&full]).iter().map(|(l, h)| h - l).sum();
        assert!((total - TAU).abs() < 1e-12);
    }
}
