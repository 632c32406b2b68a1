//! Closed arcs on the unit circle, represented by their pieces inside `[-π, π)`.

use std::f64::consts::{PI, TAU};

/// Reduce an angle to `[-π, π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let r = (phi + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to TAU for tiny negative inputs
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// A closed arc `[center - width/2, center + width/2]` taken mod 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    pub center: f64,
    pub width: f64,
}

impl Wedge {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }

    pub fn is_full_circle(&self) -> bool {
        self.width >= TAU
    }

    /// Non-wrapping pieces `(lo, hi)` with `-π <= lo < hi <= π`; at most two.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        if self.is_full_circle() {
            return vec![(-PI, PI)];
        }
        let lo = wrap_angle(self.center - self.width / 2.0);
        let hi = lo + self.width;
        if hi <= PI {
            vec![(lo, hi)]
        } else {
            vec![(lo, PI), (-PI, hi - TAU)]
        }
    }

    /// Membership test with the closed-interval convention of a binary slit.
    pub fn contains(&self, phi: f64) -> bool {
        if self.is_full_circle() {
            return true;
        }
        let d = wrap_angle(phi - self.center);
        // distance to the center measured the short way round
        d.abs() <= self.width / 2.0
    }

    /// Pieces of the intersection of two arcs, sorted by lower end.
    pub fn intersection(&self, other: &Wedge) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &(a0, a1) in &self.pieces() {
            for &(b0, b1) in &other.pieces() {
                let lo = a0.max(b0);
                let hi = a1.min(b1);
                if hi > lo {
                    out.push((lo, hi));
                }
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    /// Angular length of the intersection.
    pub fn intersection_length(&self, other: &Wedge) -> f64 {
        self.intersection(other)
            .iter()
            .map(|(lo, hi)| hi - lo)
            .sum()
    }
}
