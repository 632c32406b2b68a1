//! OAM modes, angular slit masks, and the single-photon states they diffract.
//!
//! An OAM mode `|l>` has the azimuthal profile `exp(i l φ) / sqrt(2π)`. Passing it
//! through slit `k` of a binary mask keeps only the arc of that slit; expanded back
//! in the OAM basis the result has coefficients
//!
//! ```text
//! <l'|ψ_l^k> = (α / 2π) · exp(-i (l' - l) c_k) · sinc(α (l' - l) / 2)
//! ```
//!
//! where `c_k = offset + k β` is the slit center. The sum over `l'` is infinite;
//! every mode-space routine here takes an explicit truncation `L` and keeps
//! `|l'| <= L`. The tails decay only like `1/l'`, so callers should measure
//! convergence (e.g. by doubling `L`) rather than assume it.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::arc::{wrap_angle, Wedge};
use crate::error::{invalid, Result};

/// Orbital angular momentum quantum number `l` (azimuthal phase `exp(i l φ)`).
pub type OamIndex = i64;

/// Relative slack for the geometric constraints `α <= β` and `N β <= 2π`.
const GEOMETRY_TOL: f64 = 1e-12;

/// `sin(x) / x`, with the removable singularity filled in as 1.
pub fn sinc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!("sinc of non-finite argument {x}")));
    }
    Ok(sinc_unchecked(x))
}

#[inline]
pub(crate) fn sinc_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Slit label on the centered grid `k ∈ {-(N-1)/2, ..., (N-1)/2}`.
///
/// Stored as `2k` so the half-integer labels of an even slit count stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlitIndex(i64);

impl SlitIndex {
    /// The only slit of a single-slit mask.
    pub const CENTER: SlitIndex = SlitIndex(0);

    pub fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn integer(k: i64) -> Self {
        Self(2 * k)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Map the `n = 0, ..., N-1` labelling onto the centered grid.
    pub fn from_label(n: usize, n_slits: usize) -> Result<Self> {
        if n >= n_slits {
            return Err(invalid(format!("slit label {n} outside 0..{n_slits}")));
        }
        Ok(Self(2 * n as i64 - (n_slits as i64 - 1)))
    }

    /// Inverse of [`SlitIndex::from_label`].
    pub fn label(self, n_slits: usize) -> Option<usize> {
        self.on_grid(n_slits)
            .then(|| ((self.0 + n_slits as i64 - 1) / 2) as usize)
    }

    pub fn on_grid(self, n_slits: usize) -> bool {
        let span = n_slits as i64 - 1;
        n_slits > 0 && self.0.abs() <= span && (self.0 - span).rem_euclid(2) == 0
    }

    /// All slits of an `n_slits` mask in ascending order.
    pub fn grid(n_slits: usize) -> impl Iterator<Item = SlitIndex> {
        let span = n_slits as i64 - 1;
        (0..n_slits as i64).map(move |n| SlitIndex(2 * n - span))
    }
}

impl fmt::Display for SlitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Geometry of a binary mask with `n_slits` angular slits of width `alpha`,
/// centered at `offset + k * beta` for `k` on the centered grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureMask {
    n_slits: usize,
    alpha: f64,
    beta: f64,
    offset: f64,
}

impl ApertureMask {
    pub fn new(n_slits: usize, alpha: f64, beta: f64, offset: f64) -> Result<Self> {
        if n_slits == 0 {
            return Err(invalid("a mask needs at least one slit"));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid(format!("slit width must be positive, got {alpha}")));
        }
        if alpha > TAU * (1.0 + GEOMETRY_TOL) {
            return Err(invalid(format!("slit width {alpha} exceeds 2π")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(invalid(format!(
                "slit separation must be positive, got {beta}"
            )));
        }
        if alpha > beta * (1.0 + GEOMETRY_TOL) {
            return Err(invalid(format!(
                "slit width {alpha} exceeds separation {beta}; slits would overlap"
            )));
        }
        if n_slits as f64 * beta > TAU * (1.0 + GEOMETRY_TOL) {
            return Err(invalid(format!(
                "{n_slits} slits with separation {beta} do not fit on the circle"
            )));
        }
        if !offset.is_finite() {
            return Err(invalid("mask offset must be finite"));
        }
        Ok(Self {
            n_slits,
            alpha: alpha.min(TAU),
            beta,
            offset,
        })
    }

    /// One slit of width `alpha` centered at 0.
    pub fn single(alpha: f64) -> Result<Self> {
        Self::new(1, alpha, TAU, 0.0)
    }

    /// `n_slits` slits evenly spaced around the circle (`beta = 2π / N`).
    pub fn tiled(n_slits: usize, alpha: f64) -> Result<Self> {
        if n_slits == 0 {
            return Err(invalid("a mask needs at least one slit"));
        }
        Self::new(n_slits, alpha, TAU / n_slits as f64, 0.0)
    }

    pub fn with_offset(self, offset: f64) -> Result<Self> {
        Self::new(self.n_slits, self.alpha, self.beta, offset)
    }

    pub fn n_slits(&self) -> usize {
        self.n_slits
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn slits(&self) -> impl Iterator<Item = SlitIndex> {
        SlitIndex::grid(self.n_slits)
    }

    pub fn has_slit(&self, k: SlitIndex) -> bool {
        k.on_grid(self.n_slits)
    }

    fn check_slit(&self, k: SlitIndex) -> Result<()> {
        if self.has_slit(k) {
            Ok(())
        } else {
            Err(invalid(format!(
                "slit {k} is not on the centered grid of a {}-slit mask",
                self.n_slits
            )))
        }
    }

    pub fn slit_center(&self, k: SlitIndex) -> Result<f64> {
        self.check_slit(k)?;
        Ok(self.center_unchecked(k))
    }

    #[inline]
    pub(crate) fn center_unchecked(&self, k: SlitIndex) -> f64 {
        self.offset + k.value() * self.beta
    }

    pub fn slit_support(&self, k: SlitIndex) -> Result<Wedge> {
        Ok(Wedge::new(self.slit_center(k)?, self.alpha))
    }

    /// Transmission `A_k(φ)` of slit `k`: true inside the closed slit arc.
    pub fn transmission(&self, k: SlitIndex, phi: f64) -> Result<bool> {
        if !phi.is_finite() {
            return Err(invalid("angle must be finite"));
        }
        Ok(self.slit_support(k)?.contains(wrap_angle(phi)))
    }

    /// True if any slit transmits at `phi`.
    pub fn is_open(&self, phi: f64) -> bool {
        self.slits()
            .any(|k| Wedge::new(self.center_unchecked(k), self.alpha).contains(phi))
    }
}

/// Truncated OAM expansion of the state diffracted by one slit.
///
/// `coeffs[i]` is the amplitude of `|l' = i - L>` for `L = truncation`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    base_l: OamIndex,
    slit: SlitIndex,
    truncation: usize,
    coeffs: Vec<Complex64>,
    normalized: bool,
}

impl ModeVector {
    pub fn base_l(&self) -> OamIndex {
        self.base_l
    }

    pub fn slit(&self) -> SlitIndex {
        self.slit
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn label(&self) -> ModeLabel {
        ModeLabel {
            l: self.base_l,
            slit: self.slit,
        }
    }

    /// Amplitude on `|l>`, or `None` outside the truncated range.
    pub fn coeff(&self, l: OamIndex) -> Option<Complex64> {
        let idx = l + self.truncation as i64;
        (0..self.coeffs.len() as i64)
            .contains(&idx)
            .then(|| self.coeffs[idx as usize])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<self|other>`, summed in ascending `l'`.
    pub fn inner(&self, other: &ModeVector) -> Result<Complex64> {
        if self.truncation != other.truncation {
            return Err(invalid(format!(
                "mismatched truncation bounds {} and {}",
                self.truncation, other.truncation
            )));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Rescale to unit norm.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0) {
            return Err(invalid("cannot normalize a zero mode"));
        }
        for c in &mut self.coeffs {
            *c /= norm;
        }
        self.normalized = true;
        Ok(self)
    }
}

/// State diffracted from `|l>` by slit `k`, truncated to `|l'| <= truncation`.
pub fn diffracted_mode(
    mask: &ApertureMask,
    k: SlitIndex,
    l: OamIndex,
    truncation: usize,
    normalize: bool,
) -> Result<ModeVector> {
    let center = mask.slit_center(k)?;
    let bound = truncation as i64;
    if l.abs() > bound {
        return Err(invalid(format!(
            "OAM index {l} outside truncation bound {truncation}"
        )));
    }
    let alpha = mask.alpha();
    let prefactor = alpha / TAU;
    let coeffs = (-bound..=bound)
        .map(|lp| {
            let x = (lp - l) as f64;
            let (s, c) = (x * center).sin_cos();
            Complex64::new(c, -s) * (prefactor * sinc_unchecked(alpha * x / 2.0))
        })
        .collect();
    let mode = ModeVector {
        base_l: l,
        slit: k,
        truncation,
        coeffs,
        normalized: false,
    };
    if normalize {
        mode.normalize()
    } else {
        Ok(mode)
    }
}

/// `<ψ_m^j | ψ_l^k>` for two slits of the same mask, as the truncated single sum
/// over `l'` of the unnormalized expansion coefficients.
pub fn mode_overlap_general(
    mask: &ApertureMask,
    j: SlitIndex,
    m: OamIndex,
    k: SlitIndex,
    l: OamIndex,
    truncation: usize,
) -> Result<Complex64> {
    let cj = mask.slit_center(j)?;
    let ck = mask.slit_center(k)?;
    let bound = truncation as i64;
    if m.abs() > bound || l.abs() > bound {
        return Err(invalid(format!(
            "OAM indices ({m}, {l}) outside truncation bound {truncation}"
        )));
    }
    let alpha = mask.alpha();
    let prefactor = (alpha / TAU).powi(2);
    let mut acc = Complex64::new(0.0, 0.0);
    for lp in -bound..=bound {
        let xm = (lp - m) as f64;
        let xl = (lp - l) as f64;
        let (sj, cj_) = (xm * cj).sin_cos();
        let (sk, ck_) = (xl * ck).sin_cos();
        let bra = Complex64::new(cj_, sj) * sinc_unchecked(alpha * xm / 2.0);
        let ket = Complex64::new(ck_, -sk) * sinc_unchecked(alpha * xl / 2.0);
        acc += bra * ket;
    }
    Ok(acc * prefactor)
}

/// Closed-form overlap `sinc((l - m) α / 2)` of two normalized modes diffracted
/// by the same single slit centered at 0.
pub fn single_aperture_overlap_closed(l: OamIndex, m: OamIndex, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= TAU * (1.0 + GEOMETRY_TOL)) {
        return Err(invalid(format!("aperture {alpha} outside (0, 2π]")));
    }
    Ok(sinc_unchecked((l - m) as f64 * alpha / 2.0))
}

/// OAM labels `-n..=n` of a `D = 2n + 1` dimensional input state.
pub fn oam_range(n: usize) -> Vec<OamIndex> {
    let n = n as i64;
    (-n..=n).collect()
}

/// Identifies a diffracted mode: input OAM and slit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLabel {
    pub l: OamIndex,
    pub slit: SlitIndex,
}

impl ModeLabel {
    pub fn new(l: OamIndex, slit: SlitIndex) -> Self {
        Self { l, slit }
    }
}

/// Gram matrix `b[i][j] = <ψ_i|ψ_j>` of a family of diffracted modes.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    entries: DMatrix<Complex64>,
    labels: Vec<ModeLabel>,
}

impl OverlapMatrix {
    pub fn new(entries: DMatrix<Complex64>, labels: Vec<ModeLabel>) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(invalid(format!(
                "overlap matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if labels.len() != entries.nrows() {
            return Err(invalid("one label per mode required"));
        }
        if entries
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(invalid("overlap matrix has non-finite entries"));
        }
        Ok(Self { entries, labels })
    }

    pub fn from_real(entries: DMatrix<f64>, labels: Vec<ModeLabel>) -> Result<Self> {
        Self::new(entries.map(|x| Complex64::new(x, 0.0)), labels)
    }

    pub fn identity(labels: Vec<ModeLabel>) -> Self {
        let n = labels.len();
        Self {
            entries: DMatrix::identity(n, n),
            labels,
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    /// Largest `|b_ij - conj(b_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Largest imaginary part of any entry.
    pub fn max_imaginary(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Rescale to unit diagonal, i.e. the Gram matrix of the normalized modes.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.dim();
        let scale: Vec<f64> = (0..n).map(|i| self.get(i, i).re).collect();
        if let Some(bad) = scale.iter().find(|&&d| !(d > 0.0)) {
            return Err(invalid(format!("mode with non-positive norm {bad}")));
        }
        let inv: Vec<f64> = scale.iter().map(|d| d.sqrt().recip()).collect();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                self.get(i, j) * (inv[i] * inv[j])
            }
        });
        Ok(Self {
            entries,
            labels: self.labels.clone(),
        })
    }
}

/// Gram matrix of a list of truncated modes. Only the upper triangle is summed;
/// the lower one is its conjugate, so the result is exactly Hermitian.
pub fn overlap_matrix(modes: &[ModeVector]) -> Result<OverlapMatrix> {
    let first = modes
        .first()
        .ok_or_else(|| invalid("overlap matrix of an empty mode list"))?;
    if modes.iter().any(|m| m.normalized != first.normalized) {
        return Err(invalid("modes mix normalized and unnormalized conventions"));
    }
    let n = modes.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        entries[(i, i)] = Complex64::new(modes[i].norm_sqr(), 0.0);
        for j in i + 1..n {
            let z = modes[i].inner(&modes[j])?;
            entries[(i, j)] = z;
            entries[(j, i)] = z.conj();
        }
    }
    OverlapMatrix::new(entries, modes.iter().map(ModeVector::label).collect())
}

/// Closed-form Gram matrix of the normalized modes `ψ_l`, `l ∈ ls`, diffracted by
/// one slit of width `alpha` centered at 0.
pub fn single_aperture_overlaps(alpha: f64, ls: &[OamIndex]) -> Result<OverlapMatrix> {
    if ls.is_empty() {
        return Err(invalid("no OAM labels"));
    }
    let n = ls.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = single_aperture_overlap_closed(ls[i], ls[j], alpha)?;
        }
    }
    let labels = ls
        .iter()
        .map(|&l| ModeLabel::new(l, SlitIndex::CENTER))
        .collect();
    OverlapMatrix::from_real(entries, labels)
}

/// Normalized Gram matrix of the truncated single-slit modes `ψ_l`, `l ∈ ls`
/// (the mode-sum counterpart of [`single_aperture_overlaps`]).
pub fn truncated_single_aperture_overlaps(
    mask: &ApertureMask,
    ls: &[OamIndex],
    truncation: usize,
) -> Result<OverlapMatrix> {
    if mask.n_slits() != 1 {
        return Err(invalid("single-aperture overlaps need a one-slit mask"));
    }
    let modes = ls
        .iter()
        .map(|&l| diffracted_mode(mask, SlitIndex::CENTER, l, truncation, false))
        .collect::<Result<Vec<_>>>()?;
    overlap_matrix(&modes)?.normalized()
}

/// Default truncation: `max|l| + ceil(2000 / α)`.
pub fn default_truncation(max_abs_l: OamIndex, alpha: f64) -> usize {
    max_abs_l.unsigned_abs() as usize + (2000.0 / alpha).ceil() as usize
}
