//! Normalization, reduced density matrix, purity and concurrence of diffracted
//! biphoton pure states.
//!
//! The states considered here are `|ψ> ∝ Σ_l c_l |ψ_l>|ψ_{-l}>` where the diffracted
//! modes `|ψ_l>` are generally not orthogonal; everything is expressed through
//! the overlap matrix `b_{lk} = <ψ_l|ψ_k>`. Vectors and overlap matrices are indexed
//! by position `i = l + N` over the symmetric range `l ∈ [-N, N]`, so the label
//! `-l` sits at position `D - 1 - i`.
//!
//! Two independent routes are provided: the closed contractions over `b`
//! ([`purity`], [`purity_symmetric`]) and [`schmidt_oracle`], which orthonormalizes
//! each side through its Gram matrix and reads the Schmidt spectrum off an SVD.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::optics::OverlapMatrix;

/// Purity may overshoot 1 by this much from rounding before it is an error.
pub const PURITY_SLACK: f64 = 1e-9;

/// Gram eigenvalues below this fraction of the largest diagonal entry are deflated.
pub const GRAM_EIGEN_FLOOR: f64 = 1e-12;

/// Coefficient matrix of a biphoton pure state over (signal mode) x (idler mode).
///
/// The basis the rows and columns refer to is not stored: it is whatever the
/// accompanying overlap matrices describe (orthonormal OAM states, or a family
/// of diffracted modes).
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonState {
    coeffs: DMatrix<Complex64>,
    input_coeffs: Option<Vec<Complex64>>,
    normalized: bool,
}

impl BiphotonState {
    pub fn new(coeffs: DMatrix<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("empty coefficient matrix"));
        }
        if coeffs
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(invalid("non-finite coefficients"));
        }
        Ok(Self {
            coeffs,
            input_coeffs: None,
            normalized: false,
        })
    }

    /// `Σ_l c_l |ψ_l>|ψ_{-l}>` over the mode family `ψ_{-N}, ..., ψ_N` used on
    /// both sides: entry `(i, D-1-i)` holds `c_i`.
    pub fn from_schmidt_weights(c: &[Complex64]) -> Result<Self> {
        check_input_coeffs(c)?;
        let d = c.len();
        let mut coeffs = DMatrix::zeros(d, d);
        for (i, &ci) in c.iter().enumerate() {
            coeffs[(i, d - 1 - i)] = ci;
        }
        Ok(Self {
            coeffs,
            input_coeffs: Some(c.to_vec()),
            normalized: false,
        })
    }

    pub fn coeffs(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    pub fn input_coeffs(&self) -> Option<&[Complex64]> {
        self.input_coeffs.as_deref()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scale to unit Frobenius norm (unit state norm when the basis is orthonormal).
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.frobenius_norm();
        if !(norm > 0.0) {
            return Err(Error::DegenerateState("all coefficients vanish".into()));
        }
        self.coeffs /= Complex64::new(norm, 0.0);
        self.normalized = true;
        Ok(self)
    }

    /// Swap the roles of signal and idler.
    pub fn transposed(&self) -> Self {
        Self {
            coeffs: self.coeffs.transpose(),
            input_coeffs: self.input_coeffs.clone(),
            normalized: self.normalized,
        }
    }
}

/// Uniform input weights `c_l = 1/sqrt(D)`.
pub fn uniform_coeffs(d: usize) -> Vec<Complex64> {
    vec![Complex64::new((d as f64).sqrt().recip(), 0.0); d]
}

fn check_input_coeffs(c: &[Complex64]) -> Result<()> {
    if c.is_empty() || c.len().is_multiple_of(2) {
        return Err(invalid(format!(
            "input coefficients must span l = -N..N (odd length), got {}",
            c.len()
        )));
    }
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "input coefficients have norm² {norm}, expected 1"
        )));
    }
    Ok(())
}

/// Checks that `b` matches `c` in size and that its labels are symmetric under
/// `l -> -l` (so the reflected position `D-1-i` really is `-l`).
fn check_pairing(c: &[Complex64], b: &OverlapMatrix) -> Result<usize> {
    let d = c.len();
    if b.dim() != d {
        return Err(invalid(format!(
            "{} coefficients but a {}x{} overlap matrix",
            d,
            b.dim(),
            b.dim()
        )));
    }
    let labels = b.labels();
    if (0..d).any(|i| labels[i].l != -labels[d - 1 - i].l) {
        return Err(invalid("overlap labels are not symmetric under l -> -l"));
    }
    Ok(d)
}

/// Renormalization `𝒩 = Σ_{l,k} c*_l c_k b_{lk} b_{-l,-k}`, i.e. `<ψ|ψ>` of the
/// unnormalized diffracted state.
pub fn normalization_constant(c: &[Complex64], b: &OverlapMatrix) -> Result<f64> {
    let d = check_pairing(c, b)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..d {
        for k in 0..d {
            acc += c[l].conj() * c[k] * b.get(l, k) * b.get(d - 1 - l, d - 1 - k);
        }
    }
    if acc.im.abs() > 1e-10 || !(acc.re > 0.0) {
        return Err(Error::NumericalDegeneracy(format!(
            "normalization constant {acc} is not real and positive"
        )));
    }
    Ok(acc.re)
}

/// Reduced density matrix of the signal photon in the (non-orthogonal) basis
/// `{|ψ_l>}`: `ρ = Σ_{lk} ρ_{lk} |ψ_l><ψ_k|` with `ρ_{lk} = c̃_l c̃*_k b_{-k,-l}`.
///
/// For real coefficients and a real symmetric `b` this equals `c̃*_l c̃_k b_{-l,-k}`.
pub fn reduced_density(c: &[Complex64], b: &OverlapMatrix) -> Result<DMatrix<Complex64>> {
    let norm = normalization_constant(c, b)?;
    let d = c.len();
    Ok(DMatrix::from_fn(d, d, |l, k| {
        c[l] * c[k].conj() * b.get(d - 1 - k, d - 1 - l) / norm
    }))
}

/// `Tr ρ` in the physical sense, `Σ_{lk} ρ_{lk} <ψ_k|ψ_l>`.
pub fn physical_trace(rho: &DMatrix<Complex64>, b: &OverlapMatrix) -> Complex64 {
    let d = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..d {
        for k in 0..d {
            acc += rho[(l, k)] * b.get(k, l);
        }
    }
    acc
}

/// Purity `Tr ρ²` as the quadruple sum
/// `Σ_{lkpq} c̃*_l c̃_k c̃*_p c̃_q b_{-l,-k} b_{-p,-q} b_{pk} b_{lq}`. O(D⁴).
pub fn purity(c: &[Complex64], b: &OverlapMatrix) -> Result<f64> {
    let norm = normalization_constant(c, b)?;
    let d = c.len();
    let r = |i: usize| d - 1 - i;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..d {
        for k in 0..d {
            let outer = c[l].conj() * c[k] * b.get(r(l), r(k));
            for p in 0..d {
                let mid = outer * c[p].conj() * b.get(p, k);
                for q in 0..d {
                    acc += mid * c[q] * b.get(r(p), r(q)) * b.get(l, q);
                }
            }
        }
    }
    let value = acc.re / (norm * norm);
    check_purity_range(value)?;
    Ok(value)
}

fn check_purity_range(value: f64) -> Result<()> {
    if !(-PURITY_SLACK..=1.0 + PURITY_SLACK).contains(&value) {
        return Err(Error::TruncationInsufficient(format!(
            "purity {value} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Purity for uniform input weights when `b` is real symmetric and
/// `b_{lk} = b_{-l,-k}`: `Σ b_{lk} b_{pq} b_{lp} b_{kq} / (Σ b_{lk}²)²`.
pub fn purity_symmetric(b: &OverlapMatrix, d: usize) -> Result<f64> {
    if b.dim() != d {
        return Err(invalid(format!(
            "dimension {d} does not match a {}-mode overlap matrix",
            b.dim()
        )));
    }
    const TOL: f64 = 1e-12;
    if b.max_imaginary() > TOL {
        return Err(invalid("symmetric purity needs a real overlap matrix"));
    }
    let re = b.entries().map(|z| z.re);
    for l in 0..d {
        for k in 0..d {
            if (re[(l, k)] - re[(k, l)]).abs() > TOL
                || (re[(l, k)] - re[(d - 1 - l, d - 1 - k)]).abs() > TOL
            {
                return Err(invalid(format!(
                    "overlap matrix violates b_lk = b_kl = b_-l-k at ({l}, {k})"
                )));
            }
        }
    }
    let mut num = 0.0;
    for l in 0..d {
        for k in 0..d {
            for p in 0..d {
                let blkp = re[(l, k)] * re[(l, p)];
                for q in 0..d {
                    num += blkp * re[(p, q)] * re[(k, q)];
                }
            }
        }
    }
    let den: f64 = re.iter().map(|x| x * x).sum();
    let value = num / (den * den);
    check_purity_range(value)?;
    Ok(value)
}

/// Pure-state concurrence `sqrt(2 (1 - Tr ρ²))`.
pub fn concurrence(purity: f64) -> Result<f64> {
    if !(-PURITY_SLACK..=1.0 + PURITY_SLACK).contains(&purity) {
        return Err(invalid(format!("purity {purity} outside [0, 1]")));
    }
    Ok((2.0 * (1.0 - purity.clamp(0.0, 1.0))).sqrt())
}

/// Concurrence rescaled so a maximally entangled rank-`d` state reads 1.
/// Presentation only; nothing in the crate consumes it.
pub fn rescaled_concurrence(concurrence: f64, d: usize) -> f64 {
    if d < 2 {
        return concurrence;
    }
    concurrence * (d as f64 / (2.0 * (d as f64 - 1.0))).sqrt()
}

/// Largest concurrence attainable with Schmidt rank `d`: `sqrt(2 (d-1)/d)`.
pub fn max_concurrence(d: usize) -> f64 {
    (2.0 * (d as f64 - 1.0) / d as f64).sqrt()
}

/// Entanglement summary of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub purity: f64,
    pub concurrence: f64,
    /// Schmidt probabilities, descending, summing to 1.
    pub schmidt_spectrum: Vec<f64>,
    pub truncation_used: usize,
    pub converged: bool,
    /// Modes dropped because their Gram eigenvalue fell below the floor.
    pub deflated_modes: usize,
}

impl EntanglementReport {
    /// Build a report from unnormalized, nonnegative Schmidt weights.
    ///
    /// `1 - Tr ρ²` is accumulated as `Σ_i λ_i Σ_{j≠i} λ_j` rather than by
    /// subtracting from 1, so nearly-product states keep their small concurrence.
    pub fn from_weights(weights: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut w: Vec<f64> = weights.into_iter().map(|x| x.max(0.0)).collect();
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalDegeneracy(
                "non-finite Schmidt weight".into(),
            ));
        }
        w.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateState("state has zero norm".into()));
        }
        let mut mixedness = 0.0;
        for (i, wi) in w.iter().enumerate() {
            let rest: f64 = w
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, wj)| wj)
                .sum();
            mixedness += wi * rest;
        }
        mixedness /= total * total;
        let purity = 1.0 - mixedness;
        Ok(Self {
            purity,
            concurrence: concurrence(purity)?,
            schmidt_spectrum: w.iter().map(|x| x / total).collect(),
            truncation_used: 0,
            converged: true,
            deflated_modes: 0,
        })
    }

    /// Number of Schmidt probabilities above `tol`.
    pub fn schmidt_rank(&self, tol: f64) -> usize {
        self.schmidt_spectrum.iter().filter(|&&p| p > tol).count()
    }

    /// Schmidt rank counting probabilities above 1e-10.
    pub fn effective_rank(&self) -> usize {
        self.schmidt_rank(1e-10)
    }
}

/// Factor a Gram matrix as `G = X† X` with `X = Λ^{1/2} V†` restricted to the
/// eigenvalues above the floor. Returns `X` (rank x n) and the number of
/// deflated directions.
fn gram_factor(g: &OverlapMatrix) -> Result<(DMatrix<Complex64>, usize)> {
    let n = g.dim();
    let h = (g.entries() + g.entries().adjoint()) * Complex64::new(0.5, 0.0);
    let scale = (0..n).map(|i| h[(i, i)].re).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::NumericalDegeneracy(
            "Gram matrix has no positive diagonal".into(),
        ));
    }
    let eig = h.symmetric_eigen();
    let floor = GRAM_EIGEN_FLOOR * scale;
    let kept: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > floor).collect();
    let mut x = DMatrix::zeros(kept.len(), n);
    for (row, &i) in kept.iter().enumerate() {
        let s = eig.eigenvalues[i].sqrt();
        for col in 0..n {
            x[(row, col)] = eig.eigenvectors[(col, i)].conj() * s;
        }
    }
    Ok((x, n - kept.len()))
}

/// Schmidt spectrum of `Σ_{ab} W_ab |s_a>|i_b>` given the Gram matrices of the
/// (possibly non-orthogonal) signal and idler modes.
///
/// Each side is orthonormalized through its Gram matrix, `W` is carried into
/// the orthonormal bases as `X_s W X_iᵀ`, and the squared singular values of the
/// result are the (unnormalized) Schmidt weights. Near-singular Gram directions
/// are deflated and counted in `deflated_modes` instead of failing.
pub fn schmidt_oracle(
    state: &BiphotonState,
    b_signal: &OverlapMatrix,
    b_idler: &OverlapMatrix,
) -> Result<EntanglementReport> {
    let w = state.coeffs();
    if w.nrows() != b_signal.dim() || w.ncols() != b_idler.dim() {
        return Err(invalid(format!(
            "{}x{} coefficients with {} signal and {} idler modes",
            w.nrows(),
            w.ncols(),
            b_signal.dim(),
            b_idler.dim()
        )));
    }
    let (xs, ds) = gram_factor(b_signal)?;
    let (xi, di) = gram_factor(b_idler)?;
    if xs.nrows() == 0 || xi.nrows() == 0 {
        return Err(Error::DegenerateState("every mode was deflated".into()));
    }
    let t = &xs * w * xi.transpose();
    let sv = t.svd(false, false).singular_values;
    let mut report = EntanglementReport::from_weights(sv.iter().map(|s| s * s))?;
    report.deflated_modes = ds + di;
    Ok(report)
}
