//! Path-entangled biphotons from `N x M` angular slit masks.
//!
//! Both photons start in the OAM product state `|l0>_s |-l0>_i`. Behind the masks
//! the state is
//!
//! ```text
//! |ψ'> = Σ_{k,k'} w_{kk'} |ψ^k_{l0}>_s |ψ^{k'}_{-l0}>_i
//! ```
//!
//! where `|ψ^k_l>` is the state diffracted by slit `k` and the weights `w` come from
//! a [`CorrelationModel`]. Expanded in OAM this gives the coefficient matrix
//! `c_{l',l''}` ([`path_coefficients`]); for entanglement the compact form above is
//! used directly with the Gram matrices of the slit modes ([`path_report`]), which
//! keeps the cost independent of the OAM truncation apart from one streaming sum.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::entanglement::{schmidt_oracle, BiphotonState, EntanglementReport};
use crate::error::{invalid, Error, Result};
use crate::optics::{sinc_unchecked, ApertureMask, ModeLabel, OamIndex, OverlapMatrix, SlitIndex};
use crate::phase::PhaseWalker;
use crate::quadrature::exp_integral;

/// Concurrence change under truncation doubling above which a point is flagged.
pub const TRUNCATION_TOL: f64 = 5e-4;

/// Default truncation margin numerator: `K = ceil(TRUNCATION_SCALE / α)`.
pub const TRUNCATION_SCALE: f64 = 2000.0;

/// Largest side of a dense OAM coefficient matrix [`path_coefficients`] will build.
pub const MAX_DENSE_SIDE: usize = 2049;

const GEOMETRY_TOL: f64 = 1e-12;

/// How the biphoton amplitude weights the slit pairs `(k, k')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationModel {
    /// Every pair weighted equally: the literal constant-amplitude expansion.
    /// The state factorizes, so it is never entangled.
    Constant,
    /// Weight proportional to the angular overlap of signal slit `k` and idler slit `k'`.
    Overlap,
    /// Only equal slit labels contribute (requires `N = M`).
    Diagonal,
}

impl CorrelationModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::Overlap => "overlap",
            Self::Diagonal => "diagonal",
        }
    }
}

impl fmt::Display for CorrelationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorrelationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Self::Constant),
            "overlap" => Ok(Self::Overlap),
            "diagonal" => Ok(Self::Diagonal),
            other => Err(invalid(format!(
                "unknown correlation model `{other}` (expected constant, overlap or diagonal)"
            ))),
        }
    }
}

/// Geometry and input state of a path-entanglement configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub n_signal: usize,
    pub n_idler: usize,
    pub alpha: f64,
    pub beta_signal: f64,
    pub beta_idler: f64,
    pub l0: OamIndex,
    pub model: CorrelationModel,
    /// Overrides the OAM truncation bound `L`; the default is `|l0| + ceil(2000/α)`.
    pub truncation: Option<usize>,
}

impl PathConfig {
    /// Evenly tiled masks (`β = 2π/N`, `2π/M`), `l0 = 0`, overlap weights.
    pub fn new(n_signal: usize, n_idler: usize, alpha: f64) -> Self {
        Self {
            n_signal,
            n_idler,
            alpha,
            beta_signal: TAU / n_signal.max(1) as f64,
            beta_idler: TAU / n_idler.max(1) as f64,
            l0: 0,
            model: CorrelationModel::Overlap,
            truncation: None,
        }
    }

    pub fn with_l0(mut self, l0: OamIndex) -> Self {
        self.l0 = l0;
        self
    }

    pub fn with_model(mut self, model: CorrelationModel) -> Self {
        self.model = model;
        self
    }

    pub fn with_truncation(mut self, truncation: Option<usize>) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_betas(mut self, beta_signal: f64, beta_idler: f64) -> Self {
        self.beta_signal = beta_signal;
        self.beta_idler = beta_idler;
        self
    }

    /// Same configuration with the roles of the two photons exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            n_signal: self.n_idler,
            n_idler: self.n_signal,
            beta_signal: self.beta_idler,
            beta_idler: self.beta_signal,
            l0: -self.l0,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_signal == 0 || self.n_idler == 0 {
            return Err(invalid("slit counts must be positive"));
        }
        let bound = (TAU / self.n_signal as f64).min(TAU / self.n_idler as f64);
        if !(self.alpha > 0.0) || self.alpha > bound * (1.0 + GEOMETRY_TOL) {
            return Err(invalid(format!(
                "slit width {} outside (0, {bound}] for {}x{} slits",
                self.alpha, self.n_signal, self.n_idler
            )));
        }
        if self.model == CorrelationModel::Diagonal && self.n_signal != self.n_idler {
            return Err(invalid("the diagonal correlation model needs N = M"));
        }
        if let Some(t) = self.truncation {
            if t as u64 <= self.l0.unsigned_abs() {
                return Err(invalid(format!(
                    "truncation {t} leaves no margin around l0 = {}",
                    self.l0
                )));
            }
        }
        ApertureMask::new(self.n_signal, self.alpha, self.beta_signal, 0.0)?;
        ApertureMask::new(self.n_idler, self.alpha, self.beta_idler, 0.0)?;
        Ok(())
    }

    /// Half-width `K` of the OAM windows `l0 ± K` (signal) and `-l0 ± K` (idler).
    pub fn margin(&self) -> usize {
        match self.truncation {
            Some(t) => t - self.l0.unsigned_abs() as usize,
            None => (TRUNCATION_SCALE / self.alpha).ceil() as usize,
        }
    }

    /// Symmetric bound `L = |l0| + K` enclosing both windows.
    pub fn truncation_bound(&self) -> usize {
        self.l0.unsigned_abs() as usize + self.margin()
    }
}

/// Signal and idler masks of a configuration, both centered on the origin.
pub fn build_masks(config: &PathConfig) -> Result<(ApertureMask, ApertureMask)> {
    config.validate()?;
    Ok((
        ApertureMask::new(config.n_signal, config.alpha, config.beta_signal, 0.0)?,
        ApertureMask::new(config.n_idler, config.alpha, config.beta_idler, 0.0)?,
    ))
}

/// Amplitude weights `w_{kk'}` over (signal slit) x (idler slit), rows and
/// columns in ascending slit order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationWeights {
    weights: DMatrix<Complex64>,
}

impl CorrelationWeights {
    pub fn new(weights: DMatrix<Complex64>) -> Self {
        Self { weights }
    }

    /// Weights of `config.model` for the masks of `config`.
    pub fn for_config(config: &PathConfig) -> Result<Self> {
        let (signal, idler) = build_masks(config)?;
        let (n, m) = (config.n_signal, config.n_idler);
        let weights = match config.model {
            CorrelationModel::Constant => DMatrix::from_element(n, m, Complex64::new(1.0, 0.0)),
            CorrelationModel::Diagonal => DMatrix::identity(n, m),
            CorrelationModel::Overlap => {
                let ks: Vec<SlitIndex> = signal.slits().collect();
                let kis: Vec<SlitIndex> = idler.slits().collect();
                let mut w = DMatrix::zeros(n, m);
                for (a, &k) in ks.iter().enumerate() {
                    let sa = signal.slit_support(k)?;
                    for (b, &ki) in kis.iter().enumerate() {
                        let len = sa.intersection_length(&idler.slit_support(ki)?);
                        w[(a, b)] = Complex64::new(len / config.alpha, 0.0);
                    }
                }
                w
            }
        };
        Ok(Self { weights })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }
}

/// OAM windows `(signal, idler)` of the coefficient matrix from
/// [`path_coefficients`]: row `i` is signal OAM `signal.start() + i`, column `j` is
/// idler OAM `idler.start() + j`. The windows are `l0 ± K` and `-l0 ± K`, so
/// shifting `l0` shifts the matrix rigidly.
pub fn coefficient_windows(
    config: &PathConfig,
) -> (RangeInclusive<OamIndex>, RangeInclusive<OamIndex>) {
    let k = config.margin() as OamIndex;
    (
        config.l0 - k..=config.l0 + k,
        -config.l0 - k..=-config.l0 + k,
    )
}

/// Expansion coefficients `<l_in + x|ψ^k_{l_in}>` of each slit for `x = -K..=K`.
fn slit_mode_columns(mask: &ApertureMask, margin: usize) -> DMatrix<Complex64> {
    let k = margin as i64;
    let alpha = mask.alpha();
    let slits: Vec<SlitIndex> = mask.slits().collect();
    DMatrix::from_fn(2 * margin + 1, slits.len(), |row, col| {
        let x = (row as i64 - k) as f64;
        let center = mask.center_unchecked(slits[col]);
        let (s, c) = (x * center).sin_cos();
        Complex64::new(c, -s) * (alpha / TAU * sinc_unchecked(alpha * x / 2.0))
    })
}

/// Dense, globally normalized OAM coefficients
/// `c_{l',l''} ∝ Σ_{kk'} w_{kk'} <l'|ψ^k_{l0}> <l''|ψ^{k'}_{-l0}>`.
pub fn path_coefficients(
    config: &PathConfig,
    weights: &CorrelationWeights,
) -> Result<BiphotonState> {
    let (signal, idler) = build_masks(config)?;
    let w = weights.matrix();
    if w.shape() != (config.n_signal, config.n_idler) {
        return Err(invalid(format!(
            "weights are {:?} for {}x{} slits",
            w.shape(),
            config.n_signal,
            config.n_idler
        )));
    }
    if weights.is_zero() {
        return Err(Error::DegenerateState("correlation weights vanish".into()));
    }
    let margin = config.margin();
    if 2 * margin + 1 > MAX_DENSE_SIDE {
        return Err(invalid(format!(
            "dense coefficient matrix with margin {margin} is too large; \
             pass a smaller truncation or use path_report"
        )));
    }
    let u = slit_mode_columns(&signal, margin);
    let v = slit_mode_columns(&idler, margin);
    let coeffs = u * w * v.transpose();
    BiphotonState::new(coeffs)?.normalized()
}

/// `Σ_{k,k'} ∫ exp(i (m - l) φ) A_k(φ) A_{k'}(φ) dφ` over the product of the
/// signal and idler masks, from closed-form interval integrals.
pub fn generalized_overlap(
    mask_s: &ApertureMask,
    mask_i: &ApertureMask,
    l: OamIndex,
    m: OamIndex,
) -> Complex64 {
    let dl = (m - l) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in mask_s.slits() {
        let sk = mask_s.slit_support(k).expect("own slit");
        for ki in mask_i.slits() {
            let si = mask_i.slit_support(ki).expect("own slit");
            for (lo, hi) in sk.intersection(&si) {
                acc += exp_integral(lo, hi, dl);
            }
        }
    }
    acc
}

/// `g_d = Σ_{|x| <= K} cos(x d β) sinc²(α x / 2)` for `d = 0..n`, evaluated at
/// both `K = margin` and `K = 2 margin` in one pass.
///
/// The slit modes of one mask share `|sinc|` and differ only by the phase
/// `exp(-i x c_k)`, so their Gram matrix is the Toeplitz matrix `g_{|k-k'|}`
/// up to the factor `(α/2π)²`.
fn toeplitz_sums(alpha: f64, beta: f64, n: usize, margin: usize) -> (Vec<f64>, Vec<f64>) {
    let mut acc = vec![1.0; n];
    let mut at_margin = acc.clone();
    let mut half = PhaseWalker::new(alpha / 2.0);
    let mut slit = PhaseWalker::new(beta);
    half.advance();
    slit.advance();
    for x in 1..=2 * margin {
        let arg = alpha * x as f64 / 2.0;
        let s = half.value().im / arg;
        let s2 = 2.0 * s * s;
        acc[0] += s2;
        let step = slit.value();
        let mut p = Complex64::new(1.0, 0.0);
        for g in acc.iter_mut().skip(1) {
            p *= step;
            *g += p.re * s2;
        }
        if x == margin {
            at_margin.copy_from_slice(&acc);
        }
        half.advance();
        slit.advance();
    }
    (at_margin, acc)
}

fn toeplitz_gram(g: &[f64], l: OamIndex) -> Result<OverlapMatrix> {
    let n = g.len();
    let entries = DMatrix::from_fn(n, n, |a, b| {
        let d = a.abs_diff(b);
        Complex64::new(if d == 0 { 1.0 } else { g[d] / g[0] }, 0.0)
    });
    let labels = SlitIndex::grid(n).map(|k| ModeLabel::new(l, k)).collect();
    OverlapMatrix::new(entries, labels)
}

/// Normalized Gram matrices of the signal and idler slit modes at truncation
/// margin `K` and `2K`.
pub struct PathGrams {
    pub signal: (OverlapMatrix, OverlapMatrix),
    pub idler: (OverlapMatrix, OverlapMatrix),
}

pub fn path_grams(config: &PathConfig) -> Result<PathGrams> {
    config.validate()?;
    let margin = config.margin();
    let gs = toeplitz_sums(config.alpha, config.beta_signal, config.n_signal, margin);
    let gi = if (config.n_idler, config.beta_idler) == (config.n_signal, config.beta_signal) {
        gs.clone()
    } else {
        toeplitz_sums(config.alpha, config.beta_idler, config.n_idler, margin)
    };
    Ok(PathGrams {
        signal: (
            toeplitz_gram(&gs.0, config.l0)?,
            toeplitz_gram(&gs.1, config.l0)?,
        ),
        idler: (
            toeplitz_gram(&gi.0, -config.l0)?,
            toeplitz_gram(&gi.1, -config.l0)?,
        ),
    })
}

/// Entanglement of a path state with explicit weights, via the Schmidt oracle
/// on the slit-mode Gram matrices; flagged unconverged if doubling the
/// truncation margin moves the concurrence by `TRUNCATION_TOL` or more.
pub fn path_report_with_weights(
    config: &PathConfig,
    weights: &CorrelationWeights,
) -> Result<EntanglementReport> {
    if weights.matrix().shape() != (config.n_signal, config.n_idler) {
        return Err(invalid("weights do not match the slit counts"));
    }
    if weights.is_zero() {
        return Err(Error::DegenerateState("correlation weights vanish".into()));
    }
    let grams = path_grams(config)?;
    let state = BiphotonState::new(weights.matrix().clone())?;
    let mut report = schmidt_oracle(&state, &grams.signal.0, &grams.idler.0)?;
    let finer = schmidt_oracle(&state, &grams.signal.1, &grams.idler.1)?;
    report.converged = (report.concurrence - finer.concurrence).abs() < TRUNCATION_TOL;
    report.truncation_used = config.truncation_bound();
    Ok(report)
}

/// Entanglement of the path state of `config` under its correlation model.
pub fn path_report(config: &PathConfig) -> Result<EntanglementReport> {
    let weights = CorrelationWeights::for_config(config)?;
    path_report_with_weights(config, &weights)
}

/// Configuration actually used at slit width `alpha`. When `alpha` exceeds a
/// mask's separation the slits would overlap, so that mask falls back to the
/// largest slit count `n <= N` with `alpha <= 2π/n`, evenly tiled.
pub fn effective_config(base: &PathConfig, alpha: f64) -> PathConfig {
    let reduce = |n: usize, beta: f64| -> (usize, f64) {
        if alpha <= beta * (1.0 + GEOMETRY_TOL) {
            return (n, beta);
        }
        let fit = ((TAU / alpha) * (1.0 + GEOMETRY_TOL)).floor() as usize;
        let n_eff = fit.clamp(1, n);
        (n_eff, TAU / n_eff as f64)
    };
    let (n_signal, beta_signal) = reduce(base.n_signal, base.beta_signal);
    let (n_idler, beta_idler) = reduce(base.n_idler, base.beta_idler);
    PathConfig {
        n_signal,
        n_idler,
        alpha,
        beta_signal,
        beta_idler,
        ..*base
    }
}

/// One point of a concurrence-vs-aperture curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub alpha: f64,
    /// Slit counts after capping (equal to the base counts unless slits merged).
    pub n_signal: usize,
    pub n_idler: usize,
    pub result: Result<EntanglementReport>,
}

impl CurvePoint {
    pub fn capped(&self, base: &PathConfig) -> bool {
        self.n_signal != base.n_signal || self.n_idler != base.n_idler
    }
}

/// Concurrence of the path state of `config` at each slit width in `alphas`,
/// evaluated in parallel on the current rayon pool and returned in ascending
/// `alpha` order. Widths beyond a mask's separation reduce its slit count (see
/// [`effective_config`]). Per-point failures are kept in the point.
pub fn path_concurrence_curve(config: &PathConfig, alphas: &[f64]) -> Vec<CurvePoint> {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .par_iter()
        .map(|&alpha| {
            let eff = effective_config(config, alpha);
            CurvePoint {
                alpha,
                n_signal: eff.n_signal,
                n_idler: eff.n_idler,
                result: path_report(&eff),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::max_concurrence;
    use crate::optics::{diffracted_mode, overlap_matrix};
    use std::f64::consts::PI;

    #[test]
    fn model_names_round_trip() {
        for m in [
            CorrelationModel::Constant,
            CorrelationModel::Overlap,
            CorrelationModel::Diagonal,
        ] {
            assert_eq!(m.to_string().parse::<CorrelationModel>().unwrap(), m);
        }
        assert!("gaussian".parse::<CorrelationModel>().is_err());
    }

    #[test]
    fn mask_centers() {
        let (s, _) = build_masks(&PathConfig::new(2, 2, PI / 2.0)).unwrap();
        let centers: Vec<f64> = s.slits().map(|k| s.slit_center(k).unwrap()).collect();
        assert_eq!(centers, vec![-s.beta() / 2.0, s.beta() / 2.0]);

        let (one, _) = build_masks(&PathConfig::new(1, 1, 1.0)).unwrap();
        assert_eq!(one.slit_center(SlitIndex::CENTER).unwrap(), 0.0);

        let (three, _) = build_masks(&PathConfig::new(3, 3, 1.0)).unwrap();
        let centers: Vec<f64> = three
            .slits()
            .map(|k| three.slit_center(k).unwrap())
            .collect();
        for (c, want) in centers.iter().zip([-TAU / 3.0, 0.0, TAU / 3.0]) {
            assert!((c - want).abs() < 1e-15);
        }
    }

    #[test]
    fn config_validation() {
        assert!(build_masks(&PathConfig::new(3, 5, 1.3)).is_err());
        assert!(build_masks(&PathConfig::new(3, 5, 1.2566)).is_ok());
        assert!(PathConfig::new(2, 3, 0.5)
            .with_model(CorrelationModel::Diagonal)
            .validate()
            .is_err());
        assert!(PathConfig::new(2, 2, 0.5)
            .with_l0(3)
            .with_truncation(Some(3))
            .validate()
            .is_err());
    }

    #[test]
    fn overlap_weights() {
        let cfg = PathConfig::new(3, 3, 1.0);
        let w = CorrelationWeights::for_config(&cfg).unwrap();
        assert!((w.matrix() - DMatrix::<Complex64>::identity(3, 3)).camax() < 1e-15);

        let cfg = PathConfig::new(2, 4, 1.0);
        let w = CorrelationWeights::for_config(&cfg).unwrap();
        // signal slits at ±π/2, idler at ±π/4, ±3π/4: each signal slit straddles two idler slits
        for a in 0..2 {
            for b in 0..4 {
                let x = w.matrix()[(a, b)].re;
                assert!((0.0..=1.0).contains(&x));
            }
        }
        let row: f64 = (0..4).map(|b| w.matrix()[(0, b)].re).sum();
        assert!(row <= 1.0 + 1e-15);
    }

    #[test]
    fn streaming_gram_matches_mode_vectors() {
        let cfg = PathConfig::new(4, 4, 1.2).with_truncation(Some(300));
        let grams = path_grams(&cfg).unwrap();
        let (mask, _) = build_masks(&cfg).unwrap();
        let modes: Vec<_> = mask
            .slits()
            .map(|k| diffracted_mode(&mask, k, 0, 300, false).unwrap())
            .collect();
        let direct = overlap_matrix(&modes).unwrap().normalized().unwrap();
        assert!((direct.entries() - grams.signal.0.entries()).camax() < 1e-13);
    }

    #[test]
    fn dense_and_factorized_routes_agree() {
        for (n, m, alpha, model) in [
            (2, 2, 0.9, CorrelationModel::Diagonal),
            (2, 4, 1.1, CorrelationModel::Overlap),
            (3, 5, 0.7, CorrelationModel::Overlap),
        ] {
            let cfg = PathConfig::new(n, m, alpha)
                .with_model(model)
                .with_l0(1)
                .with_truncation(Some(120));
            let w = CorrelationWeights::for_config(&cfg).unwrap();
            let dense = path_coefficients(&cfg, &w).unwrap();
            let side = dense.coeffs().nrows();
            let id = |l: OamIndex| {
                OverlapMatrix::identity(
                    (0..side)
                        .map(|_| ModeLabel::new(l, SlitIndex::CENTER))
                        .collect(),
                )
            };
            let a = schmidt_oracle(&dense, &id(1), &id(-1)).unwrap();
            let b = path_report(&cfg).unwrap();
            assert!(
                (a.purity - b.purity).abs() < 1e-10,
                "{n}x{m}: {} vs {}",
                a.purity,
                b.purity
            );
        }
    }

    #[test]
    fn constant_model_is_product() {
        let cfg = PathConfig::new(3, 4, 0.8).with_model(CorrelationModel::Constant);
        let r = path_report(&cfg).unwrap();
        assert!(r.concurrence < 1e-9);
    }

    #[test]
    fn diagonal_small_aperture_is_maximally_path_entangled() {
        for n in 2..=4 {
            let cfg = PathConfig::new(n, n, 1e-3).with_model(CorrelationModel::Diagonal);
            let r = path_report(&cfg).unwrap();
            assert!((r.concurrence - max_concurrence(n)).abs() < 2e-2);
            assert!(r.converged);
        }
    }

    #[test]
    fn generalized_overlap_examples() {
        let s = ApertureMask::single(1.1).unwrap();
        assert!((generalized_overlap(&s, &s, 2, 2) - Complex64::new(1.1, 0.0)).norm() < 1e-15);
        for (l, m) in [(0, 1), (3, -2)] {
            let want = 1.1 * sinc_unchecked((m - l) as f64 * 1.1 / 2.0);
            assert!((generalized_overlap(&s, &s, l, m) - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
        let t = s.with_offset(1.5).unwrap();
        assert_eq!(generalized_overlap(&s, &t, 0, 3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn effective_config_caps_slits() {
        let base = PathConfig::new(6, 4, 0.1);
        let e = effective_config(&base, TAU / 6.0);
        assert_eq!((e.n_signal, e.n_idler), (6, 4));
        let e = effective_config(&base, 2.0);
        assert_eq!((e.n_signal, e.n_idler), (3, 3));
        assert!(e.validate().is_ok());
        let e = effective_config(&base, TAU);
        assert_eq!((e.n_signal, e.n_idler), (1, 1));
        assert!(e.validate().is_ok());
    }

    #[test]
    fn curve_is_sorted_and_keeps_failures() {
        let cfg = PathConfig::new(2, 2, 0.5).with_model(CorrelationModel::Diagonal);
        let pts = path_concurrence_curve(&cfg, &[1.0, 0.2, 0.5]);
        let alphas: Vec<f64> = pts.iter().map(|p| p.alpha).collect();
        assert_eq!(alphas, vec![0.2, 0.5, 1.0]);
        let bad = path_concurrence_curve(&cfg, &[-1.0]);
        assert!(bad[0].result.is_err());
    }

    #[test]
    fn l0_shift_moves_the_window_rigidly() {
        let base = PathConfig::new(2, 3, 0.8).with_truncation(Some(60));
        let shifted = base.with_l0(4).with_truncation(Some(64));
        let w = CorrelationWeights::for_config(&base).unwrap();
        let a = path_coefficients(&base, &w).unwrap();
        let b = path_coefficients(&shifted, &w).unwrap();
        assert!((a.coeffs() - b.coeffs()).norm() < 1e-15);
        let (sa, ia) = coefficient_windows(&base);
        let (sb, ib) = coefficient_windows(&shifted);
        assert_eq!((sb.start() - sa.start(), ib.start() - ia.start()), (4, -4));
        let ca = path_report(&base).unwrap().concurrence;
        let cb = path_report(&shifted).unwrap().concurrence;
        assert!((ca - cb).abs() < 1e-10);
    }

    #[test]
    fn swapping_photons_transposes() {
        let cfg = PathConfig::new(2, 5, 1.0)
            .with_l0(2)
            .with_truncation(Some(50));
        let sw = cfg.swapped();
        let a = path_coefficients(&cfg, &CorrelationWeights::for_config(&cfg).unwrap()).unwrap();
        let b = path_coefficients(&sw, &CorrelationWeights::for_config(&sw).unwrap()).unwrap();
        assert!((a.coeffs().transpose() - b.coeffs()).norm() < 1e-14);
        let ca = path_report(&cfg).unwrap().concurrence;
        let cb = path_report(&sw).unwrap().concurrence;
        assert!((ca - cb).abs() < 1e-10);
    }

    #[test]
    fn zero_weights_are_degenerate() {
        let cfg = PathConfig::new(2, 2, 0.5).with_truncation(Some(20));
        let w = CorrelationWeights::new(DMatrix::zeros(2, 2));
        assert!(matches!(
            path_coefficients(&cfg, &w),
            Err(Error::DegenerateState(_))
        ));
        assert!(matches!(
            path_report_with_weights(&cfg, &w),
            Err(Error::DegenerateState(_))
        ));
    }

    #[test]
    fn bell_limit_for_two_slits() {
        let cfg = PathConfig::new(2, 2, 1e-3).with_model(CorrelationModel::Diagonal);
        let pts = path_concurrence_curve(&cfg, &[1e-3]);
        let r = pts[0].result.as_ref().unwrap();
        assert!((r.concurrence - 1.0).abs() < 1e-2);
    }

    /// Slits of one mask are disjoint, so the diagonal state is a balanced sum of
    /// `N` orthogonal product terms at every width up to full tiling; the
    /// truncation-free grid oracle confirms the value at `α = 2π/N`.
    #[test]
    fn diagonal_at_full_tiling_stays_path_entangled() {
        use crate::grid_oracle::{grid_oracle, BiphotonExpansion, ModeFunction};
        for n in 2..=4 {
            let alpha = TAU / n as f64;
            let cfg = PathConfig::new(n, n, alpha).with_model(CorrelationModel::Diagonal);
            let (ms, mi) = build_masks(&cfg).unwrap();
            let side = |m: ApertureMask, l| {
                m.slits()
                    .map(|k| ModeFunction::new(m, k, l).unwrap())
                    .collect::<Vec<_>>()
            };
            let desc = BiphotonExpansion::new(
                side(ms, 0),
                side(mi, 0),
                CorrelationWeights::for_config(&cfg)
                    .unwrap()
                    .matrix()
                    .clone(),
            )
            .unwrap();
            let grid = grid_oracle(&desc, 1 << 12).unwrap();
            let modes = path_report(&cfg).unwrap();
            assert!((grid.concurrence - max_concurrence(n)).abs() < 1e-9);
            assert!((modes.concurrence - max_concurrence(n)).abs() < 1e-5);
        }
    }
}
