use std::f64::consts::{PI, TAU};

use angular_qudit::entanglement::{max_concurrence, uniform_coeffs};
use angular_qudit::grid_oracle::BiphotonExpansion;
use angular_qudit::optics::{oam_range, single_aperture_overlaps};
use angular_qudit::quadrature::AngularGrid;
use angular_qudit::{
    concurrence, grid_oracle, normalization_constant, purity, purity_symmetric, schmidt_oracle,
    ApertureMask, BiphotonState, Complex64, OverlapMatrix,
};
use proptest::prelude::*;

fn oam_b(d: usize, alpha: f64) -> OverlapMatrix {
    single_aperture_overlaps(alpha, &oam_range(d / 2)).unwrap()
}

fn schmidt_purity(c: &[Complex64], b: &OverlapMatrix) -> f64 {
    let state = BiphotonState::from_schmidt_weights(c).unwrap();
    schmidt_oracle(&state, b, b).unwrap().purity
}

/// Quadruple sum with `b_{lk}` in place of `b_{-l,-k}`; equal to the general
/// purity whenever the overlaps are reflection symmetric.
fn purity_unreflected(c: &[Complex64], b: &OverlapMatrix) -> f64 {
    let d = c.len();
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for l in 0..d {
        for k in 0..d {
            den += c[l].conj() * c[k] * b.get(l, k) * b.get(l, k);
            for p in 0..d {
                for q in 0..d {
                    num += c[l].conj()
                        * c[k]
                        * c[p].conj()
                        * c[q]
                        * b.get(l, k)
                        * b.get(p, q)
                        * b.get(p, k)
                        * b.get(l, q);
                }
            }
        }
    }
    num.re / (den.re * den.re)
}

#[test]
fn frozen_reference_values() {
    // independent numpy evaluations of the symmetric form
    for (d, alpha, p_ref, c_ref) in [
        (3, PI, 0.6575007545636956, 0.8276463561646416),
        (5, PI, 0.4022679817114967, 1.0933727802433197),
        (7, 1.0, 0.8340082098435022, 0.576180163067938),
    ] {
        let b = oam_b(d, alpha);
        let p = purity(&uniform_coeffs(d), &b).unwrap();
        assert!((p - p_ref).abs() < 1e-13, "D={d}: {p}");
        assert!((concurrence(p).unwrap() - c_ref).abs() < 1e-12);
    }
    let n = normalization_constant(&uniform_coeffs(3), &oam_b(3, PI)).unwrap();
    assert!((n - 1.5403796460924681).abs() < 1e-13);
}

#[test]
fn normalization_constant_matches_quadrature() {
    // <ψ|ψ> of Σ_l c_l ψ_l(φ_s) ψ_{-l}(φ_i) with normalized single-slit modes
    let alpha = PI;
    let c = uniform_coeffs(3);
    let grid = AngularGrid::on_intervals(&[(-alpha / 2.0, alpha / 2.0)], 1 << 16).unwrap();
    let mut total = 0.0;
    for l in -1i64..=1 {
        for k in -1i64..=1 {
            let one =
                grid.integrate(|phi| Complex64::from_polar(1.0 / alpha, (k - l) as f64 * phi));
            let two =
                grid.integrate(|phi| Complex64::from_polar(1.0 / alpha, (l - k) as f64 * phi));
            total += (c[(l + 1) as usize].conj() * c[(k + 1) as usize] * one * two).re;
        }
    }
    let n = normalization_constant(&c, &oam_b(3, alpha)).unwrap();
    assert!((n - total).abs() < 1e-6, "{n} vs {total}");
}

#[test]
fn oam_endpoints() {
    for d in [3, 5, 7, 9, 11] {
        let c = uniform_coeffs(d);
        let full = concurrence(purity(&c, &oam_b(d, TAU)).unwrap()).unwrap();
        assert!((full - max_concurrence(d)).abs() < 1e-6);
        let tiny = concurrence(purity(&c, &oam_b(d, 1e-4)).unwrap()).unwrap();
        assert!(tiny < 1e-3);
    }
}

#[test]
fn grid_oracle_matches_mode_routes() {
    for (d, alpha) in [(3, PI), (5, PI), (7, 2.2), (5, 0.7)] {
        let c = uniform_coeffs(d);
        let analytic = concurrence(purity(&c, &oam_b(d, alpha)).unwrap()).unwrap();
        let desc = BiphotonExpansion::oam(ApertureMask::single(alpha).unwrap(), &c).unwrap();
        let grid = grid_oracle(&desc, 1 << 14).unwrap();
        assert!(
            (grid.concurrence - analytic).abs() < 1e-5,
            "D={d} α={alpha}"
        );
        assert!(grid.converged);
    }
}

#[test]
fn index_conventions_agree_for_reflection_symmetric_overlaps() {
    for (d, alpha) in [(3, 0.4), (5, PI), (9, 4.0)] {
        let c = uniform_coeffs(d);
        let b = oam_b(d, alpha);
        let a = purity(&c, &b).unwrap();
        assert!((a - purity_unreflected(&c, &b)).abs() < 1e-12);
    }
}

#[test]
fn small_aperture_concurrence_is_nondecreasing() {
    for d in [3, 5, 7, 9, 11, 13] {
        let mut last = 0.0;
        for i in 0..50 {
            let alpha = 1e-4 + (0.3 - 1e-4) * i as f64 / 49.0;
            let b = oam_b(d, alpha);
            let now = concurrence(purity_symmetric(&b, d).unwrap()).unwrap();
            assert!(now >= last - 1e-12, "D={d} α={alpha}: {now} < {last}");
            last = now;
        }
    }
}

fn unit_coeffs(raw: Vec<(f64, f64)>) -> Vec<Complex64> {
    let v: Vec<Complex64> = raw
        .into_iter()
        .map(|(re, im)| Complex64::new(re, im))
        .collect();
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn coeff_vec(d: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 0.1)
        })
        .prop_map(unit_coeffs)
}

fn coeffs_and_alpha() -> impl Strategy<Value = (Vec<Complex64>, f64)> {
    prop_oneof![Just(1usize), Just(2), Just(3), Just(4)]
        .prop_flat_map(|n| (coeff_vec(2 * n + 1), 0.1f64..TAU))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadruple_sum_matches_schmidt_oracle((c, alpha) in coeffs_and_alpha()) {
        let b = oam_b(c.len(), alpha);
        let p = purity(&c, &b).unwrap();
        prop_assert!((p - schmidt_purity(&c, &b)).abs() < 1e-9);
    }

    #[test]
    fn symmetric_form_matches_quadruple_sum(n in 1usize..5, alpha in 0.1f64..TAU) {
        let d = 2 * n + 1;
        let b = oam_b(d, alpha);
        let a = purity(&uniform_coeffs(d), &b).unwrap();
        prop_assert!((a - purity_symmetric(&b, d).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn global_phase_leaves_purity_unchanged((c, alpha) in coeffs_and_alpha(), theta in -PI..PI) {
        let b = oam_b(c.len(), alpha);
        let turned: Vec<Complex64> = c.iter().map(|z| z * Complex64::from_polar(1.0, theta)).collect();
        let a = purity(&c, &b).unwrap();
        prop_assert!((a - purity(&turned, &b).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn concurrence_stays_in_range((c, alpha) in coeffs_and_alpha()) {
        let b = oam_b(c.len(), alpha);
        let state = BiphotonState::from_schmidt_weights(&c).unwrap();
        let r = schmidt_oracle(&state, &b, &b).unwrap();
        prop_assert!(r.concurrence >= 0.0);
        prop_assert!(r.concurrence <= max_concurrence(r.effective_rank()) + 1e-9);
        prop_assert!((r.concurrence - concurrence(r.purity).unwrap()).abs() < 1e-12);
        let sq: f64 = r.schmidt_spectrum.iter().map(|x| x * x).sum();
        prop_assert!((r.purity - sq).abs() < 1e-9);
    }
}
