use std::f64::consts::PI;

use num_complex::Complex64;
use udw_core::model::{
    anticommutator_pointlike, commutator_lightcone, minkowski_mode_family, wightman_from_modes,
    wightman_pointlike,
};
use udw_core::quad::{integrate_1d_with_breaks, Tolerance};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-11, 20_000_000).unwrap()
}

// ∫ 2W(Δt, r) g(Δt) dΔt at finite regulator
fn regulated_pairing(g: impl Fn(f64) -> f64, r: f64, eps: f64) -> Complex64 {
    let breaks = [-r - 1e-3, -r, -r + 1e-3, r - 1e-3, r, r + 1e-3];
    integrate_1d_with_breaks(
        |t| 2.0 * wightman_pointlike(t, r, eps).unwrap() * g(t),
        -12.0,
        12.0,
        &breaks,
        tol(),
    )
    .unwrap()
    .value
}

// principal-value pairing of the anticommutator, using
// C⁺ = -(1/(4π²r))·(1/(t-r) - 1/(t+r)) and PV∫h/(t-a) = ∫_0^∞ (h(a+u) - h(a-u))/u du
fn anticommutator_pairing(g: impl Fn(f64) -> f64, r: f64) -> f64 {
    let pv = |a: f64| {
        integrate_1d_with_breaks(
            |u| c(if u == 0.0 { 0.0 } else { (g(a + u) - g(a - u)) / u }),
            0.0,
            14.0,
            &[],
            tol(),
        )
        .unwrap()
        .value
        .re
    };
    -(pv(r) - pv(-r)) / (4.0 * PI * PI * r)
}

#[test]
fn split_identity_pairs_with_gaussians() {
    // the regulated pairing carries an O(ε) bias of about 1e-5 at ε = 1e-4;
    // check its linear scaling and the extrapolated limit
    let eps = 1e-4;
    for &(center, r) in &[(0.3, 1.0), (-0.5, 2.0), (1.0, 0.5)] {
        let g = |t: f64| (-(t - center) * (t - center)).exp();
        let plus = anticommutator_pairing(g, r);
        let minus = commutator_lightcone(r).unwrap().pair(|t| c(g(t)));
        let rhs = c(plus) + Complex64::i() * minus;
        let fine = regulated_pairing(g, r, eps);
        let coarse = regulated_pairing(g, r, 2.0 * eps);
        let bias = (fine - rhs).norm();
        assert!(bias < 3e-5, "r = {r}: {fine} vs {rhs}");
        let ratio = (coarse - rhs).norm() / bias;
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
        let extrapolated = 2.0 * fine - coarse;
        assert!((extrapolated - rhs).norm() < 1e-8, "r = {r}: {extrapolated} vs {rhs}");
    }
}

#[test]
fn commutator_is_regulated_imaginary_part() {
    let r = 1.0;
    let g = |t: f64| (-(t - 0.4) * (t - 0.4)).exp();
    let regulated = regulated_pairing(g, r, 1e-4).im;
    let expected = (g(-r) - g(r)) / (4.0 * PI * r);
    assert!((regulated - expected).abs() < 1e-4);
}

#[test]
fn anticommutator_even_commutator_odd() {
    let r = 1.5;
    let even = |t: f64| (-t * t / 2.0).exp();
    let odd = |t: f64| t * (-t * t / 2.0).exp();
    assert!(anticommutator_pairing(odd, r).abs() < 1e-12);
    assert_eq!(commutator_lightcone(r).unwrap().pair(|t| c(even(t))).norm(), 0.0);
    assert!(commutator_lightcone(r).unwrap().pair(|t| c(odd(t))).norm() > 1e-3);
}

#[test]
fn pointwise_anticommutator_off_cone() {
    for &(dt, r) in &[(0.0, 1.0), (3.0, 1.0), (0.2, 4.0), (-2.5, 0.5)] {
        let exact = anticommutator_pointlike(dt, r).unwrap();
        let approx = 2.0 * wightman_pointlike(dt, r, 1e-7).unwrap().re;
        assert!((approx - exact).abs() <= 1e-6 * exact.abs());
    }
}

#[test]
fn mode_reconstruction_grid() {
    let family = minkowski_mode_family(0.0).unwrap();
    let eps = 1e-2;
    let t = Tolerance::new(1e-12, 1e-9, 50_000_000).unwrap();
    let mut n = 0;
    for &dt in &[-2.0, -0.7, 0.0, 0.4, 1.9] {
        for &r in &[0.0, 0.3, 1.0, 2.5] {
            let rebuilt = wightman_from_modes(&family, dt, r, eps, t).unwrap().value;
            let closed = wightman_pointlike(dt, r, eps).unwrap();
            assert!((rebuilt - closed).norm() <= 1e-6 * closed.norm(), "({dt}, {r}): {rebuilt} vs {closed}");
            n += 1;
        }
    }
    assert_eq!(n, 20);
}

