use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udw_core::harvest::{
    assemble_rho, compare_methods, comparison_tolerance, compute_blocks, e_integral_reference, e_kernel, fast_tolerance,
    figure_prefactor, l_aa_closed, l_ij_mode, l_ij_oracle, m_minus_closed, m_minus_integral, m_oracle,
    m_plus_closed, m_plus_identity, negativity, oracle_tolerance, scaled_m_closed, ComparisonReport,
    DensityMatrixBlocks, EntryMethod, HarvestError, Method,
};
use udw_core::model::{DetectorId, DimensionlessParams, Scenario};
use udw_core::specfun::dawson;

use DetectorId::{A, B};

fn scenario(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Scenario {
    Scenario::from_dimensionless(&DimensionlessParams::symmetric(alpha, beta, gamma, delta)).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// (2/√π) F(u/√2), written out independently of the library's bracket
fn g(u: f64) -> f64 {
    2.0 / std::f64::consts::PI.sqrt() * udw_oracle::dawson(u / SQRT_2)
}

#[test]
fn self_correlation_vanishes_for_large_gaps() {
    let at = |alpha: f64| l_ij_mode(&scenario(alpha, 5.0, 0.0, 0.0), A, A, alpha, alpha, fast_tolerance()).unwrap();
    let cold = at(0.0).value.re;
    let hot = at(8.0).value.re;
    assert!(hot < 1e-10 * cold, "{hot} vs {cold}");
    let mut last = cold;
    for alpha in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let v = at(alpha).value.re;
        assert!(v < last);
        last = v;
    }
}

#[test]
fn self_correlation_matches_closed_form() {
    for alpha in [-2.0, 0.0, 1.0, 3.0] {
        let s = scenario(alpha, 5.0, 0.0, 0.0);
        let v = l_ij_mode(&s, A, A, alpha, alpha, fast_tolerance()).unwrap().value;
        let closed = l_aa_closed(alpha, 1.0);
        assert!((v.re - closed).abs() <= 1e-10 * closed, "α={alpha}: {} vs {closed}", v.re);
        assert!(v.im.abs() <= 1e-12 * closed);
    }
}

#[test]
fn cross_correlation_conjugates_under_swap() {
    for (alpha_a, alpha_b, beta, gamma) in [(1.0, 2.0, 5.0, 1.5), (0.0, -1.0, 1.0, -3.0), (2.0, 2.0, 10.0, 4.0)] {
        let p = DimensionlessParams { alpha_a, alpha_b, beta, gamma, ..DimensionlessParams::default() };
        let s = Scenario::from_dimensionless(&p).unwrap();
        let (ga, gb) = (s.detector_a().gap, s.detector_b().gap);
        let ab = l_ij_mode(&s, A, B, ga, gb, fast_tolerance()).unwrap().value;
        let ba = l_ij_mode(&s, B, A, gb, ga, fast_tolerance()).unwrap().value;
        assert!((ba - ab.conj()).norm() <= 1e-12 * ab.norm().max(1e-300), "{ab} {ba}");
    }
}

#[test]
fn self_correlation_reference_is_real_and_extrapolates_linearly() {
    let s = scenario(1.0, 5.0, 0.0, 0.0);
    let o = l_ij_oracle(&s, A, A, 1.0, 1.0, oracle_tolerance()).unwrap();
    assert!(o.value.im.abs() <= 1e-6 * o.value.re, "{}", o.value);
    assert!((o.difference_ratio - 2.0).abs() <= 0.5, "ratio {}", o.difference_ratio);
    assert_eq!(o.ladder.len(), 3);
    assert!(o.ladder.windows(2).all(|w| w[0].epsilon == 2.0 * w[1].epsilon));
    let closed = l_aa_closed(1.0, 1.0);
    assert!((o.value.re - closed).abs() <= 1e-4 * closed, "{} vs {closed}", o.value.re);
}

#[test]
fn cross_correlation_reference_matches_mode_integral() {
    let s = scenario(1.0, 5.0, 0.0, 0.0);
    let o = l_ij_oracle(&s, A, B, 1.0, 1.0, oracle_tolerance()).unwrap();
    let f = l_ij_mode(&s, A, B, 1.0, 1.0, fast_tolerance()).unwrap();
    assert!(rel(f.value, o.value) <= 1e-4, "{} vs {}", f.value, o.value);
}

#[test]
fn anticommutator_part_identity_examples() {
    let s = scenario(2.0, 5.0, 3.0, 0.0);
    let id = m_plus_identity(&s, fast_tolerance()).unwrap().value;
    let closed = m_plus_closed(&s).unwrap();
    assert!(rel(id, closed) <= 1e-8, "{id} vs {closed}");

    let swapped = m_plus_identity(&s.swapped(), fast_tolerance()).unwrap().value;
    assert!((swapped - id).norm() <= 1e-12 * id.norm());

    let mirrored = m_plus_identity(&scenario(2.0, 5.0, -3.0, 0.0), fast_tolerance()).unwrap().value;
    assert!((mirrored - id).norm() <= 1e-10 * id.norm());
}

#[test]
fn anticommutator_part_closed_form_cases() {
    let pre = |alpha: f64, beta: f64| figure_prefactor(alpha, beta, 1.0);
    // on the light cone the near summand vanishes
    let on_cone = m_plus_closed(&scenario(1.0, 3.0, 3.0, 0.0)).unwrap();
    let expected = -pre(1.0, 3.0) * g(6.0);
    assert!((on_cone.re - expected).abs() <= 1e-14 * expected.abs());
    assert_eq!(on_cone.im, 0.0);

    // simultaneous switching: the two summands coincide
    for (beta, delta) in [(1.0, 0.0), (5.0, 0.0), (5.0, 1.0)] {
        let v = m_plus_closed(&scenario(0.5, beta, 0.0, delta)).unwrap().re;
        let a = 1.0 + delta * delta;
        let expected = -2.0 * pre(0.5, beta) / a.sqrt() * 2.0 / std::f64::consts::PI.sqrt()
            * udw_oracle::dawson(beta / (2.0 * a).sqrt());
        assert!(v < 0.0);
        assert!((v - expected).abs() <= 1e-13 * expected.abs(), "{v} vs {expected}");
    }

    // pinned by the flipped-gap quadrature
    let s = scenario(0.0, 5.0, 0.0, 0.0);
    let closed = m_plus_closed(&s).unwrap().re;
    let identity = m_plus_identity(&s, fast_tolerance()).unwrap().value.re;
    assert!((closed - identity).abs() <= 1e-12 * closed.abs());
    assert!((closed - -3.3302496578666e-3).abs() <= 1e-14, "{closed:.16e}");
}

#[test]
fn anticommutator_part_has_a_coincident_limit() {
    let at_zero = m_plus_closed(&scenario(1.0, 0.0, 2.0, 0.0)).unwrap();
    let near = m_plus_closed(&scenario(1.0, 1e-4, 2.0, 0.0)).unwrap();
    assert!(at_zero.re.is_finite());
    assert!(rel(near, at_zero) <= 1e-6, "{near} vs {at_zero}");
    let identity = m_plus_identity(&scenario(1.0, 0.0, 2.0, 0.0), fast_tolerance()).unwrap().value;
    assert!(rel(identity, at_zero) <= 1e-8, "{identity} vs {at_zero}");
}

#[test]
fn closed_forms_reject_what_they_cannot_do() {
    let p = DimensionlessParams { alpha_a: 1.0, alpha_b: 2.0, ..DimensionlessParams::default() };
    let unequal = Scenario::from_dimensionless(&p).unwrap();
    assert!(matches!(m_plus_closed(&unequal), Err(HarvestError::UnsupportedScenario { .. })));
    assert!(matches!(m_minus_closed(&unequal), Err(HarvestError::UnsupportedScenario { .. })));
    let smeared = scenario(1.0, 5.0, 0.0, 0.5);
    assert!(matches!(m_minus_closed(&smeared), Err(HarvestError::UnsupportedScenario { .. })));
    assert!(matches!(m_oracle(&smeared, oracle_tolerance()), Err(HarvestError::UnsupportedScenario { .. })));
    let massive = Scenario::from_dimensionless(&DimensionlessParams { mass: 0.5, ..DimensionlessParams::default() }).unwrap();
    assert!(matches!(m_plus_closed(&massive), Err(HarvestError::UnsupportedScenario { .. })));
    let coincident = scenario(1.0, 0.0, 0.0, 0.0);
    assert_eq!(m_minus_closed(&coincident), Err(HarvestError::CoincidentDetectors));
    assert!(matches!(e_integral_reference(0.0, 1.0, fast_tolerance()), Err(HarvestError::InvalidArgument { .. })));
}

#[test]
fn commutator_part_closed_form_cases() {
    for gamma in [0.0, 0.7, 3.0, 12.0] {
        let plus = m_minus_closed(&scenario(1.0, 5.0, gamma, 0.0)).unwrap();
        let minus = m_minus_closed(&scenario(1.0, 5.0, -gamma, 0.0)).unwrap();
        assert_eq!(plus, minus);
        assert_eq!(plus.re, 0.0);
        assert!(plus.im > 0.0);
    }
    let s = scenario(1.0, 10.0, 0.0, 0.0);
    let ratio = m_minus_closed(&s).unwrap().norm() / m_plus_closed(&s).unwrap().norm();
    // 2e^{-50} against ~(2/√π)/(β/√2)
    assert!(ratio < 1e-3 && ratio < 1e-19, "{ratio}");

    let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.1).collect();
    let (peak, _) = grid
        .iter()
        .map(|&gm| (gm, m_minus_closed(&scenario(1.0, 5.0, gm, 0.0)).unwrap().im))
        .fold((0.0, f64::MIN), |best, x| if x.1 > best.1 { x } else { best });
    assert!((peak - 5.0).abs() <= 0.5, "peak at {peak}");
}

#[test]
fn commutator_part_light_cone_integral() {
    let s = scenario(1.0, 5.0, 3.0, 0.0);
    let v = m_minus_integral(&s, fast_tolerance()).unwrap().value;
    let closed = m_minus_closed(&s).unwrap();
    assert!(rel(v, closed) <= 1e-8, "{v} vs {closed}");
    assert!(v.re.abs() <= 1e-10 * v.im.abs());

    let smeared = m_minus_integral(&scenario(0.0, 5.0, 5.0, 1e-3), fast_tolerance()).unwrap().value;
    let limit = m_minus_closed(&scenario(0.0, 5.0, 5.0, 0.0)).unwrap();
    assert!(rel(smeared, limit) <= 1e-4, "{smeared} vs {limit}");
    assert!(smeared.re.abs() <= 1e-10 * smeared.im.abs());

    // smeared detectors at one point no longer diverge
    let overlapping = m_minus_integral(&scenario(1.0, 0.0, 1.0, 1.0), fast_tolerance()).unwrap().value;
    assert!(overlapping.im.is_finite() && overlapping.im > 0.0);
}

#[test]
fn reference_matches_decomposition() {
    let s = scenario(1.0, 5.0, 0.0, 0.0);
    let o = m_oracle(&s, oracle_tolerance()).unwrap();
    let closed = m_plus_closed(&s).unwrap() + m_minus_closed(&s).unwrap();
    assert!(rel(o.value, closed) <= 1e-3, "{} vs {closed}", o.value);
    assert!((o.difference_ratio - 2.0).abs() <= 0.5 || o.difference_ratio.is_infinite());

    let swapped = m_oracle(&s.swapped(), oracle_tolerance()).unwrap().value;
    assert!((swapped - o.value).norm() <= 1e-10 * o.value.norm());

    let doubled = m_oracle(&s.with_couplings(2.0, 2.0), oracle_tolerance()).unwrap().value;
    assert_eq!(doubled, 4.0 * o.value);
}

#[test]
fn regulated_reference_rejects_coincident_detectors() {
    let s = scenario(1.0, 0.0, 0.0, 0.0);
    assert_eq!(m_oracle(&s, oracle_tolerance()).unwrap_err(), HarvestError::CoincidentDetectors);
}

#[test]
fn figure_curve_matches_bracket() {
    for (beta, gamma) in [(1.0, 0.0), (1.0, 3.0), (5.0, 5.0), (10.0, 2.0)] {
        let reference = e_integral_reference(beta, gamma, fast_tolerance()).unwrap().value;
        let bracket = -scaled_m_closed(beta, gamma);
        assert!((reference - bracket).norm() <= 1e-3 * 1.676, "β={beta} γ={gamma}: {reference} vs {bracket}");
    }
    // the tail is Dawson-like (∝ 1/γ), not Gaussian
    let far = e_integral_reference(5.0, 30.0, fast_tolerance()).unwrap().value;
    let expected = g(35.0) - g(25.0);
    assert!((far.re - expected).abs() <= 1e-8, "{far} vs {expected}");
    assert!(far.norm() < 1e-2 && far.im.abs() < 1e-8);
}

#[test]
fn figure_integrand_matches_direct_erfc() {
    let erfc = |re: f64, im: f64| {
        let (a, b) = udw_oracle::erf(re, im);
        Complex64::new(1.0 - a, -b)
    };
    let (k, gm) = (1.0, 2.0);
    let direct = |gm: f64| {
        Complex64::from_polar((-0.5 * k * k as f64).exp(), gm * k) * erfc(gm / SQRT_2, k / SQRT_2)
    };
    let sum = e_kernel(k, gm) + e_kernel(k, -gm);
    let expected = direct(gm) + direct(-gm);
    assert!(rel(sum, expected) <= 1e-13, "{sum} vs {expected}");
    assert!(rel(e_kernel(k, gm), direct(gm)) <= 1e-13);
    // large κ stays finite
    assert!(e_kernel(40.0, 3.0).norm().is_finite());
}

#[test]
fn scaled_correlation_factorises_in_alpha() {
    for (beta, gamma) in [(1.0, 0.0), (5.0, 3.0), (10.0, 12.0)] {
        let reference = scaled_m_closed(beta, gamma);
        for alpha in [0.0, 1.0, 2.0] {
            let s = scenario(alpha, beta, gamma, 0.0);
            let m = m_plus_closed(&s).unwrap() + m_minus_closed(&s).unwrap();
            let unscaled = m / figure_prefactor(alpha, beta, 1.0);
            assert!(rel(unscaled, reference) <= 1e-10);
            let lifted = m * (0.5 * alpha * alpha).exp();
            let base = (m_plus_closed(&scenario(0.0, beta, gamma, 0.0)).unwrap()
                + m_minus_closed(&scenario(0.0, beta, gamma, 0.0)).unwrap())
                .norm();
            assert!((lifted.norm() - base).abs() <= 1e-10 * base);
        }
    }
    // the library's bracket uses its own Dawson function
    let direct = -(g(2.0) + g(8.0));
    assert!((scaled_m_closed(5.0, 3.0).re - direct).abs() <= 1e-13);
    assert_eq!(dawson(0.0), 0.0);
}

#[test]
fn blocks_by_method_agree() {
    let s = scenario(1.0, 5.0, 2.0, 0.0);
    let closed = compute_blocks(&s, Method::Closed).unwrap();
    let identity = compute_blocks(&s, Method::Identity).unwrap();
    assert_eq!(closed.m_plus.unwrap().method, EntryMethod::ClosedForm);
    assert_eq!(identity.m_plus.unwrap().method, EntryMethod::FlippedGapIdentity);
    assert_eq!(identity.m_minus.unwrap().method, EntryMethod::LightConeIntegral);
    for b in [&closed, &identity] {
        assert_eq!(b.m_total.value, b.m_plus.unwrap().value + b.m_minus.unwrap().value);
        assert!(b.l_aa.value.re >= 0.0 && b.l_bb.value.re >= 0.0);
        assert!(b.m_total.value.re < 0.0 && b.m_total.value.im > 0.0);
    }
    assert!(rel(identity.m_total.value, closed.m_total.value) <= 1e-8);

    // smeared and unequal gaps fall back to the integrals
    let p = DimensionlessParams { alpha_a: 1.0, alpha_b: 1.5, delta_a: 0.5, delta_b: 0.5, ..DimensionlessParams::default() };
    let fallback = compute_blocks(&Scenario::from_dimensionless(&p).unwrap(), Method::Closed).unwrap();
    assert_eq!(fallback.m_plus.unwrap().method, EntryMethod::FlippedGapIdentity);
    assert_eq!(fallback.m_minus.unwrap().method, EntryMethod::LightConeIntegral);
}

#[test]
fn assembled_ground_state() {
    let zero = Complex64::new(0.0, 0.0);
    let (rho, warning) = assemble_rho(&DensityMatrixBlocks::from_values(0.0, 0.0, zero, zero), 1.0, 1.0);
    assert!(warning.is_none());
    for r in 0..4 {
        for c in 0..4 {
            let expected = if r == 0 && c == 0 { 1.0 } else { 0.0 };
            assert_eq!(rho.matrix[r][c], Complex64::new(expected, 0.0));
        }
    }
    assert_eq!(negativity(&rho), 0.0);
}

#[test]
fn assembled_state_warns_outside_perturbative_regime() {
    let blocks = DensityMatrixBlocks::from_values(0.02, 0.02, Complex64::new(0.01, 0.0), Complex64::new(-0.03, 0.01));
    let (_, warning) = assemble_rho(&blocks, 3.0, 3.0);
    let w = warning.expect("9·|𝓜| > 0.1");
    assert!((w.largest_block - 9.0 * 0.03f64.hypot(0.01)).abs() < 1e-12);
    assert!(assemble_rho(&blocks, 1.0, 1.0).1.is_none());
}

#[test]
fn corner_only_negativity_is_the_corner_magnitude() {
    let m = Complex64::new(-3e-3, 4e-3);
    let (rho, _) = assemble_rho(&DensityMatrixBlocks::from_values(0.0, 0.0, Complex64::new(0.0, 0.0), m), 1.0, 1.0);
    assert!((negativity(&rho) - 5e-3).abs() <= 1e-15);
}

#[test]
fn product_state_has_no_negativity() {
    let zero = Complex64::new(0.0, 0.0);
    let (rho, _) = assemble_rho(&DensityMatrixBlocks::from_values(0.01, 0.02, zero, zero), 1.0, 1.0);
    assert_eq!(negativity(&rho), 0.0);
}

#[test]
fn negativity_matches_perturbative_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let l = rng.random_range(0.0..1e-3);
        let m = Complex64::from_polar(rng.random_range(0.0..2e-3), rng.random_range(0.0..std::f64::consts::TAU));
        let l_ab = Complex64::from_polar(rng.random_range(0.0..l), rng.random_range(0.0..std::f64::consts::TAU));
        let (rho, _) = assemble_rho(&DensityMatrixBlocks::from_values(l, l, l_ab, m), 1.0, 1.0);
        let largest = [l, l_ab.norm(), m.norm()].into_iter().fold(0.0, f64::max);
        let expected = (m.norm() - l).max(0.0);
        let got = negativity(&rho);
        assert!((got - expected).abs() <= 10.0 * largest * largest, "{got} vs {expected}");
    }
}

fn block_strategy() -> impl Strategy<Value = DensityMatrixBlocks> {
    (0.0..0.05f64, 0.0..0.05f64, -0.05..0.05f64, -0.05..0.05f64, -0.05..0.05f64, -0.05..0.05f64)
        .prop_map(|(a, b, x, y, u, v)| DensityMatrixBlocks::from_values(a, b, Complex64::new(x, y), Complex64::new(u, v)))
}

proptest! {
    #[test]
    fn assembled_state_is_exactly_normalised_and_hermitian(
        blocks in block_strategy(),
        la in -2.0..2.0f64,
        lb in -2.0..2.0f64,
    ) {
        let (rho, _) = assemble_rho(&blocks, la, lb);
        prop_assert_eq!(rho.trace(), Complex64::new(1.0, 0.0));
        prop_assert!(rho.is_hermitian());
        prop_assert!(negativity(&rho) >= 0.0);
    }

    #[test]
    fn partial_transpose_is_an_involution(blocks in block_strategy()) {
        let (rho, _) = assemble_rho(&blocks, 1.0, 1.0);
        let once = udw_core::harvest::TwoDetectorState { matrix: rho.partial_transpose_b() };
        prop_assert_eq!(once.partial_transpose_b(), rho.matrix);
    }
}

#[test]
fn comparison_report_is_consistent_and_round_trips() {
    let report = compare_methods(&scenario(1.0, 5.0, 0.0, 0.0), comparison_tolerance(1e-3)).unwrap();
    assert_eq!(report.entries.len(), 4);
    for e in &report.entries {
        assert!(e.error.is_none(), "{}: {:?}", e.quantity, e.error);
        let (f, o) = (e.fast_value.unwrap(), e.oracle_value.unwrap());
        assert_eq!(e.abs_deviation.unwrap(), (f - o).norm());
        assert_eq!(e.rel_deviation.unwrap(), (f - o).norm() / o.norm());
        assert!(e.rel_deviation.unwrap() <= 1e-3, "{}: {:?}", e.quantity, e.rel_deviation);
        assert_eq!(e.oracle_ladder.len(), 3);
    }
    let m = report.entry("m").unwrap();
    assert!(m.evaluations_fast * 100 <= m.evaluations_oracle, "{} vs {}", m.evaluations_fast, m.evaluations_oracle);
    assert!(report.evaluation_ratio.unwrap() >= 100.0);

    let json = serde_json::to_string(&report).unwrap();
    let back: ComparisonReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn comparison_needs_pointlike_detectors() {
    assert!(matches!(
        compare_methods(&scenario(1.0, 5.0, 0.0, 0.5), comparison_tolerance(1e-3)),
        Err(HarvestError::UnsupportedScenario { .. })
    ));
    assert!(matches!(compare_methods(&scenario(1.0, 5.0, 0.0, 0.0), comparison_tolerance(0.0)), Err(HarvestError::InvalidArgument { .. })));
}
