//! The acceptance suite behind `udw selftest`.
//!
//! Each criterion returns an [`Outcome`] carrying the measured numbers;
//! errors inside a check count as failures rather than aborting the run.

use std::f64::consts::TAU;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udw_core::harvest::{
    assemble_rho, compare_methods, comparison_tolerance, fast_tolerance, l_ij_mode, l_ij_oracle, m_minus_closed, m_minus_integral,
    m_oracle, m_plus_closed, m_plus_identity, negativity, oracle_tolerance, DensityMatrixBlocks, HarvestError,
};
use udw_core::model::{DetectorId, DimensionlessParams, Scenario};
use udw_core::specfun::{dawson, erf_complex, erfc_complex, erfi_real, faddeeva_w};

use crate::figures::{curve, curve_deviation, parts_with, ClosedForm, Figure};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{} {verdict} {}: {} [{:.1}s]", self.id, self.title, self.detail, self.seconds)
    }
}

/// The closed forms under test; replaceable so that the suite can be
/// checked against deliberately broken implementations.
#[derive(Clone, Copy)]
pub struct ClosedForms {
    pub m_plus: ClosedForm,
    pub m_minus: ClosedForm,
}

impl Default for ClosedForms {
    fn default() -> Self {
        Self { m_plus: m_plus_closed, m_minus: m_minus_closed }
    }
}

type Check = fn(&ClosedForms) -> Result<(bool, String), HarvestError>;

pub const CRITERIA: [(&str, &str, Check); 10] = [
    ("A1", "special functions vs 30-digit oracle", special_functions),
    ("A2", "anticommutator part from flipped-gap terms", central_identity),
    ("A3", "cross-correlation terms vs regulated references", convention_pinning),
    ("A4", "decomposition vs time-ordered reference", decomposition),
    ("A5", "scaled curves vs reference integral", curves),
    ("A6", "light-cone structure at beta=5", light_cone_structure),
    ("A7", "symmetries", symmetries),
    ("A8", "commutator support", commutator_support),
    ("A9", "evaluation count reduction", complexity),
    ("A10", "negativity vs perturbative formula", negativity_consistency),
];

pub fn run_one(id: &str, forms: &ClosedForms) -> Option<Outcome> {
    let (id, title, check) = CRITERIA.iter().find(|c| c.0.eq_ignore_ascii_case(id))?;
    let start = Instant::now();
    let (passed, detail) = match check(forms) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() })
}

/// Runs the selected criteria (all when `ids` is empty), printing each
/// line as it completes.
pub fn run(ids: &[String], forms: &ClosedForms, mut report: impl FnMut(&Outcome)) -> Result<Vec<Outcome>, String> {
    let selected: Vec<&str> =
        if ids.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { ids.iter().map(|s| s.as_str()).collect() };
    let mut out = Vec::new();
    for id in selected {
        let outcome = run_one(id, forms).ok_or_else(|| id.to_string())?;
        report(&outcome);
        out.push(outcome);
    }
    Ok(out)
}

fn scenario(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Scenario, HarvestError> {
    Ok(Scenario::from_dimensionless(&DimensionlessParams::symmetric(alpha, beta, gamma, delta))?)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Additive recurrence on the unit square (plastic-number rotation).
fn quasi_random(n: usize) -> impl Iterator<Item = (f64, f64)> {
    const PLASTIC: f64 = 1.324_717_957_244_746;
    let (a1, a2) = (1.0 / PLASTIC, 1.0 / (PLASTIC * PLASTIC));
    (1..=n).map(move |i| ((0.5 + a1 * i as f64).fract(), (0.5 + a2 * i as f64).fract()))
}

fn special_functions(_: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let c = |(re, im): (f64, f64)| Complex64::new(re, im);
    let scale = |u: f64, lo: f64, hi: f64| lo + (hi - lo) * u;
    let mut worst = [0.0f64; 5];
    let per_function = 200;
    for (u, v) in quasi_random(per_function) {
        // Faddeeva on the upper half plane, where every closed form evaluates it
        let z = Complex64::new(scale(u, -20.0, 20.0), scale(v, 0.0, 20.0));
        worst[0] = worst[0].max(rel(faddeeva_w(z), c(udw_oracle::faddeeva(z.re, z.im))));

        let z = Complex64::new(scale(u, -4.0, 4.0), scale(v, -4.0, 4.0));
        worst[1] = worst[1].max(rel(erf_complex(z), c(udw_oracle::erf(z.re, z.im))));
        // erfc(z) = e^{-z²} w(iz)
        let iz = Complex64::i() * z;
        let erfc_ref = (-z * z).exp() * c(udw_oracle::faddeeva(iz.re, iz.im));
        worst[2] = worst[2].max(rel(erfc_complex(z), erfc_ref));

        let x = scale(u, -26.0, 26.0);
        let erfi = erfi_real(x).expect("within range");
        worst[3] = worst[3].max((erfi - udw_oracle::erfi(x)).abs() / udw_oracle::erfi(x).abs());

        let x = scale(v, -30.0, 30.0);
        worst[4] = worst[4].max((dawson(x) - udw_oracle::dawson(x)).abs() / udw_oracle::dawson(x).abs());
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    let detail = format!(
        "max rel err {max:.2e} (limit 1e-12) over {} points: w {:.1e}, erf {:.1e}, erfc {:.1e}, erfi {:.1e}, dawson {:.1e}",
        5 * per_function,
        worst[0],
        worst[1],
        worst[2],
        worst[3],
        worst[4]
    );
    Ok((max <= 1e-12, detail))
}

fn central_identity(forms: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let mut worst = (0.0f64, [0.0; 4]);
    let mut count = 0;
    for alpha in [0.0, 1.0, 2.0, 4.0] {
        for beta in [1.0, 5.0, 10.0] {
            for g in 0..=20 {
                for delta in [0.0, 1.0] {
                    let s = scenario(alpha, beta, g as f64, delta)?;
                    let d = rel(m_plus_identity(&s, fast_tolerance())?.value, (forms.m_plus)(&s)?);
                    if !(d <= worst.0) {
                        worst = (d, [alpha, beta, g as f64, delta]);
                    }
                    count += 1;
                }
            }
        }
    }
    let [a, b, g, d] = worst.1;
    Ok((
        worst.0 <= 1e-8,
        format!("max rel deviation {:.2e} (limit 1e-8) over {count} points, worst at alpha={a} beta={b} gamma={g} delta={d}", worst.0),
    ))
}

fn convention_pinning(_: &ClosedForms) -> Result<(bool, String), HarvestError> {
    use DetectorId::{A, B};
    let unequal = Scenario::from_dimensionless(&DimensionlessParams {
        alpha_a: 1.0,
        alpha_b: 2.0,
        beta: 3.0,
        gamma: -1.0,
        ..DimensionlessParams::default()
    })?;
    // (label, scenario, i, j, gap multipliers for i and j)
    let points = [
        ("AA(1,5,0)", scenario(1.0, 5.0, 0.0, 0.0)?, A, A, 1.0, 1.0),
        ("AB(1,5,0)", scenario(1.0, 5.0, 0.0, 0.0)?, A, B, 1.0, 1.0),
        ("AB(0.5,2,1.5)", scenario(0.5, 2.0, 1.5, 0.0)?, A, B, 1.0, 1.0),
        ("AB[a,-a](1,5,0)", scenario(1.0, 5.0, 0.0, 0.0)?, A, B, 1.0, -1.0),
        ("BA[a,-a](2,1,3)", scenario(2.0, 1.0, 3.0, 0.0)?, B, A, 1.0, -1.0),
        ("AB unequal gaps", unequal, A, B, 1.0, 1.0),
    ];
    let mut worst = (0.0f64, "");
    for (label, s, i, j, fi, fj) in &points {
        let (gi, gj) = (fi * s.detector(*i).gap, fj * s.detector(*j).gap);
        let fast = l_ij_mode(s, *i, *j, gi, gj, fast_tolerance())?.value;
        let reference = l_ij_oracle(s, *i, *j, gi, gj, oracle_tolerance())?.value;
        let d = rel(fast, reference);
        if !(d <= worst.0) {
            worst = (d, label);
        }
    }
    Ok((worst.0 <= 1e-4, format!("max rel deviation {:.2e} (limit 1e-4) over {} points, worst {}", worst.0, points.len(), worst.1)))
}

fn decomposition(forms: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let points = [(1.0, 5.0, 0.0), (1.0, 5.0, 5.0), (1.0, 5.0, 10.0), (0.0, 1.0, 3.0), (2.0, 10.0, 0.0)];
    let mut worst = (0.0f64, (0.0, 0.0, 0.0));
    let mut ratios = Vec::new();
    for &(a, b, g) in &points {
        let s = scenario(a, b, g, 0.0)?;
        let reference = m_oracle(&s, oracle_tolerance())?;
        let closed = (forms.m_plus)(&s)? + (forms.m_minus)(&s)?;
        let d = rel(closed, reference.value);
        if !(d <= worst.0) {
            worst = (d, (a, b, g));
        }
        ratios.push(format!("{:.3}", reference.difference_ratio));
    }
    let (a, b, g) = worst.1;
    Ok((
        worst.0 <= 1e-3,
        format!(
            "max rel deviation {:.2e} (limit 1e-3), worst at alpha={a} beta={b} gamma={g}; regulator difference ratios [{}]",
            worst.0,
            ratios.join(", ")
        ),
    ))
}

fn curves(_: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let mut ok = true;
    let mut parts_text = Vec::new();
    for fig in [Figure::Fig1, Figure::Fig2, Figure::Fig3] {
        let points = curve(fig.beta());
        if let Some(e) = points.iter().find_map(|p| p.reference.as_ref().err()) {
            return Err(e.clone());
        }
        let (dev, max) = curve_deviation(&points).expect("all points succeeded");
        ok &= dev <= 1e-3 * max;
        parts_text.push(format!("beta={} {:.2e}", fig.beta(), dev / max));
    }
    Ok((ok, format!("max deviation / curve max (limit 1e-3): {}", parts_text.join(", "))))
}

fn light_cone_structure(forms: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let beta = Figure::Fig4.beta();
    let pts = parts_with(beta, forms.m_plus, forms.m_minus)?;
    let argmin = pts.iter().min_by(|a, b| a.plus.abs().total_cmp(&b.plus.abs())).expect("non-empty").gamma;
    let argmax = pts.iter().max_by(|a, b| a.minus_over_i.abs().total_cmp(&b.minus_over_i.abs())).expect("non-empty").gamma;
    let positive = pts.iter().all(|p| p.minus_over_i > 0.0);
    let inside = |g: f64| (4.5..=5.5).contains(&g);
    Ok((
        inside(argmin) && inside(argmax) && positive,
        format!("argmin |m_plus| at gamma={argmin}, argmax |m_minus| at gamma={argmax} (window [4.5, 5.5]); Im m > 0 on all {} points: {positive}", pts.len()),
    ))
}

fn symmetries(forms: &ClosedForms) -> Result<(bool, String), HarvestError> {
    use DetectorId::{A, B};
    let mut swap = 0.0f64;
    let mut parity = 0.0f64;
    let fast = fast_tolerance();
    let paths: [(&str, &dyn Fn(&Scenario) -> Result<Complex64, HarvestError>); 5] = [
        ("closed+", &|s| (forms.m_plus)(s)),
        ("closed-", &|s| (forms.m_minus)(s)),
        ("identity", &|s| Ok(m_plus_identity(s, fast)?.value)),
        ("light-cone", &|s| Ok(m_minus_integral(s, fast)?.value)),
        ("oracle", &|s| Ok(m_oracle(s, oracle_tolerance())?.value)),
    ];
    for &(a, b, g) in &[(1.0, 5.0, 2.0), (0.5, 1.0, 4.0)] {
        let s = scenario(a, b, g, 0.0)?;
        let mirrored = scenario(a, b, -g, 0.0)?;
        for (_, path) in &paths {
            let v = path(&s)?;
            swap = swap.max(rel(path(&s.swapped())?, v));
            parity = parity.max(rel(path(&mirrored)?, v));
        }
    }
    let mut hermitian_l = 0.0f64;
    let mut exact_state = true;
    for (aa, ab, beta, gamma) in [(1.0, 2.0, 5.0, 1.5), (0.0, -1.0, 1.0, -3.0)] {
        let p = DimensionlessParams { alpha_a: aa, alpha_b: ab, beta, gamma, ..DimensionlessParams::default() };
        let s = Scenario::from_dimensionless(&p)?;
        let (ga, gb) = (s.detector_a().gap, s.detector_b().gap);
        let l_ab = l_ij_mode(&s, A, B, ga, gb, fast)?.value;
        let l_ba = l_ij_mode(&s, B, A, gb, ga, fast)?.value;
        hermitian_l = hermitian_l.max((l_ba - l_ab.conj()).norm() / l_ab.norm());
        let blocks = udw_core::harvest::compute_blocks(&s, udw_core::harvest::Method::Identity)?;
        let (rho, _) = assemble_rho(&blocks, 0.3, 0.7);
        exact_state &= rho.trace() == Complex64::new(1.0, 0.0) && rho.is_hermitian();
    }
    let ok = swap <= 1e-10 && parity <= 1e-10 && hermitian_l <= 1e-12 && exact_state;
    Ok((
        ok,
        format!(
            "swap {swap:.1e}, gamma parity {parity:.1e} (limits 1e-10, {} paths); l_ba vs conj(l_ab) {hermitian_l:.1e} (limit 1e-12); trace exactly 1 and Hermitian: {exact_state}",
            paths.len()
        ),
    ))
}

fn commutator_support(forms: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let ratio = |b, g| -> Result<f64, HarvestError> {
        let s = scenario(1.0, b, g, 0.0)?;
        Ok((forms.m_minus)(&s)?.norm() / (forms.m_plus)(&s)?.norm())
    };
    let spacelike = ratio(10.0, 0.0)?;
    let timelike = ratio(1.0, 10.0)?;
    let smeared = m_minus_integral(&scenario(0.0, 5.0, 5.0, 1e-3)?, fast_tolerance())?.value;
    let limit = (forms.m_minus)(&scenario(0.0, 5.0, 5.0, 0.0)?)?;
    let continuity = rel(smeared, limit);
    Ok((
        spacelike < 1e-3 && timelike < 1e-3 && continuity <= 1e-4,
        format!(
            "|m_minus|/|m_plus| = {spacelike:.2e} at (10,0), {timelike:.2e} at (1,10) (limit 1e-3); delta=1e-3 vs pointlike {continuity:.2e} (limit 1e-4)"
        ),
    ))
}

fn complexity(_: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let report = compare_methods(&scenario(1.0, 5.0, 0.0, 0.0)?, comparison_tolerance(1e-3))?;
    let m = report.entry("m").expect("always present");
    if let Some(e) = &m.error {
        return Ok((false, e.clone()));
    }
    let ratio = report.evaluation_ratio.unwrap_or(0.0);
    let dev = m.rel_deviation.unwrap_or(f64::INFINITY);
    Ok((
        ratio >= 100.0 && dev <= 1e-3,
        format!(
            "fast {} vs reference {} evaluations: ratio {ratio:.0} (limit 100); rel deviation {dev:.2e}; wall-time speedup {:.0}",
            m.evaluations_fast,
            m.evaluations_oracle,
            report.speedup.unwrap_or(0.0)
        ),
    ))
}

fn negativity_consistency(_: &ClosedForms) -> Result<(bool, String), HarvestError> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    let mut ok = true;
    let states = 50;
    for _ in 0..states {
        let l = rng.random_range(0.0..1e-3);
        let m = Complex64::from_polar(rng.random_range(0.0..2e-3), rng.random_range(0.0..TAU));
        let l_ab = Complex64::from_polar(rng.random_range(0.0..=l), rng.random_range(0.0..TAU));
        let (rho, _) = assemble_rho(&DensityMatrixBlocks::from_values(l, l, l_ab, m), 1.0, 1.0);
        let largest = [l, l_ab.norm(), m.norm()].into_iter().fold(0.0, f64::max);
        let dev = (negativity(&rho) - (m.norm() - l).max(0.0)).abs();
        ok &= dev <= 10.0 * largest * largest;
        worst = worst.max(dev / (largest * largest));
    }
    Ok((ok, format!("max |N - max(0, |m| - l_aa)| / block^2 = {worst:.2e} (limit 10) over {states} states")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_random_points_fill_the_square() {
        let pts: Vec<_> = quasi_random(400).collect();
        for (lo, hi) in [(0.0, 0.5), (0.5, 1.0)] {
            let n = pts.iter().filter(|p| p.0 >= lo && p.0 < hi && p.1 >= lo && p.1 < hi).count();
            assert!((80..=120).contains(&n), "{n}");
        }
    }

    #[test]
    fn unknown_criteria_are_reported() {
        assert!(run(&["A11".into()], &ClosedForms::default(), |_| ()).is_err());
    }
}
