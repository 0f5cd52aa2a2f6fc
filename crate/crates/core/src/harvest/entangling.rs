//! The correlation term `𝓜` and its anticommutator/commutator parts.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use super::correlations::{l_ij_mode, TAIL_WIDTHS};
use super::{combine, extrapolate, HarvestError, OracleEstimate};
use crate::model::{wightman_pointlike, DetectorId, Scenario};
use crate::quad::{integrate_1d, integrate_semi_infinite_oscillatory, Domain2d, QuadratureResult, Rect, Tolerance};
use crate::specfun::{dawson, erfc_scaled_by_exp, TWO_OVER_SQRT_PI};

/// Below this β the closed form switches to its β → 0 limit.
const SMALL_BETA: f64 = 1e-5;

/// `S(t, t') = f(t, t') + f(t', t)`, `f(t, t') = χ_A(t)χ_B(t') e^{i(Ω_A t + Ω_B t')}`.
fn symmetrised_source(s: &Scenario) -> impl Fn(f64, f64) -> Complex64 + '_ {
    let (a, b) = (s.detector_a(), s.detector_b());
    move |t, tp| {
        let forward = a.switching(t) * b.switching(tp) * Complex64::from_polar(1.0, a.gap * t + b.gap * tp);
        let backward = a.switching(tp) * b.switching(t) * Complex64::from_polar(1.0, a.gap * tp + b.gap * t);
        forward + backward
    }
}

fn coupling(s: &Scenario) -> f64 {
    s.detector_a().coupling * s.detector_b().coupling
}

fn require_massless(s: &Scenario, operation: &'static str) -> Result<(), HarvestError> {
    if s.mass() != 0.0 {
        return Err(HarvestError::UnsupportedScenario { operation, reason: "massive field" });
    }
    Ok(())
}

fn require_closed_form(s: &Scenario, operation: &'static str) -> Result<(), HarvestError> {
    require_massless(s, operation)?;
    if !s.equal_gaps() {
        return Err(HarvestError::UnsupportedScenario { operation, reason: "unequal gaps" });
    }
    Ok(())
}

/// `λ_Aλ_B e^{-α²/2} / (8√(2π) β)`, the common scale of the closed forms.
pub fn figure_prefactor(alpha: f64, beta: f64, coupling: f64) -> f64 {
    coupling * (-0.5 * alpha * alpha).exp() / (8.0 * (2.0 * PI).sqrt() * beta)
}

/// `𝓜⁺ = -λ_Aλ_B e^{-α²/2}/(8√(2π)β√a) · [G(β-γ) + G(β+γ)]` with
/// `a = 1 + δ²` and `G(u) = (2/√π) F(u/√(2a))`, `F` Dawson's integral.
pub fn m_plus_closed(scenario: &Scenario) -> Result<Complex64, HarvestError> {
    require_closed_form(scenario, "m_plus_closed")?;
    if scenario.delta_a() != scenario.delta_b() {
        return Err(HarvestError::UnsupportedScenario { operation: "m_plus_closed", reason: "unequal smearing" });
    }
    let (alpha, beta, gamma, delta) = (scenario.alpha_a(), scenario.beta(), scenario.gamma(), scenario.delta_a());
    let a = 1.0 + delta * delta;
    let scale = (2.0 * a).sqrt();
    let g = |u: f64| TWO_OVER_SQRT_PI * dawson(u / scale);
    let bracket_over_beta = if beta > SMALL_BETA {
        (g(beta - gamma) + g(beta + gamma)) / beta
    } else {
        // G odd: G(γ+β) - G(γ-β) → 2β G'(γ), with F'(x) = 1 - 2xF(x)
        let x = gamma / scale;
        2.0 * TWO_OVER_SQRT_PI * (1.0 - 2.0 * x * dawson(x)) / scale
    };
    let value = -coupling(scenario) * (-0.5 * alpha * alpha).exp() / (8.0 * (2.0 * PI).sqrt() * a.sqrt())
        * bracket_over_beta;
    Ok(Complex64::new(value, 0.0))
}

/// `𝓜⁻ = i λ_Aλ_B e^{-α²/2}/(8√(2π)β) · (e^{-(β+γ)²/2} + e^{-(β-γ)²/2})`
/// for pointlike detectors.
pub fn m_minus_closed(scenario: &Scenario) -> Result<Complex64, HarvestError> {
    require_closed_form(scenario, "m_minus_closed")?;
    if !scenario.pointlike() {
        return Err(HarvestError::UnsupportedScenario { operation: "m_minus_closed", reason: "smeared detectors" });
    }
    let (alpha, beta, gamma) = (scenario.alpha_a(), scenario.beta(), scenario.gamma());
    if beta == 0.0 {
        return Err(HarvestError::CoincidentDetectors);
    }
    let cone = (-0.5 * (beta + gamma).powi(2)).exp() + (-0.5 * (beta - gamma).powi(2)).exp();
    Ok(Complex64::new(0.0, figure_prefactor(alpha, beta, coupling(scenario)) * cone))
}

/// `𝓜` for pointlike identical detectors divided by [`figure_prefactor`]:
/// `-(G(β-γ) + G(β+γ)) + i(e^{-(β-γ)²/2} + e^{-(β+γ)²/2})`.
pub fn scaled_m_closed(beta: f64, gamma: f64) -> Complex64 {
    let g = |u: f64| TWO_OVER_SQRT_PI * dawson(u / SQRT_2);
    let cone = (-0.5 * (beta + gamma).powi(2)).exp() + (-0.5 * (beta - gamma).powi(2)).exp();
    Complex64::new(-(g(beta - gamma) + g(beta + gamma)), cone)
}

/// `𝓜⁺` from two flipped-gap cross-correlation integrals.
pub fn m_plus_identity(scenario: &Scenario, tol: Tolerance) -> Result<QuadratureResult, HarvestError> {
    let (ga, gb) = (scenario.detector_a().gap, scenario.detector_b().gap);
    let ab = l_ij_mode(scenario, DetectorId::A, DetectorId::B, ga, -gb, tol)?;
    let ba = l_ij_mode(scenario, DetectorId::B, DetectorId::A, gb, -ga, tol)?;
    Ok(combine(&ab, &ba, -0.5 * (ab.value + ba.value)))
}

/// `𝓜⁻` with the commutator collapsed onto the light cone.
///
/// Pointlike: `i λ_Aλ_B/(8πL) ∫ S(t, t-L) dt`. Smeared: the relative
/// position of two Gaussian profiles is Gaussian with width
/// `s² = σ_A² + σ_B²`, whose angular average leaves
/// `i λ_Aλ_B/(8π^{3/2} s L) ∫_0^∞ du K(u) ∫ S(t, t-u) dt` with
/// `K(u) = e^{-(u-L)²/s²} - e^{-(u+L)²/s²}`.
pub fn m_minus_integral(scenario: &Scenario, tol: Tolerance) -> Result<QuadratureResult, HarvestError> {
    require_massless(scenario, "m_minus_integral")?;
    let s = scenario.centred();
    let source = symmetrised_source(&s);
    let lam = coupling(&s);
    let l = s.separation();
    let window = TAIL_WIDTHS * s.switch_width();
    let (ta, tb) = (s.detector_a().switch_center, s.detector_b().switch_center);
    // both terms of S(t, t-u) peak at t = (t_A + t_B + u)/2
    let centre = |u: f64| 0.5 * (ta + tb + u);

    if s.pointlike() {
        if l == 0.0 {
            return Err(HarvestError::CoincidentDetectors);
        }
        let c = centre(l);
        let r = integrate_1d(|t| source(t, t - l), c - window, c + window, tol)?;
        let factor = Complex64::new(0.0, lam / (8.0 * PI * l));
        return Ok(QuadratureResult {
            value: factor * r.value,
            error_estimate: factor.norm() * r.error_estimate,
            evaluations: r.evaluations,
        });
    }

    let (sa, sb) = (s.detector_a().smearing, s.detector_b().smearing);
    let s2 = sa * sa + sb * sb;
    let spread = s2.sqrt();
    // K(u)/L, continuous as L → 0
    let kernel = |u: f64| {
        if l > 0.0 {
            (-(u - l).powi(2) / s2).exp() * -(-4.0 * u * l / s2).exp_m1() / l
        } else {
            4.0 * u * (-u * u / s2).exp() / s2
        }
    };
    let u_lo = (l - TAIL_WIDTHS * spread).max(0.0);
    let u_hi = l + TAIL_WIDTHS * spread;
    let domain = Domain2d::new(Rect::new((u_lo, u_hi), (-window, window))).x_breaks(&[l]);
    let r = domain.integrate(
        |u, tau| {
            let t = centre(u) + tau;
            kernel(u) * source(t, t - u)
        },
        tol,
    )?;
    let factor = Complex64::new(0.0, lam / (8.0 * PI.powf(1.5) * spread));
    Ok(QuadratureResult {
        value: factor * r.value,
        error_estimate: factor.norm() * r.error_estimate,
        evaluations: r.evaluations,
    })
}

/// Brute-force `𝓜 = -λ_Aλ_B ∫dt ∫_{t'<t} dt' S(t, t') W(t - t', L)` with the
/// regulated Wightman function, extrapolated to zero regulator.
pub fn m_oracle(scenario: &Scenario, tol: Tolerance) -> Result<OracleEstimate, HarvestError> {
    require_massless(scenario, "m_oracle")?;
    if !scenario.pointlike() {
        return Err(HarvestError::UnsupportedScenario { operation: "m_oracle", reason: "smeared detectors" });
    }
    let s = scenario.centred();
    let l = s.separation();
    if l == 0.0 {
        return Err(HarvestError::CoincidentDetectors);
    }
    let source = symmetrised_source(&s);
    let lam = coupling(&s);
    let window = TAIL_WIDTHS * s.switch_width();
    let (ta, tb) = (s.detector_a().switch_center, s.detector_b().switch_center);
    let rect = Rect::square(ta.min(tb) - window, ta.max(tb) + window);
    let domain = Domain2d::new(rect).ordered(true).diagonal_breaks(&[l]);

    extrapolate(s.regulator(), |eps| {
        let integrand = |t: f64, tp: f64| {
            -lam * source(t, tp) * wightman_pointlike(t - tp, l, eps).expect("validated regulator")
        };
        Ok(domain.integrate(integrand, tol)?)
    })
}

/// `e^{-κ²/2} e^{iγκ} erfc((γ + iκ)/√2)`, with the exponentials merged
/// before evaluation so nothing overflows for large κ or γ.
pub fn e_kernel(kappa: f64, gamma: f64) -> Complex64 {
    let z = Complex64::new(gamma, kappa) / SQRT_2;
    erfc_scaled_by_exp(z, Complex64::new(-0.5 * kappa * kappa, gamma * kappa))
}

/// `√(2/π) ∫_0^∞ sin(βκ) e^{-κ²/2} (E(κ,γ) + E(κ,-γ)) dκ` with
/// `E(κ,γ) = e^{iγκ} erfc((γ + iκ)/√2)`.
///
/// Numerically it reproduces `-`[`scaled_m_closed`] to quadrature
/// precision; the two are computed independently.
pub fn e_integral_reference(beta: f64, gamma: f64, tol: Tolerance) -> Result<QuadratureResult, HarvestError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(HarvestError::InvalidArgument { name: "beta", value: beta });
    }
    if !gamma.is_finite() {
        return Err(HarvestError::InvalidArgument { name: "gamma", value: gamma });
    }
    let norm = (2.0 / PI).sqrt();
    let integrand = |k: f64| norm * (beta * k).sin() * (e_kernel(k, gamma) + e_kernel(k, -gamma));
    // the slow 1/κ tail oscillates only at the frequency β
    Ok(integrate_semi_infinite_oscillatory(integrand, 2.0 * PI / beta, tol)?)
}
