//! Cross-correlation terms `𝓛_IJ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{extrapolate, HarvestError, OracleEstimate};
use crate::model::{minkowski_mode_family, wightman_pointlike, DetectorId, ModeFamily, Scenario};
use crate::quad::{integrate_semi_infinite_oscillatory, Domain2d, QuadratureResult, Rect, Tolerance};
use crate::specfun::{erfc_complex, faddeeva_w};

/// Half-width of the switching window kept in time integrals, in units of T.
pub(super) const TAIL_WIDTHS: f64 = 8.0;

fn pair_separation(s: &Scenario, i: DetectorId, j: DetectorId) -> f64 {
    if i == j {
        0.0
    } else {
        s.separation()
    }
}

/// `𝓛_IJ = λ_Iλ_J ∫∫ χ_I(t)χ_J(t') e^{i(Ω_I t - Ω_J t')} W(t', x_J; t, x_I)`
/// as one wavenumber integral over the field modes.
///
/// `gap_i` and `gap_j` override the detector gaps, so flipped-gap
/// evaluations use the same routine.
pub fn l_ij_mode(
    scenario: &Scenario,
    i: DetectorId,
    j: DetectorId,
    gap_i: f64,
    gap_j: f64,
    tol: Tolerance,
) -> Result<QuadratureResult, HarvestError> {
    let s = scenario.centred();
    let (di, dj) = (s.detector(i), s.detector(j));
    let r = pair_separation(&s, i, j);
    let family = minkowski_mode_family(s.mass())?;
    let coupling = di.coupling * dj.coupling;
    // Gaussian smearing contributes e^{-k²σ²/4} per detector
    let smear = 0.25 * (di.smearing * di.smearing + dj.smearing * dj.smearing);

    let term = |k: f64| {
        let w = family.energy(k);
        let weight = family.pair_weight(k, r) * (-smear * k * k).exp();
        let from_i = di.switching_transform(-(w + gap_i));
        let from_j = dj.switching_transform(w + gap_j);
        coupling * weight * from_i * from_j
    };
    let delay = (di.switch_center - dj.switch_center).abs();
    let wavelength = 2.0 * PI / (r + delay + 1.0 / s.switch_width());
    Ok(integrate_semi_infinite_oscillatory(term, wavelength, tol)?)
}

/// Closed form of `𝓛_AA` for a pointlike detector in the massless vacuum:
/// `λ²/(4π)·[e^{-α²/2} - α√(π/2)·erfc(α/√2)]`.
pub fn l_aa_closed(alpha: f64, coupling: f64) -> f64 {
    let x = alpha / std::f64::consts::SQRT_2;
    let tail = if alpha >= 0.0 {
        // erfc(x) = e^{-x²} w(ix)
        let scaled = faddeeva_w(Complex64::new(0.0, x)).re;
        (-0.5 * alpha * alpha).exp() * (1.0 - alpha * (PI / 2.0).sqrt() * scaled)
    } else {
        (-0.5 * alpha * alpha).exp() - alpha * (PI / 2.0).sqrt() * erfc_complex(Complex64::new(x, 0.0)).re
    };
    coupling * coupling / (4.0 * PI) * tail
}

/// Brute-force `𝓛_IJ`: the unordered double time integral of the
/// regulated Wightman function, extrapolated to zero regulator.
pub fn l_ij_oracle(
    scenario: &Scenario,
    i: DetectorId,
    j: DetectorId,
    gap_i: f64,
    gap_j: f64,
    tol: Tolerance,
) -> Result<OracleEstimate, HarvestError> {
    if !scenario.pointlike() {
        return Err(HarvestError::UnsupportedScenario { operation: "l_ij_oracle", reason: "smeared detectors" });
    }
    if scenario.mass() != 0.0 {
        return Err(HarvestError::UnsupportedScenario { operation: "l_ij_oracle", reason: "massive field" });
    }
    let s = scenario.centred();
    let (di, dj) = (*s.detector(i), *s.detector(j));
    let r = pair_separation(&s, i, j);
    let coupling = di.coupling * dj.coupling;
    let width = TAIL_WIDTHS * s.switch_width();
    let rect = Rect::new(
        (di.switch_center - width, di.switch_center + width),
        (dj.switch_center - width, dj.switch_center + width),
    );
    let cones: Vec<f64> = if r == 0.0 { vec![0.0] } else { vec![-r, r] };
    let domain = Domain2d::new(rect).diagonal_breaks(&cones);

    extrapolate(s.regulator(), |eps| {
        let integrand = |t: f64, tp: f64| {
            let phase = Complex64::from_polar(1.0, gap_i * t - gap_j * tp);
            let w = wightman_pointlike(tp - t, r, eps).expect("validated regulator");
            coupling * di.switching(t) * dj.switching(tp) * phase * w
        };
        Ok(domain.integrate(integrand, tol)?)
    })
}
