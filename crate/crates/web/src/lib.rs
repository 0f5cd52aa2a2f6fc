//! Browser bindings for the interactive demo in `www/`.
//!
//! Every export returns a flat `Float64Array`, one record per grid point,
//! so the page can plot without any marshalling beyond slicing.

use udw_core::harvest::{
    assemble_rho, e_integral_reference, fast_tolerance, figure_prefactor, l_aa_closed, l_ij_mode, m_minus_closed,
    m_plus_closed, negativity, scaled_m_closed, DensityMatrixBlocks, HarvestError,
};
use udw_core::model::{DetectorId, DimensionlessParams, Scenario};
use udw_core::quad::Tolerance;
use wasm_bindgen::prelude::*;

/// Doubles per point returned by [`m_curves`].
pub const CURVE_STRIDE: usize = 5;
/// Doubles per point returned by [`reference_curve`].
pub const REFERENCE_STRIDE: usize = 3;

const MAX_POINTS: usize = 4001;

fn grid(max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be between 2 and {MAX_POINTS}"));
    }
    if !(max.is_finite() && max > 0.0) {
        return Err("range must be positive".into());
    }
    Ok((0..points).map(|i| max * i as f64 / (points - 1) as f64).collect())
}

fn scenario(alpha: f64, beta: f64, gamma: f64) -> Result<Scenario, HarvestError> {
    Ok(Scenario::from_dimensionless(&DimensionlessParams::symmetric(alpha, beta, gamma, 0.0))?)
}

/// Per γ: `γ, Re bracket, Im bracket, 𝓜⁺/prefactor, 𝓜⁻/(i·prefactor)`, where
/// the bracket is `-𝓜` over the common prefactor.
pub fn curves(beta: f64, gamma_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err("beta must be positive".into());
    }
    let prefactor = figure_prefactor(0.0, beta, 1.0);
    let mut out = Vec::with_capacity(points * CURVE_STRIDE);
    for gamma in grid(gamma_max, points)? {
        let s = scenario(0.0, beta, gamma).map_err(|e| e.to_string())?;
        let bracket = -scaled_m_closed(beta, gamma);
        let plus = m_plus_closed(&s).map_err(|e| e.to_string())?.re / prefactor;
        let minus = m_minus_closed(&s).map_err(|e| e.to_string())?.im / prefactor;
        out.extend([gamma, bracket.re, bracket.im, plus, minus]);
    }
    Ok(out)
}

/// Per γ: `γ, Re, Im` of the numerically integrated reference curve.
pub fn reference(beta: f64, gamma_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let tol = Tolerance { abs_tol: 1e-12, rel_tol: 1e-8, max_evaluations: 500_000 };
    let mut out = Vec::with_capacity(points * REFERENCE_STRIDE);
    for gamma in grid(gamma_max, points)? {
        let r = e_integral_reference(beta, gamma, tol).map_err(|e| e.to_string())?;
        out.extend([gamma, r.value.re, r.value.im]);
    }
    Ok(out)
}

/// Negativity of identical pointlike detectors on a `size × size` grid,
/// row-major with β along rows (from `beta_max / size`) and γ along
/// columns (from 0).
pub fn negativity_grid(alpha: f64, coupling: f64, beta_max: f64, gamma_max: f64, size: usize) -> Result<Vec<f64>, String> {
    if !(1..=200).contains(&size) {
        return Err("size must be between 1 and 200".into());
    }
    if !(coupling.is_finite() && coupling > 0.0) {
        return Err("coupling must be positive".into());
    }
    if !(beta_max.is_finite() && beta_max > 0.0 && gamma_max.is_finite() && gamma_max >= 0.0) {
        return Err("ranges must be positive".into());
    }
    let l_aa = l_aa_closed(alpha, 1.0);
    let mut out = Vec::with_capacity(size * size);
    for i in 0..size {
        // β = 0 diverges for pointlike detectors; start one step in
        let beta = beta_max * (i + 1) as f64 / size as f64;
        for j in 0..size {
            let gamma = if size == 1 { 0.0 } else { gamma_max * j as f64 / (size - 1) as f64 };
            let s = scenario(alpha, beta, gamma).map_err(|e| e.to_string())?;
            let gap = s.detector_a().gap;
            let l_ab = l_ij_mode(&s, DetectorId::A, DetectorId::B, gap, gap, fast_tolerance()).map_err(|e| e.to_string())?;
            let m = m_plus_closed(&s).map_err(|e| e.to_string())? + m_minus_closed(&s).map_err(|e| e.to_string())?;
            let blocks = DensityMatrixBlocks::from_values(l_aa, l_aa, l_ab.value, m);
            let (rho, _) = assemble_rho(&blocks, coupling, coupling);
            out.push(negativity(&rho));
        }
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn m_curves(beta: f64, gamma_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    curves(beta, gamma_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn reference_curve(beta: f64, gamma_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    reference(beta, gamma_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn negativity_map(alpha: f64, coupling: f64, beta_max: f64, gamma_max: f64, size: usize) -> Result<Vec<f64>, JsError> {
    negativity_grid(alpha, coupling, beta_max, gamma_max, size).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_the_documented_layout() {
        let c = curves(5.0, 20.0, 201).unwrap();
        assert_eq!(c.len(), 201 * CURVE_STRIDE);
        assert_eq!(c[CURVE_STRIDE * 200], 20.0);
        // on the cone the commutator part peaks
        let peak = c.chunks(CURVE_STRIDE).max_by(|a, b| a[4].total_cmp(&b[4])).unwrap()[0];
        assert!((peak - 5.0).abs() <= 0.5);
    }

    #[test]
    fn reference_tracks_the_bracket() {
        let c = curves(1.0, 4.0, 9).unwrap();
        let r = reference(1.0, 4.0, 9).unwrap();
        for (a, b) in c.chunks(CURVE_STRIDE).zip(r.chunks(REFERENCE_STRIDE)) {
            assert!((a[1] - b[1]).abs() < 1e-6 && (a[2] - b[2]).abs() < 1e-6, "{a:?} {b:?}");
        }
    }

    #[test]
    fn negativity_grid_is_non_negative() {
        let g = negativity_grid(1.0, 1.0, 6.0, 6.0, 4).unwrap();
        assert_eq!(g.len(), 16);
        assert!(g.iter().all(|&n| n >= 0.0));
        assert!(g.iter().any(|&n| n > 0.0));
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(curves(0.0, 20.0, 10).is_err());
        assert!(curves(1.0, 20.0, 1).is_err());
        assert!(negativity_grid(1.0, 1.0, 6.0, 6.0, 0).is_err());
    }
}
