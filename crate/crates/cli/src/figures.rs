//! Data behind the published curves: the scaled correlation term against
//! the numerically integrated reference, and its two parts on the cone.

use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use udw_core::harvest::{
    e_integral_reference, figure_prefactor, m_minus_closed, m_plus_closed, scaled_m_closed, HarvestError,
};
use udw_core::model::{DimensionlessParams, Scenario};
use udw_core::quad::Tolerance;

use crate::table::{complex, optional, real, to_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Scaled term vs reference at β = 1.
    Fig1,
    /// β = 5.
    Fig2,
    /// β = 10.
    Fig3,
    /// Anticommutator and commutator parts at β = 5.
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }

    pub fn beta(self) -> f64 {
        match self {
            Figure::Fig1 => 1.0,
            Figure::Fig2 | Figure::Fig4 => 5.0,
            Figure::Fig3 => 10.0,
        }
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Figure::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown figure {s:?}"))
    }
}

pub const GAMMA_MAX: f64 = 20.0;
pub const GAMMA_POINTS: usize = 201;

pub fn gamma_grid() -> Vec<f64> {
    (0..GAMMA_POINTS).map(|i| GAMMA_MAX * i as f64 / (GAMMA_POINTS - 1) as f64).collect()
}

fn reference_tolerance() -> Tolerance {
    Tolerance { abs_tol: 1e-14, rel_tol: 1e-10, max_evaluations: 2_000_000 }
}

/// One point of the curves of figures 1–3. The published curves plot the
/// bracket `-𝓜̃`, which is what the reference integral reproduces.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub gamma: f64,
    pub scaled: Complex64,
    pub reference: Result<Complex64, HarvestError>,
}

impl CurvePoint {
    pub fn bracket(&self) -> Complex64 {
        -self.scaled
    }

    pub fn deviation(&self) -> Option<f64> {
        self.reference.as_ref().ok().map(|r| (r - self.bracket()).norm())
    }
}

pub fn curve(beta: f64) -> Vec<CurvePoint> {
    gamma_grid()
        .into_par_iter()
        .map(|gamma| CurvePoint {
            gamma,
            scaled: scaled_m_closed(beta, gamma),
            reference: e_integral_reference(beta, gamma, reference_tolerance()).map(|r| r.value),
        })
        .collect()
}

/// Largest reference deviation relative to the largest bracket magnitude.
pub fn curve_deviation(points: &[CurvePoint]) -> Option<(f64, f64)> {
    let max = points.iter().map(|p| p.bracket().norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for p in points {
        worst = worst.max(p.deviation()?);
    }
    Some((worst, max))
}

/// `𝓜⁺` and `𝓜⁻/i`, both divided by the common prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartsPoint {
    pub gamma: f64,
    pub plus: f64,
    pub minus_over_i: f64,
}

pub type ClosedForm = fn(&Scenario) -> Result<Complex64, HarvestError>;

pub fn parts(beta: f64) -> Result<Vec<PartsPoint>, HarvestError> {
    parts_with(beta, m_plus_closed, m_minus_closed)
}

/// [`parts`] with the closed forms supplied by the caller.
pub fn parts_with(beta: f64, m_plus: ClosedForm, m_minus: ClosedForm) -> Result<Vec<PartsPoint>, HarvestError> {
    let prefactor = figure_prefactor(0.0, beta, 1.0);
    gamma_grid()
        .into_iter()
        .map(|gamma| {
            let s = Scenario::from_dimensionless(&DimensionlessParams::symmetric(0.0, beta, gamma, 0.0))?;
            Ok(PartsPoint {
                gamma,
                plus: m_plus(&s)?.re / prefactor,
                minus_over_i: m_minus(&s)?.im / prefactor,
            })
        })
        .collect()
}

pub fn csv(figure: Figure) -> Result<String, HarvestError> {
    let names = |cols: &[&str]| cols.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    if figure == Figure::Fig4 {
        let header = names(&["gamma", "m_plus_scaled", "m_minus_scaled_over_i"]);
        let rows: Vec<Vec<String>> =
            parts(figure.beta())?.iter().map(|p| vec![real(p.gamma), real(p.plus), real(p.minus_over_i)]).collect();
        return Ok(to_csv(&header, &rows));
    }
    let header = names(&[
        "gamma",
        "re_m_scaled",
        "im_m_scaled",
        "re_bracket",
        "im_bracket",
        "re_reference",
        "im_reference",
        "abs_deviation",
        "error",
    ]);
    let rows: Vec<Vec<String>> = curve(figure.beta())
        .iter()
        .map(|p| {
            let mut row = vec![real(p.gamma)];
            row.extend(complex(Some(p.scaled)));
            row.extend(complex(Some(p.bracket())));
            row.extend(complex(p.reference.clone().ok()));
            row.push(optional(p.deviation()));
            row.push(p.reference.as_ref().err().map(|e| e.to_string()).unwrap_or_default());
            row
        })
        .collect();
    Ok(to_csv(&header, &rows))
}
