//! Leading-order joint state of two detectors coupled to the vacuum.
//!
//! The correlation term `𝓜` (the `|ee⟩⟨gg|` corner) is split into the
//! anticommutator part `𝓜⁺` and the commutator part `𝓜⁻`. `𝓜⁺` is
//! computed either in closed form or from two cross-correlation terms
//! with one gap flipped,
//!
//! `𝓜⁺ = -½ (𝓛_AB[Ω_A, -Ω_B] + 𝓛_BA[Ω_B, -Ω_A])`,
//!
//! each a single wavenumber integral. `𝓜⁻` collapses onto the light cone.
//! The brute-force references integrate the regulated Wightman function
//! over two times and extrapolate the regulator to zero.
//!
//! Every quantity is evaluated in the frame where the switching midpoint
//! is `t = 0`; [`Scenario::correlation_phase`] and
//! [`Scenario::cross_phase`] move results back to the lab frame.

mod compare;
mod correlations;
mod entangling;
mod state;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelError;
use crate::quad::{QuadError, QuadratureResult, Tolerance};

pub use compare::{compare_methods, ComparisonEntry, ComparisonReport};
pub use correlations::{l_aa_closed, l_ij_mode, l_ij_oracle};
pub use entangling::{
    e_integral_reference, e_kernel, figure_prefactor, m_minus_closed, m_minus_integral, m_oracle,
    m_plus_closed, m_plus_identity, scaled_m_closed,
};
pub use state::{
    assemble_rho, compute_blocks, compute_blocks_with, negativity, BlockEntry, DensityMatrixBlocks, EntryMethod, Method,
    PerturbativityWarning, TwoDetectorState,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarvestError {
    #[error("{operation} does not support this scenario: {reason}")]
    UnsupportedScenario { operation: &'static str, reason: &'static str },
    #[error("pointlike detectors at zero separation: the commutator term diverges")]
    CoincidentDetectors,
    #[error("invalid argument {name} = {value}")]
    InvalidArgument { name: &'static str, value: f64 },
    #[error("regulator extrapolation unstable: difference ratio {ratio:.3}, expected 2 ± 0.5")]
    ExtrapolationUnstable { ratio: f64, ladder: Vec<LadderPoint> },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl HarvestError {
    pub fn is_budget(&self) -> bool {
        matches!(self, HarvestError::Quadrature(QuadError::BudgetExhausted { .. }))
            || matches!(self, HarvestError::Model(ModelError::Quadrature(QuadError::BudgetExhausted { .. })))
    }
}

/// Regulator ladder, in units of the base regulator.
pub const REGULATOR_LADDER: [f64; 3] = [4.0, 2.0, 1.0];

/// Default accuracy of the wavenumber and light-cone integrals.
pub fn fast_tolerance() -> Tolerance {
    Tolerance { abs_tol: 1e-300, rel_tol: 1e-12, max_evaluations: 2_000_000 }
}

/// Accuracy target and budget for [`compare_methods`].
pub fn comparison_tolerance(target_rel: f64) -> Tolerance {
    Tolerance { abs_tol: 1e-300, rel_tol: target_rel, max_evaluations: 50_000_000 }
}

/// Default accuracy of the double-time references.
pub fn oracle_tolerance() -> Tolerance {
    Tolerance { abs_tol: 1e-300, rel_tol: 1e-7, max_evaluations: 50_000_000 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub epsilon: f64,
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// A regulated double-time integral extrapolated to zero regulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// First-order extrapolation from the two smallest regulators.
    pub linear: Complex64,
    /// `(I(4ε) - I(2ε)) / (I(2ε) - I(ε))`; 2 for a bias linear in ε.
    pub difference_ratio: f64,
    pub ladder: Vec<LadderPoint>,
}

impl OracleEstimate {
    pub fn as_result(&self) -> QuadratureResult {
        QuadratureResult { value: self.value, error_estimate: self.error_estimate, evaluations: self.evaluations }
    }
}

/// Evaluates `integral(ε)` on the ladder and removes the O(ε) and O(ε²)
/// terms with a Richardson table.
fn extrapolate<F>(base: f64, mut integral: F) -> Result<OracleEstimate, HarvestError>
where
    F: FnMut(f64) -> Result<QuadratureResult, HarvestError>,
{
    let mut ladder = Vec::with_capacity(REGULATOR_LADDER.len());
    for m in REGULATOR_LADDER {
        let epsilon = m * base;
        let r = integral(epsilon)?;
        ladder.push(LadderPoint { epsilon, value: r.value, error_estimate: r.error_estimate, evaluations: r.evaluations });
    }
    let [i4, i2, i1] = [ladder[0].value, ladder[1].value, ladder[2].value];
    let quad_err: f64 = ladder.iter().map(|p| p.error_estimate).sum();
    let lin_fine = 2.0 * i1 - i2;
    let lin_coarse = 2.0 * i2 - i4;
    let value = (4.0 * lin_fine - lin_coarse) / 3.0;
    let d_coarse = (i4 - i2).norm();
    let d_fine = (i2 - i1).norm();
    let difference_ratio = if d_fine > 0.0 { d_coarse / d_fine } else { f64::INFINITY };
    let evaluations = ladder.iter().map(|p| p.evaluations).sum();

    // ratios are meaningless once the differences sink into quadrature noise
    let resolved = d_fine > 100.0 * quad_err;
    if resolved && !(1.5..=2.5).contains(&difference_ratio) {
        return Err(HarvestError::ExtrapolationUnstable { ratio: difference_ratio, ladder });
    }
    Ok(OracleEstimate {
        value,
        // the table weights (8, -6, 1)/3 amplify quadrature error
        error_estimate: (value - lin_fine).norm() + 5.0 * quad_err,
        evaluations,
        linear: lin_fine,
        difference_ratio,
        ladder,
    })
}

fn combine(a: &QuadratureResult, b: &QuadratureResult, value: Complex64) -> QuadratureResult {
    QuadratureResult {
        value,
        error_estimate: a.error_estimate + b.error_estimate,
        evaluations: a.evaluations + b.evaluations,
    }
}
