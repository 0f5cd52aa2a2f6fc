//! Fast paths against the double-time references.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    l_ij_mode, l_ij_oracle, m_minus_integral, m_oracle, m_plus_identity, HarvestError, LadderPoint,
    OracleEstimate,
};
use crate::model::{DetectorId, Scenario};
use crate::quad::{QuadratureResult, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub quantity: String,
    pub fast_value: Option<Complex64>,
    pub oracle_value: Option<Complex64>,
    pub abs_deviation: Option<f64>,
    pub rel_deviation: Option<f64>,
    pub fast_error_estimate: Option<f64>,
    pub oracle_error_estimate: Option<f64>,
    pub evaluations_fast: usize,
    pub evaluations_oracle: usize,
    pub wall_time_fast_s: f64,
    pub wall_time_oracle_s: f64,
    /// Regulated values the oracle was extrapolated from.
    pub oracle_ladder: Vec<LadderPoint>,
    pub oracle_linear: Option<Complex64>,
    pub oracle_difference_ratio: Option<f64>,
    pub error: Option<String>,
}

impl ComparisonEntry {
    fn new(
        quantity: &str,
        fast: (Result<QuadratureResult, HarvestError>, f64),
        oracle: (Result<OracleEstimate, HarvestError>, f64),
    ) -> Self {
        let (fast, wall_time_fast_s) = fast;
        let (oracle, wall_time_oracle_s) = oracle;
        let mut errors = Vec::new();
        let fast = fast.map_err(|e| errors.push(format!("fast: {e}"))).ok();
        let oracle = oracle.map_err(|e| errors.push(format!("oracle: {e}"))).ok();
        let fast_value = fast.map(|r| r.value);
        let oracle_value = oracle.as_ref().map(|o| o.value);
        let abs_deviation = fast_value.zip(oracle_value).map(|(f, o)| (f - o).norm());
        let rel_deviation = abs_deviation.zip(oracle_value).map(|(d, o)| d / o.norm());
        Self {
            quantity: quantity.to_string(),
            fast_value,
            oracle_value,
            abs_deviation,
            rel_deviation,
            fast_error_estimate: fast.map(|r| r.error_estimate),
            oracle_error_estimate: oracle.as_ref().map(|o| o.error_estimate),
            evaluations_fast: fast.map_or(0, |r| r.evaluations),
            evaluations_oracle: oracle.as_ref().map_or(0, |o| o.evaluations),
            wall_time_fast_s,
            wall_time_oracle_s,
            oracle_ladder: oracle.as_ref().map(|o| o.ladder.clone()).unwrap_or_default(),
            oracle_linear: oracle.as_ref().map(|o| o.linear),
            oracle_difference_ratio: oracle.as_ref().map(|o| o.difference_ratio),
            error: (!errors.is_empty()).then(|| errors.join("; ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub beta: f64,
    pub gamma: f64,
    pub target_rel: f64,
    pub entries: Vec<ComparisonEntry>,
    /// Oracle over fast evaluation count for `𝓜`.
    pub evaluation_ratio: Option<f64>,
    /// Oracle over fast wall time for `𝓜`.
    pub speedup: Option<f64>,
}

impl ComparisonReport {
    pub fn entry(&self, quantity: &str) -> Option<&ComparisonEntry> {
        self.entries.iter().find(|e| e.quantity == quantity)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Runs the fast paths and the references at matched target accuracy
/// `tol.rel_tol`; `tol.max_evaluations` bounds every single integration.
///
/// Failures are recorded per entry; the call itself only fails for
/// scenarios the references cannot handle at all.
pub fn compare_methods(scenario: &Scenario, tol: Tolerance) -> Result<ComparisonReport, HarvestError> {
    let target_rel = tol.rel_tol;
    if !scenario.pointlike() {
        return Err(HarvestError::UnsupportedScenario { operation: "compare_methods", reason: "smeared detectors" });
    }
    if !(target_rel > 0.0 && target_rel < 1.0) {
        return Err(HarvestError::InvalidArgument { name: "target_rel", value: target_rel });
    }
    let s = scenario.with_couplings(1.0, 1.0);
    let fast_tol = Tolerance { rel_tol: target_rel / 10.0, ..tol };
    // extrapolation amplifies quadrature noise; the references need headroom
    let oracle_tol = Tolerance { rel_tol: target_rel / 1000.0, ..tol };
    let (ga, gb) = (s.detector_a().gap, s.detector_b().gap);
    use DetectorId::{A, B};

    let mut entries = Vec::new();
    for (name, i, j, gi, gj) in [("l_aa", A, A, ga, ga), ("l_bb", B, B, gb, gb), ("l_ab", A, B, ga, gb)] {
        entries.push(ComparisonEntry::new(
            name,
            timed(|| l_ij_mode(&s, i, j, gi, gj, fast_tol)),
            timed(|| l_ij_oracle(&s, i, j, gi, gj, oracle_tol)),
        ));
    }
    let fast_m = timed(|| {
        let plus = m_plus_identity(&s, fast_tol)?;
        let minus = m_minus_integral(&s, fast_tol)?;
        Ok(QuadratureResult {
            value: plus.value + minus.value,
            error_estimate: plus.error_estimate + minus.error_estimate,
            evaluations: plus.evaluations + minus.evaluations,
        })
    });
    let m = ComparisonEntry::new("m", fast_m, timed(|| m_oracle(&s, oracle_tol)));
    let ok = m.fast_value.is_some() && m.oracle_value.is_some();
    let evaluation_ratio = ok.then(|| m.evaluations_oracle as f64 / m.evaluations_fast.max(1) as f64);
    let speedup = ok.then(|| m.wall_time_oracle_s / m.wall_time_fast_s.max(1e-9));
    entries.push(m);

    Ok(ComparisonReport {
        alpha_a: s.alpha_a(),
        alpha_b: s.alpha_b(),
        beta: s.beta(),
        gamma: s.gamma(),
        target_rel,
        entries,
        evaluation_ratio,
        speedup,
    })
}
