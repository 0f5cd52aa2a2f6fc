//! Density-matrix blocks, the assembled two-detector state and negativity.

use std::fmt;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    fast_tolerance, l_ij_mode, l_ij_oracle, m_minus_closed, m_minus_integral, m_oracle, m_plus_closed,
    m_plus_identity, oracle_tolerance, HarvestError,
};
use crate::model::{DetectorId, Scenario};
use crate::quad::{QuadratureResult, Tolerance};

/// How the blocks are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed forms where they exist, wavenumber integrals otherwise.
    Closed,
    /// Flipped-gap identity for `𝓜⁺`, light-cone integral for `𝓜⁻`.
    Identity,
    /// Regulated double-time integrals.
    Oracle,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Closed, Method::Identity, Method::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Identity => "identity",
            Method::Oracle => "oracle",
        }
    }
}

/// Provenance of one block entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryMethod {
    ClosedForm,
    ModeIntegral,
    FlippedGapIdentity,
    LightConeIntegral,
    RegulatedDoubleIntegral,
    /// Sum of two other entries.
    Assembled,
}

impl EntryMethod {
    pub fn name(self) -> &'static str {
        match self {
            EntryMethod::ClosedForm => "closed_form",
            EntryMethod::ModeIntegral => "mode_integral",
            EntryMethod::FlippedGapIdentity => "flipped_gap_identity",
            EntryMethod::LightConeIntegral => "light_cone_integral",
            EntryMethod::RegulatedDoubleIntegral => "regulated_double_integral",
            EntryMethod::Assembled => "assembled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub method: EntryMethod,
}

impl BlockEntry {
    fn exact(value: Complex64) -> Self {
        Self { value, error_estimate: 0.0, evaluations: 0, method: EntryMethod::ClosedForm }
    }

    fn from_result(r: &QuadratureResult, method: EntryMethod) -> Self {
        Self { value: r.value, error_estimate: r.error_estimate, evaluations: r.evaluations, method }
    }
}

/// Second-order blocks per unit coupling: `𝓛_AA, 𝓛_BB` per `λ²`, the rest
/// per `λ_Aλ_B`. `m_total = m_plus + m_minus` whenever the parts exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixBlocks {
    pub l_aa: BlockEntry,
    pub l_bb: BlockEntry,
    pub l_ab: BlockEntry,
    pub m_plus: Option<BlockEntry>,
    pub m_minus: Option<BlockEntry>,
    pub m_total: BlockEntry,
}

impl DensityMatrixBlocks {
    pub fn l_ba(&self) -> Complex64 {
        self.l_ab.value.conj()
    }

    /// Blocks with the given values and no provenance; for tests and
    /// hand-built states.
    pub fn from_values(l_aa: f64, l_bb: f64, l_ab: Complex64, m: Complex64) -> Self {
        Self {
            l_aa: BlockEntry::exact(Complex64::new(l_aa, 0.0)),
            l_bb: BlockEntry::exact(Complex64::new(l_bb, 0.0)),
            l_ab: BlockEntry::exact(l_ab),
            m_plus: None,
            m_minus: None,
            m_total: BlockEntry::exact(m),
        }
    }

    /// Integrand evaluations spent on all entries.
    pub fn evaluations(&self) -> usize {
        [&self.l_aa, &self.l_bb, &self.l_ab, &self.m_total].iter().map(|e| e.evaluations).sum()
    }
}

fn with_parts(l_aa: BlockEntry, l_bb: BlockEntry, l_ab: BlockEntry, plus: BlockEntry, minus: BlockEntry) -> DensityMatrixBlocks {
    let m_total = BlockEntry {
        value: plus.value + minus.value,
        error_estimate: plus.error_estimate + minus.error_estimate,
        evaluations: plus.evaluations + minus.evaluations,
        method: EntryMethod::Assembled,
    };
    DensityMatrixBlocks { l_aa, l_bb, l_ab, m_plus: Some(plus), m_minus: Some(minus), m_total }
}

/// Computes every block for the scenario at unit couplings.
pub fn compute_blocks(scenario: &Scenario, method: Method) -> Result<DensityMatrixBlocks, HarvestError> {
    compute_blocks_with(scenario, method, fast_tolerance(), oracle_tolerance())
}

/// [`compute_blocks`] with explicit tolerances for the single integrals
/// (`fast`) and the regulated double integrals (`oracle`).
pub fn compute_blocks_with(
    scenario: &Scenario,
    method: Method,
    fast: Tolerance,
    oracle: Tolerance,
) -> Result<DensityMatrixBlocks, HarvestError> {
    let s = scenario.with_couplings(1.0, 1.0);
    let (ga, gb) = (s.detector_a().gap, s.detector_b().gap);
    use DetectorId::{A, B};

    if method == Method::Oracle {
        let tol = oracle;
        let entry = |r: QuadratureResult| BlockEntry::from_result(&r, EntryMethod::RegulatedDoubleIntegral);
        return Ok(DensityMatrixBlocks {
            l_aa: entry(l_ij_oracle(&s, A, A, ga, ga, tol)?.as_result()),
            l_bb: entry(l_ij_oracle(&s, B, B, gb, gb, tol)?.as_result()),
            l_ab: entry(l_ij_oracle(&s, A, B, ga, gb, tol)?.as_result()),
            m_plus: None,
            m_minus: None,
            m_total: entry(m_oracle(&s, tol)?.as_result()),
        });
    }

    let mode = |i, j, gi, gj| -> Result<BlockEntry, HarvestError> {
        Ok(BlockEntry::from_result(&l_ij_mode(&s, i, j, gi, gj, fast)?, EntryMethod::ModeIntegral))
    };
    let l_aa = mode(A, A, ga, ga)?;
    let l_bb = mode(B, B, gb, gb)?;
    let l_ab = mode(A, B, ga, gb)?;
    let identity = || -> Result<BlockEntry, HarvestError> {
        Ok(BlockEntry::from_result(&m_plus_identity(&s, fast)?, EntryMethod::FlippedGapIdentity))
    };
    let light_cone = || -> Result<BlockEntry, HarvestError> {
        Ok(BlockEntry::from_result(&m_minus_integral(&s, fast)?, EntryMethod::LightConeIntegral))
    };

    let (plus, minus) = match method {
        Method::Closed => {
            let plus = match m_plus_closed(&s) {
                Ok(v) => BlockEntry::exact(v),
                Err(HarvestError::UnsupportedScenario { .. }) => identity()?,
                Err(e) => return Err(e),
            };
            let minus = match m_minus_closed(&s) {
                Ok(v) => BlockEntry::exact(v),
                Err(HarvestError::UnsupportedScenario { .. }) => light_cone()?,
                Err(e) => return Err(e),
            };
            (plus, minus)
        }
        _ => (identity()?, light_cone()?),
    };
    Ok(with_parts(l_aa, l_bb, l_ab, plus, minus))
}

/// Raised when a block is too large for the second-order expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativityWarning {
    pub largest_block: f64,
}

impl fmt::Display for PerturbativityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block magnitude {:.3e} exceeds 0.1; fourth-order terms are not negligible", self.largest_block)
    }
}

/// Two-detector density matrix in the basis `|gg⟩, |eg⟩, |ge⟩, |ee⟩`
/// (first label detector A), i.e. index `a + 2b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoDetectorState {
    pub matrix: [[Complex64; 4]; 4],
}

impl TwoDetectorState {
    /// Sum of the diagonal, singly-excited populations added first.
    pub fn trace(&self) -> Complex64 {
        let m = &self.matrix;
        (m[0][0] + (m[1][1] + m[2][2])) + m[3][3]
    }

    pub fn is_hermitian(&self) -> bool {
        (0..4).all(|r| (0..4).all(|c| self.matrix[r][c] == self.matrix[c][r].conj()))
    }

    /// Partial transpose on detector B: swaps the `b` labels of row and
    /// column.
    pub fn partial_transpose_b(&self) -> [[Complex64; 4]; 4] {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (row, out_row) in out.iter_mut().enumerate() {
            for (col, v) in out_row.iter_mut().enumerate() {
                let (a, b) = (row % 2, row / 2);
                let (ap, bp) = (col % 2, col / 2);
                *v = self.matrix[a + 2 * bp][ap + 2 * b];
            }
        }
        out
    }
}

/// Fills the second-order state from per-unit-coupling blocks.
///
/// The top-left entry is `1 - 𝓛_AA - 𝓛_BB`, nudged by ulps so that
/// [`TwoDetectorState::trace`] is exactly one.
pub fn assemble_rho(
    blocks: &DensityMatrixBlocks,
    lambda_a: f64,
    lambda_b: f64,
) -> (TwoDetectorState, Option<PerturbativityWarning>) {
    let zero = Complex64::new(0.0, 0.0);
    let l_aa = lambda_a * lambda_a * blocks.l_aa.value.re;
    let l_bb = lambda_b * lambda_b * blocks.l_bb.value.re;
    let l_ab = lambda_a * lambda_b * blocks.l_ab.value;
    let m = lambda_a * lambda_b * blocks.m_total.value;

    // fl(fl(1 - s) + s) = 1 whenever 0 ≤ s ≤ 1; the nudge covers the rest
    let excited = l_aa + l_bb;
    let mut top = 1.0 - excited;
    for _ in 0..64 {
        let trace = top + excited;
        if trace == 1.0 {
            break;
        }
        top = if trace > 1.0 { top.next_down() } else { top.next_up() };
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let matrix = [
        [c(top), zero, zero, m.conj()],
        [zero, c(l_aa), l_ab, zero],
        [zero, l_ab.conj(), c(l_bb), zero],
        [m, zero, zero, zero],
    ];
    let largest = [l_aa.abs(), l_bb.abs(), l_ab.norm(), m.norm()].into_iter().fold(0.0, f64::max);
    let warning = (largest > 0.1).then_some(PerturbativityWarning { largest_block: largest });
    (TwoDetectorState { matrix }, warning)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose.
pub fn negativity(state: &TwoDetectorState) -> f64 {
    let pt = state.partial_transpose_b();
    let m = Matrix4::from_fn(|r, c| pt[r][c]);
    let eig = SymmetricEigen::new(m);
    eig.eigenvalues.iter().filter(|&&e| e < 0.0).map(|e| -e).sum()
}

