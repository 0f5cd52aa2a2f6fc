//! Detectors, scenarios and the vacuum two-point kernels of a free scalar
//! field in flat spacetime (c = 1).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{self, QuadError, QuadratureResult, Tolerance};

/// `π^{1/2}`
const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("detectors must share the switching width (got {a} and {b})")]
    UnequalSwitchWidth { a: f64, b: f64 },
    #[error("point (dt = {dt}, r = {r}) lies on the light cone")]
    OnLightCone { dt: f64, r: f64 },
    #[error("light-cone distribution needs r > 0, got {0}")]
    InvalidRadius(f64),
    #[error("regulator must be positive, got {0}")]
    InvalidRegulator(f64),
    #[error("the commutator is a distribution and has no pointwise value")]
    NotPointwise,
    #[error("closed-form kernels need a massless field (m = {0})")]
    MassiveField(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorId {
    A,
    B,
}

impl DetectorId {
    pub fn other(self) -> Self {
        match self {
            DetectorId::A => DetectorId::B,
            DetectorId::B => DetectorId::A,
        }
    }
}

/// A static two-level detector with Gaussian switching
/// `χ(t) = exp(-(t - t_c)²/T²)` and Gaussian smearing of width σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub gap: f64,
    pub coupling: f64,
    pub position: [f64; 3],
    pub switch_center: f64,
    pub switch_width: f64,
    pub smearing: f64,
}

impl Detector {
    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter { name, value: v })
            }
        };
        finite("gap", self.gap)?;
        finite("coupling", self.coupling)?;
        finite("switch_center", self.switch_center)?;
        for &x in &self.position {
            finite("position", x)?;
        }
        if !(self.switch_width.is_finite() && self.switch_width > 0.0) {
            return Err(ModelError::InvalidParameter { name: "switch_width", value: self.switch_width });
        }
        if !(self.smearing.is_finite() && self.smearing >= 0.0) {
            return Err(ModelError::InvalidParameter { name: "smearing", value: self.smearing });
        }
        Ok(())
    }

    pub fn switching(&self, t: f64) -> f64 {
        let u = (t - self.switch_center) / self.switch_width;
        (-u * u).exp()
    }

    /// `∫ χ(t) e^{-iωt} dt`
    pub fn switching_transform(&self, omega: f64) -> Complex64 {
        let t = self.switch_width;
        let mag = SQRT_PI * t * (-0.25 * omega * omega * t * t).exp();
        Complex64::from_polar(mag, -omega * self.switch_center)
    }

    pub fn is_pointlike(&self) -> bool {
        self.smearing == 0.0
    }
}

/// Dimensionless description of a detector pair, in units of the shared
/// switching width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub mass: f64,
    pub switch_width: f64,
}

impl Default for DimensionlessParams {
    fn default() -> Self {
        Self {
            alpha_a: 1.0,
            alpha_b: 1.0,
            beta: 5.0,
            gamma: 0.0,
            delta_a: 0.0,
            delta_b: 0.0,
            lambda_a: 1.0,
            lambda_b: 1.0,
            mass: 0.0,
            switch_width: 1.0,
        }
    }
}

impl DimensionlessParams {
    /// Identical detectors with gap α and smearing δ.
    pub fn symmetric(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self { alpha_a: alpha, alpha_b: alpha, beta, gamma, delta_a: delta, delta_b: delta, ..Self::default() }
    }
}

/// Two detectors in the vacuum of a scalar field of mass `mass`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    a: Detector,
    b: Detector,
    mass: f64,
    regulator: f64,
}

/// Base regulator relative to the switching width.
pub const DEFAULT_REGULATOR: f64 = 1e-3;

impl Scenario {
    pub fn new(a: Detector, b: Detector, mass: f64) -> Result<Self, ModelError> {
        a.validate()?;
        b.validate()?;
        if a.switch_width != b.switch_width {
            return Err(ModelError::UnequalSwitchWidth { a: a.switch_width, b: b.switch_width });
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(ModelError::InvalidParameter { name: "mass", value: mass });
        }
        Ok(Self { a, b, mass, regulator: DEFAULT_REGULATOR * a.switch_width })
    }

    /// Detector A at the origin switching at `-γT/2`, detector B at
    /// `(βT, 0, 0)` switching at `+γT/2`.
    pub fn from_dimensionless(p: &DimensionlessParams) -> Result<Self, ModelError> {
        let t = p.switch_width;
        if !(t.is_finite() && t > 0.0) {
            return Err(ModelError::InvalidParameter { name: "switch_width", value: t });
        }
        for (name, v) in [("alpha_a", p.alpha_a), ("alpha_b", p.alpha_b), ("gamma", p.gamma)] {
            if !v.is_finite() {
                return Err(ModelError::InvalidParameter { name, value: v });
            }
        }
        if !(p.beta.is_finite() && p.beta >= 0.0) {
            return Err(ModelError::InvalidParameter { name: "beta", value: p.beta });
        }
        for (name, v) in [("delta_a", p.delta_a), ("delta_b", p.delta_b)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ModelError::InvalidParameter { name, value: v });
            }
        }
        let a = Detector {
            gap: p.alpha_a / t,
            coupling: p.lambda_a,
            position: [0.0; 3],
            switch_center: -0.5 * p.gamma * t,
            switch_width: t,
            smearing: p.delta_a * t,
        };
        let b = Detector {
            gap: p.alpha_b / t,
            coupling: p.lambda_b,
            position: [p.beta * t, 0.0, 0.0],
            switch_center: 0.5 * p.gamma * t,
            switch_width: t,
            smearing: p.delta_b * t,
        };
        Self::new(a, b, p.mass)
    }

    pub fn with_regulator(mut self, epsilon: f64) -> Result<Self, ModelError> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(ModelError::InvalidRegulator(epsilon));
        }
        self.regulator = epsilon;
        Ok(self)
    }

    pub fn detector(&self, id: DetectorId) -> &Detector {
        match id {
            DetectorId::A => &self.a,
            DetectorId::B => &self.b,
        }
    }

    pub fn detector_a(&self) -> &Detector {
        &self.a
    }

    pub fn detector_b(&self) -> &Detector {
        &self.b
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn regulator(&self) -> f64 {
        self.regulator
    }

    pub fn switch_width(&self) -> f64 {
        self.a.switch_width
    }

    pub fn separation(&self) -> f64 {
        let d: f64 = (0..3).map(|k| (self.b.position[k] - self.a.position[k]).powi(2)).sum();
        d.sqrt()
    }

    pub fn alpha(&self, id: DetectorId) -> f64 {
        self.detector(id).gap * self.switch_width()
    }

    pub fn alpha_a(&self) -> f64 {
        self.alpha(DetectorId::A)
    }

    pub fn alpha_b(&self) -> f64 {
        self.alpha(DetectorId::B)
    }

    pub fn beta(&self) -> f64 {
        self.separation() / self.switch_width()
    }

    /// Switching delay `(t_B - t_A)/T`; positive when A switches first.
    pub fn gamma(&self) -> f64 {
        (self.b.switch_center - self.a.switch_center) / self.switch_width()
    }

    pub fn delta(&self, id: DetectorId) -> f64 {
        self.detector(id).smearing / self.switch_width()
    }

    pub fn delta_a(&self) -> f64 {
        self.delta(DetectorId::A)
    }

    pub fn delta_b(&self) -> f64 {
        self.delta(DetectorId::B)
    }

    pub fn equal_gaps(&self) -> bool {
        self.a.gap == self.b.gap
    }

    pub fn pointlike(&self) -> bool {
        self.a.is_pointlike() && self.b.is_pointlike()
    }

    /// Midpoint of the two switching centres.
    pub fn time_offset(&self) -> f64 {
        0.5 * (self.a.switch_center + self.b.switch_center)
    }

    /// The same configuration translated in time so the switching
    /// midpoint sits at `t = 0`.
    ///
    /// Vacuum quantities depend on the common offset only through a phase:
    /// the correlation block gains `e^{i(Ω_A+Ω_B)s}` and the cross term
    /// `e^{i(Ω_A-Ω_B)s}` under a shift by `s` (see [`Self::correlation_phase`]).
    pub fn centred(&self) -> Self {
        let s = self.time_offset();
        let mut c = *self;
        c.a.switch_center -= s;
        c.b.switch_center -= s;
        c
    }

    /// Factor taking the centred-frame correlation term to this frame.
    pub fn correlation_phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, (self.a.gap + self.b.gap) * self.time_offset())
    }

    /// Factor taking the centred-frame `A,B` cross term to this frame.
    pub fn cross_phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, (self.a.gap - self.b.gap) * self.time_offset())
    }

    /// Labels exchanged.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a, ..*self }
    }

    pub fn with_couplings(mut self, lambda_a: f64, lambda_b: f64) -> Self {
        self.a.coupling = lambda_a;
        self.b.coupling = lambda_b;
        self
    }
}

/// Which two-point function a kernel evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Wightman,
    Anticommutator,
    Commutator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorKernel {
    pub kind: KernelKind,
    pub mass: f64,
    pub regulator: f64,
}

impl CorrelatorKernel {
    pub fn evaluate(&self, dt: f64, r: f64) -> Result<Complex64, ModelError> {
        if self.mass != 0.0 {
            return Err(ModelError::MassiveField(self.mass));
        }
        match self.kind {
            KernelKind::Wightman => wightman_pointlike(dt, r, self.regulator),
            KernelKind::Anticommutator => anticommutator_pointlike(dt, r).map(|v| Complex64::new(v, 0.0)),
            KernelKind::Commutator => Err(ModelError::NotPointwise),
        }
    }
}

/// Massless vacuum Wightman function `-1/(4π²((Δt - iε)² - r²))`.
pub fn wightman_pointlike(dt: f64, r: f64, epsilon: f64) -> Result<Complex64, ModelError> {
    if !(epsilon > 0.0) {
        return Err(ModelError::InvalidRegulator(epsilon));
    }
    if !(r >= 0.0) {
        return Err(ModelError::InvalidParameter { name: "r", value: r });
    }
    // factor the denominator: (Δt - r - iε)(Δt + r - iε)
    let lo = Complex64::new(dt - r, -epsilon);
    let hi = Complex64::new(dt + r, -epsilon);
    Ok(-1.0 / (4.0 * PI * PI) / (lo * hi))
}

/// Pointwise anticommutator `⟨{φ, φ}⟩ = 2 Re W` away from the light cone.
pub fn anticommutator_pointlike(dt: f64, r: f64) -> Result<f64, ModelError> {
    let gap = (dt.abs() - r).abs();
    if gap <= 1e-12 * r.max(1.0) {
        return Err(ModelError::OnLightCone { dt, r });
    }
    Ok(-1.0 / (2.0 * PI * PI) / ((dt - r) * (dt + r)))
}

/// Commutator `iC⁻` of the massless field at spatial distance `r`:
/// `i/(4πr)·(δ(Δt + r) − δ(Δt − r))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightConeDistribution {
    pub radius: f64,
    pub coefficient: f64,
}

impl LightConeDistribution {
    /// `∫ C⁻(Δt) g(Δt) dΔt`, i.e. the pairing without the factor `i`.
    pub fn pair<G: FnMut(f64) -> Complex64>(&self, mut g: G) -> Complex64 {
        self.coefficient * (g(-self.radius) - g(self.radius))
    }

    /// Support of the retarded branch (`Δt = +r`, weight `-1`).
    pub fn retarded_support(&self) -> f64 {
        self.radius
    }

    /// Support of the advanced branch (`Δt = -r`, weight `+1`).
    pub fn advanced_support(&self) -> f64 {
        -self.radius
    }
}

pub fn commutator_lightcone(r: f64) -> Result<LightConeDistribution, ModelError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(ModelError::InvalidRadius(r));
    }
    Ok(LightConeDistribution { radius: r, coefficient: 1.0 / (4.0 * PI * r) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spectrum {
    /// Modes labelled by a wavenumber on `[0, ∞)`.
    Continuum,
    /// Modes labelled `0, 1, 2, …`.
    Discrete,
}

/// A complete set of positive-frequency field modes, packaged so the
/// vacuum Wightman function between two static points a distance `r`
/// apart is `W = Σ/∫ pair_weight(label, r) · e^{-iω(label)Δt}`.
pub trait ModeFamily: Send + Sync {
    fn spectrum(&self) -> Spectrum;

    fn energy(&self, label: f64) -> f64;

    /// `Σ φ(x)φ*(x')/(2ω)` over the degenerate modes at `label`, as a
    /// density for continuum families.
    fn pair_weight(&self, label: f64, r: f64) -> f64;

    /// `dt/dτ` for a detector; unity for static flat-space detectors.
    fn redshift(&self, _detector: &Detector) -> f64 {
        1.0
    }
}

/// `sin(kr)/r`, continuous at `r = 0`.
pub fn radial_factor(k: f64, r: f64) -> f64 {
    let x = k * r;
    if x.abs() < 1e-4 {
        k * (1.0 - x * x / 6.0)
    } else {
        x.sin() / r
    }
}

/// Plane-wave modes of a scalar field of mass `m`, angularly reduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiModes {
    pub mass: f64,
}

impl ModeFamily for MinkowskiModes {
    fn spectrum(&self) -> Spectrum {
        Spectrum::Continuum
    }

    fn energy(&self, k: f64) -> f64 {
        k.hypot(self.mass)
    }

    fn pair_weight(&self, k: f64, r: f64) -> f64 {
        let ratio = if self.mass == 0.0 { 1.0 } else { k / self.energy(k) };
        ratio * radial_factor(k, r) / (4.0 * PI * PI)
    }
}

pub fn minkowski_mode_family(mass: f64) -> Result<MinkowskiModes, ModelError> {
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(ModelError::InvalidParameter { name: "mass", value: mass });
    }
    Ok(MinkowskiModes { mass })
}

/// Wightman function rebuilt from a mode family with `e^{-εω}` damping.
pub fn wightman_from_modes<M: ModeFamily + ?Sized>(
    family: &M,
    dt: f64,
    r: f64,
    epsilon: f64,
    tol: Tolerance,
) -> Result<QuadratureResult, ModelError> {
    if !(epsilon > 0.0) {
        return Err(ModelError::InvalidRegulator(epsilon));
    }
    let term = |label: f64| {
        let w = family.energy(label);
        family.pair_weight(label, r) * Complex64::from_polar((-epsilon * w).exp(), -w * dt)
    };
    match family.spectrum() {
        Spectrum::Continuum => {
            let wavelength = 2.0 * PI / (r + dt.abs()).max(epsilon);
            Ok(quad::integrate_semi_infinite_oscillatory(term, wavelength, tol)?)
        }
        Spectrum::Discrete => {
            let mut sum = Complex64::new(0.0, 0.0);
            let mut quiet = 0;
            for n in 0..tol.max_evaluations {
                let t = term(n as f64);
                sum += t;
                quiet = if t.norm() <= tol.target(sum.norm()) * 1e-2 { quiet + 1 } else { 0 };
                if quiet >= 10 {
                    return Ok(QuadratureResult { value: sum, error_estimate: tol.target(sum.norm()), evaluations: n + 1 });
                }
            }
            Err(QuadError::BudgetExhausted {
                partial: QuadratureResult { value: sum, error_estimate: f64::INFINITY, evaluations: tol.max_evaluations },
            }
            .into())
        }
    }
}
