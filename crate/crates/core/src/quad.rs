//! Adaptive quadrature with evaluation accounting.
//!
//! The 1D engine is a globally adaptive 21-point Gauss-Kronrod scheme:
//! the interval with the largest error estimate is bisected until the
//! summed estimate meets the tolerance. Subdivision order is fully
//! determined by the inputs, so evaluation counts are reproducible.
//!
//! The 2D engine integrates iteratively. Domains with a time-ordering
//! constraint or with singular lines along `x - y = const` are mapped to
//! the difference coordinate `s = x - y`, which becomes the outer
//! variable; the diagonal kinks and cones then sit on outer breakpoints
//! instead of cutting through cells.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_214_319,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const NODES_PER_RULE: usize = 21;

/// Requested accuracy: the result is accepted once the error estimate is
/// below `max(abs_tol, rel_tol·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_evaluations: usize) -> Result<Self, QuadError> {
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if !ok(abs_tol) || !ok(rel_tol) {
            return Err(QuadError::InvalidTolerance { abs_tol, rel_tol });
        }
        Ok(Self { abs_tol, rel_tol, max_evaluations })
    }

    /// Relative tolerance with a negligible absolute floor.
    pub fn relative(rel_tol: f64) -> Self {
        Self { abs_tol: 1e-300, rel_tol, max_evaluations: 50_000_000 }
    }

    pub fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }

    fn scaled(&self, abs_factor: f64, rel_factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * abs_factor,
            rel_tol: self.rel_tol * rel_factor,
            max_evaluations: self.max_evaluations,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-10, max_evaluations: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("tolerances must be finite and positive (abs {abs_tol}, rel {rel_tol})")]
    InvalidTolerance { abs_tol: f64, rel_tol: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("evaluation budget exhausted after {} evaluations (error estimate {:.3e})", partial.evaluations, partial.error_estimate)]
    BudgetExhausted { partial: QuadratureResult },
    #[error("integrand tail does not decay (best value {:.6e})", partial.value)]
    NonDecayingIntegrand { partial: QuadratureResult },
}

impl QuadError {
    /// Best available estimate, when the failure produced one.
    pub fn partial(&self) -> Option<&QuadratureResult> {
        match self {
            QuadError::BudgetExhausted { partial } | QuadError::NonDecayingIntegrand { partial } => {
                Some(partial)
            }
            _ => None,
        }
    }
}

struct Budget {
    used: Cell<usize>,
    max: usize,
}

impl Budget {
    fn new(max: usize) -> Self {
        Self { used: Cell::new(0), max }
    }

    fn charge(&self, n: usize) {
        self.used.set(self.used.get() + n);
    }

    fn exhausted(&self) -> bool {
        self.used.get() >= self.max
    }
}

/// Value of the integrand at a node, plus any error it already carries
/// (nonzero when the node value is itself an inner integral).
#[derive(Clone, Copy)]
struct Node {
    value: Complex64,
    error: f64,
}

enum Stop {
    Budget,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    // error level attributable to roundoff alone
    floor: f64,
    // insertion order breaks ties deterministically
    serial: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.serial.cmp(&self.serial))
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64, f64), Stop>
where
    F: FnMut(f64) -> Result<Node, Stop>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); NODES_PER_RULE];
    let mut inner_err = 0.0;

    let fc = f(center)?;
    fv[0] = fc.value;
    inner_err += WGK[10] * fc.error;
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        fv[1 + 2 * j] = lo.value;
        fv[2 + 2 * j] = hi.value;
        inner_err += WGK[j] * (lo.error + hi.error);
    }

    let mut kronrod = fv[0] * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let pair = fv[1 + 2 * j] + fv[2 + 2 * j];
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }

    let mut abs_sum = WGK[10] * fv[0].norm();
    for j in 0..10 {
        abs_sum += WGK[j] * (fv[1 + 2 * j].norm() + fv[2 + 2 * j].norm());
    }
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();

    let component = |pick: fn(Complex64) -> f64| {
        let k = pick(kronrod);
        let mean = 0.5 * k;
        let mut resabs = WGK[10] * pick(fv[0]).abs();
        let mut resasc = WGK[10] * (pick(fv[0]) - mean).abs();
        for j in 0..10 {
            let lo = pick(fv[1 + 2 * j]);
            let hi = pick(fv[2 + 2 * j]);
            resabs += WGK[j] * (lo.abs() + hi.abs());
            resasc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
        }
        let diff = (k - pick(gauss)) * half;
        rescale_error(diff, resabs * half.abs(), resasc * half.abs())
    };
    let err = component(|c| c.re).hypot(component(|c| c.im)) + inner_err * half.abs();
    Ok((kronrod * half, err, floor + inner_err * half.abs()))
}

/// Globally adaptive integration over consecutive breakpoint intervals.
fn adaptive<F>(
    f: &mut F,
    points: &[f64],
    tol: &Tolerance,
    budget: &Budget,
) -> Result<(Complex64, f64), (Stop, Complex64, f64)>
where
    F: FnMut(f64) -> Result<Node, Stop>,
{
    let mut heap = BinaryHeap::new();
    let mut serial = 0usize;
    let mut finished: Vec<Segment> = Vec::new();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;

    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        match gauss_kronrod(f, a, b) {
            Ok((v, e, fl)) => {
                value += v;
                error += e;
                heap.push(Segment { a, b, value: v, error: e, floor: fl, serial });
                serial += 1;
            }
            Err(stop) => return Err((stop, value, f64::INFINITY)),
        }
    }

    loop {
        if error <= tol.target(value.norm()) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // roundoff floor: the interval cannot be split any further
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs())
            || worst.error <= worst.floor * (1.0 + 1e-9)
        {
            finished.push(worst);
            continue;
        }
        if budget.exhausted() {
            heap.push(worst);
            let (v, e) = resum(&heap, &finished);
            return Err((Stop::Budget, v, e));
        }
        let left = gauss_kronrod(f, worst.a, mid);
        let right = left.and_then(|l| gauss_kronrod(f, mid, worst.b).map(|r| (l, r)));
        match right {
            Ok(((lv, le, lf), (rv, re, rf))) => {
                value += lv + rv - worst.value;
                error += le + re - worst.error;
                heap.push(Segment { a: worst.a, b: mid, value: lv, error: le, floor: lf, serial });
                heap.push(Segment { a: mid, b: worst.b, value: rv, error: re, floor: rf, serial: serial + 1 });
                serial += 2;
            }
            Err(stop) => {
                heap.push(worst);
                let (v, e) = resum(&heap, &finished);
                return Err((stop, v, e));
            }
        }
    }
    Ok(resum(&heap, &finished))
}

fn resum(heap: &BinaryHeap<Segment>, finished: &[Segment]) -> (Complex64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().chain(finished.iter()).collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
    let error = segs.iter().map(|s| s.error).sum();
    (value, error)
}

fn sorted_points(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(b);
    pts
}

fn validate_interval(a: f64, b: f64) -> Result<(), QuadError> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(QuadError::InvalidInterval { a, b })
    }
}

/// `∫_a^b f(x) dx` for an integrand that is smooth between breakpoints.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_1d_with_breaks(f, a, b, &[], tol)
}

/// As [`integrate_1d`], with interior points where the integrand has kinks
/// or near-singularities.
pub fn integrate_1d_with_breaks<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    validate_interval(a, b)?;
    let budget = Budget::new(tol.max_evaluations);
    let mut node = |x: f64| {
        budget.charge(1);
        Ok(Node { value: f(x), error: 0.0 })
    };
    let points = sorted_points(a, b, breaks);
    match adaptive(&mut node, &points, &tol, &budget) {
        Ok((value, error_estimate)) => Ok(QuadratureResult {
            value,
            error_estimate,
            evaluations: budget.used.get(),
        }),
        Err((_, value, error_estimate)) => Err(QuadError::BudgetExhausted {
            partial: QuadratureResult { value, error_estimate, evaluations: budget.used.get() },
        }),
    }
}

/// Relative change of the segment envelope below which a tail counts as
/// flat rather than decaying.
const PLATEAU_TOLERANCE: f64 = 1e-3;

/// Largest iterated-averaging window used to accelerate oscillatory tails.
const ACCELERATION_WINDOW: usize = 128;

fn binomial_average(partial_sums: &[Complex64]) -> Complex64 {
    let m = partial_sums.len().min(ACCELERATION_WINDOW);
    let window = &partial_sums[partial_sums.len() - m..];
    // weights C(m-1, j) / 2^{m-1}, built in log space free of overflow
    let mut weight = 0.5f64.powi(m as i32 - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, s) in window.iter().enumerate() {
        acc += s * weight;
        weight *= (m - 1 - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// `∫_0^∞ f(x) dx` for an integrand that decays (possibly only
/// conditionally) while oscillating on scales no finer than
/// `osc_wavelength`.
///
/// The half-line is cut into segments of half a wavelength; each segment
/// is integrated adaptively and the partial sums are smoothed by repeated
/// averaging, which removes the alternating component of a slowly
/// decaying tail.
pub fn integrate_semi_infinite_oscillatory<F>(
    mut f: F,
    osc_wavelength: f64,
    tol: Tolerance,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Complex64,
{
    if !(osc_wavelength.is_finite() && osc_wavelength > 0.0) {
        return Err(QuadError::InvalidInterval { a: 0.0, b: osc_wavelength });
    }
    let h = 0.5 * osc_wavelength;
    let seg_tol = tol.scaled(0.05, 0.25);
    let mut evaluations = 0usize;
    let mut seg_error = 0.0;
    let mut partial_sums: Vec<Complex64> = Vec::new();
    let mut magnitudes: Vec<f64> = Vec::new();
    let mut accelerated: Vec<Complex64> = Vec::new();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut plateau_checks = 0;

    for k in 0.. {
        let a = k as f64 * h;
        let remaining = tol.max_evaluations.saturating_sub(evaluations);
        let budget_tol = Tolerance { max_evaluations: remaining, ..seg_tol };
        let seg = match integrate_1d(&mut f, a, a + h, budget_tol) {
            Ok(r) => r,
            Err(QuadError::BudgetExhausted { partial }) => {
                evaluations += partial.evaluations;
                let value = accelerated.last().copied().unwrap_or(sum + partial.value);
                return Err(QuadError::BudgetExhausted {
                    partial: QuadratureResult { value, error_estimate: f64::INFINITY, evaluations },
                });
            }
            Err(e) => return Err(e),
        };
        evaluations += seg.evaluations;
        seg_error += seg.error_estimate;
        sum += seg.value;
        partial_sums.push(sum);
        magnitudes.push(seg.value.norm());
        let acc = binomial_average(&partial_sums);
        accelerated.push(acc);

        let target = tol.target(sum.norm().max(acc.norm()));
        let n = magnitudes.len();

        // plain convergence: the tail has died out
        if n >= 3 && magnitudes[n - 3..].iter().all(|&m| m <= 1e-2 * target) {
            return Ok(QuadratureResult {
                value: sum,
                error_estimate: seg_error + magnitudes[n - 3..].iter().sum::<f64>(),
                evaluations,
            });
        }
        let windows = (n >= 20).then(|| {
            let recent = magnitudes[n - 10..].iter().copied().fold(0.0, f64::max);
            let earlier = magnitudes[n - 20..n - 10].iter().copied().fold(0.0, f64::max);
            (recent, earlier)
        });
        let shrinking = windows.is_some_and(|(recent, earlier)| recent < earlier * (1.0 - 1e-6));
        // accelerated convergence of an oscillating tail
        if shrinking {
            let d1 = (accelerated[n - 1] - accelerated[n - 2]).norm();
            let d2 = (accelerated[n - 2] - accelerated[n - 3]).norm();
            if d1 <= 0.25 * target && d2 <= 0.25 * target {
                return Ok(QuadratureResult {
                    value: acc,
                    error_estimate: seg_error + d1 + d2,
                    evaluations,
                });
            }
        }
        // a growing envelope may still turn over; a flat one will not
        if let Some((recent, earlier)) = windows {
            if n % 10 == 0 {
                let flat = (recent - earlier).abs() <= PLATEAU_TOLERANCE * earlier;
                plateau_checks = if flat { plateau_checks + 1 } else { 0 };
                if plateau_checks >= 2 {
                    return Err(QuadError::NonDecayingIntegrand {
                        partial: QuadratureResult { value: acc, error_estimate: f64::INFINITY, evaluations },
                    });
                }
            }
        }
        if evaluations >= tol.max_evaluations {
            return Err(QuadError::BudgetExhausted {
                partial: QuadratureResult { value: acc, error_estimate: f64::INFINITY, evaluations },
            });
        }
    }
    unreachable!("segment loop only exits by returning")
}

/// Axis-aligned integration box; `x` is the first integrand argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Rect {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Self { x, y }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self { x: (lo, hi), y: (lo, hi) }
    }
}

/// A 2D integration domain with optional time ordering and known singular
/// lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain2d {
    rect: Rect,
    ordered: bool,
    diagonal_breaks: Vec<f64>,
    x_breaks: Vec<f64>,
    y_breaks: Vec<f64>,
}

impl Domain2d {
    pub fn new(rect: Rect) -> Self {
        Self { rect, ordered: false, diagonal_breaks: Vec::new(), x_breaks: Vec::new(), y_breaks: Vec::new() }
    }

    /// Restrict to `y < x`.
    pub fn ordered(mut self, ordered: bool) -> Self {
        self.ordered = ordered;
        self
    }

    /// Lines `x - y = c` where the integrand is singular or kinked.
    pub fn diagonal_breaks(mut self, breaks: &[f64]) -> Self {
        self.diagonal_breaks = breaks.to_vec();
        self
    }

    pub fn x_breaks(mut self, breaks: &[f64]) -> Self {
        self.x_breaks = breaks.to_vec();
        self
    }

    pub fn y_breaks(mut self, breaks: &[f64]) -> Self {
        self.y_breaks = breaks.to_vec();
        self
    }

    pub fn integrate<F>(&self, mut f: F, tol: Tolerance) -> Result<QuadratureResult, QuadError>
    where
        F: FnMut(f64, f64) -> Complex64,
    {
        let Rect { x: (x0, x1), y: (y0, y1) } = self.rect;
        validate_interval(x0, x1)?;
        validate_interval(y0, y1)?;
        let budget = Budget::new(tol.max_evaluations);
        let inner_tol = |outer_len: f64| Tolerance {
            abs_tol: tol.abs_tol / (4.0 * outer_len),
            rel_tol: tol.rel_tol / 4.0,
            max_evaluations: tol.max_evaluations,
        };

        let outcome = if !self.ordered && self.diagonal_breaks.is_empty() {
            let itol = inner_tol(x1 - x0);
            let ypts = sorted_points(y0, y1, &self.y_breaks);
            let mut node = |x: f64| {
                let mut g = |y: f64| {
                    budget.charge(1);
                    Ok(Node { value: f(x, y), error: 0.0 })
                };
                match adaptive(&mut g, &ypts, &itol, &budget) {
                    Ok((value, error)) => Ok(Node { value, error }),
                    Err((stop, ..)) => Err(stop),
                }
            };
            let xpts = sorted_points(x0, x1, &self.x_breaks);
            adaptive(&mut node, &xpts, &tol, &budget)
        } else {
            // outer s = x - y, inner x in [max(x0, y0 + s), min(x1, y1 + s)]
            let s_lo = if self.ordered { 0f64.max(x0 - y1) } else { x0 - y1 };
            let s_hi = x1 - y0;
            if s_hi <= s_lo {
                return Ok(QuadratureResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0 });
            }
            let itol = inner_tol(s_hi - s_lo);
            let mut breaks = vec![x0 - y0, x1 - y1];
            breaks.extend_from_slice(&self.diagonal_breaks);
            let spts = sorted_points(s_lo, s_hi, &breaks);
            let x_breaks = &self.x_breaks;
            let y_breaks = &self.y_breaks;
            let mut node = |s: f64| {
                let lo = x0.max(y0 + s);
                let hi = x1.min(y1 + s);
                if hi <= lo {
                    return Ok(Node { value: Complex64::new(0.0, 0.0), error: 0.0 });
                }
                let mut inner_breaks: Vec<f64> = x_breaks.clone();
                inner_breaks.extend(y_breaks.iter().map(|&y| y + s));
                let xpts = sorted_points(lo, hi, &inner_breaks);
                let mut g = |x: f64| {
                    budget.charge(1);
                    Ok(Node { value: f(x, x - s), error: 0.0 })
                };
                match adaptive(&mut g, &xpts, &itol, &budget) {
                    Ok((value, error)) => Ok(Node { value, error }),
                    Err((stop, ..)) => Err(stop),
                }
            };
            adaptive(&mut node, &spts, &tol, &budget)
        };

        match outcome {
            Ok((value, error_estimate)) => {
                Ok(QuadratureResult { value, error_estimate, evaluations: budget.used.get() })
            }
            Err((Stop::Budget, value, error_estimate)) => Err(QuadError::BudgetExhausted {
                partial: QuadratureResult { value, error_estimate, evaluations: budget.used.get() },
            }),
        }
    }
}

/// `∬ f(x, y)` over `rect`, restricted to `y < x` when `ordered`.
pub fn integrate_2d_ordered<F>(
    f: F,
    rect: Rect,
    ordered: bool,
    tol: Tolerance,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64, f64) -> Complex64,
{
    Domain2d::new(rect).ordered(ordered).integrate(f, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn tight() -> Tolerance {
        Tolerance::new(1e-14, 1e-12, 1_000_000).unwrap()
    }

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        for k in 0..=31 {
            let r = integrate_1d(|x| re(x.powi(k)), -1.0, 1.0, tight()).unwrap();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((r.value.re - exact).abs() < 1e-15, "x^{k}");
            if k <= 19 {
                // embedded Gauss rule is exact too, so no refinement
                assert_eq!(r.evaluations, NODES_PER_RULE);
            }
        }
    }

    #[test]
    fn simple_integrals() {
        let one = integrate_1d(|_| re(1.0), 0.0, 1.0, tight()).unwrap();
        assert!((one.value.re - 1.0).abs() < 1e-15);
        let odd = integrate_1d(|x| re(x), -1.0, 1.0, tight()).unwrap();
        assert!(odd.value.norm() < 1e-16);
        let g = integrate_1d(|x| re((-x * x).exp()), 0.0, 1.0, tight()).unwrap();
        let exact = 0.5 * PI.sqrt() * crate::specfun::erf_complex(re(1.0)).re;
        assert!((g.value.re - exact).abs() < 1e-14);
        assert!((g.value.re - 0.746_824_132_8).abs() < 1e-10);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(Tolerance::new(0.0, 1e-3, 10), Err(QuadError::InvalidTolerance { .. })));
        assert!(matches!(Tolerance::new(1e-3, f64::NAN, 10), Err(QuadError::InvalidTolerance { .. })));
        assert!(matches!(
            integrate_1d(|x| re(x), 1.0, 0.0, tight()),
            Err(QuadError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_keeps_best_value() {
        let tol = Tolerance::new(1e-15, 1e-15, 100).unwrap();
        let err = integrate_1d(|x| re(x.abs().sqrt()), -1.0, 1.0, tol).unwrap_err();
        let partial = err.partial().unwrap();
        assert!((partial.value.re - 4.0 / 3.0).abs() < 1e-2);
        assert!(partial.evaluations >= 100);
    }

    #[test]
    fn refinement_increases_evaluations() {
        let f = |x: f64| re(1.0 / (1e-3 + x * x));
        let mut last = 0;
        for rel in [1e-2, 1e-5, 1e-8, 1e-11] {
            let r = integrate_1d(f, -1.0, 1.0, Tolerance::new(1e-300, rel, 10_000_000).unwrap()).unwrap();
            assert!(r.evaluations > last);
            last = r.evaluations;
        }
    }

    #[test]
    fn splitting_invariance() {
        let f = |x: f64| Complex64::new((3.0 * x).sin(), x.exp());
        let whole = integrate_1d(f, 0.0, 2.0, tight()).unwrap();
        let l = integrate_1d(f, 0.0, 0.7, tight()).unwrap();
        let r = integrate_1d(f, 0.7, 2.0, tight()).unwrap();
        let combined = whole.error_estimate + l.error_estimate + r.error_estimate;
        assert!((whole.value - l.value - r.value).norm() <= combined.max(1e-15));
    }

    #[test]
    fn deterministic_counts() {
        let f = |x: f64| re((40.0 * x).cos() / (1.0 + x * x));
        let a = integrate_1d(f, 0.0, 10.0, tight()).unwrap();
        let b = integrate_1d(f, 0.0, 10.0, tight()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gaussian_half_line() {
        let r = integrate_semi_infinite_oscillatory(|x| re((-x * x).exp()), 2.0 * PI, tight()).unwrap();
        assert!((r.value.re - 0.5 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_integral() {
        let f = |x: f64| re(if x == 0.0 { 1.0 } else { x.sin() / x });
        let tol = Tolerance::new(1e-10, 1e-10, 10_000_000).unwrap();
        let r = integrate_semi_infinite_oscillatory(f, 2.0 * PI, tol).unwrap();
        assert!((r.value.re - 0.5 * PI).abs() < 1e-8, "{}", r.value.re);
    }

    #[test]
    fn gaussian_sine_transform_matches_dawson() {
        // ∫_0^∞ sin(5κ) e^{-κ²/2} dκ = √2 F(5/√2)
        let b = 5.0;
        let f = |k: f64| re((b * k).sin() * (-0.5 * k * k).exp());
        let r = integrate_semi_infinite_oscillatory(f, 2.0 * PI / b, tight()).unwrap();
        let closed = 2f64.sqrt() * crate::specfun::dawson(b / 2f64.sqrt());
        assert!((r.value.re - closed).abs() < 1e-12);
        // brute force trapezoid on [0, 40], 10^7 points
        let n = 10_000_000;
        let hstep = 40.0 / n as f64;
        let mut trap = 0.0;
        for i in 1..n {
            let k = i as f64 * hstep;
            trap += (b * k).sin() * (-0.5 * k * k).exp();
        }
        trap *= hstep;
        assert!((trap - closed).abs() < 1e-10);
    }

    #[test]
    fn non_decaying_integrand_is_flagged() {
        let err = integrate_semi_infinite_oscillatory(|x| re(x.sin()), 2.0 * PI, tight()).unwrap_err();
        assert!(matches!(err, QuadError::NonDecayingIntegrand { .. }));
    }

    #[test]
    fn square_and_triangle() {
        let rect = Rect::square(0.0, 1.0);
        let full = integrate_2d_ordered(|_, _| re(1.0), rect, false, tight()).unwrap();
        let tri = integrate_2d_ordered(|_, _| re(1.0), rect, true, tight()).unwrap();
        assert!((full.value.re - 1.0).abs() < 1e-14);
        assert!((tri.value.re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn product_factorizes() {
        let g = |t: f64| (-(t - 0.3) * (t - 0.3)).exp();
        let rect = Rect::square(-8.0, 8.0);
        let r = integrate_2d_ordered(|x, y| re(g(x) * g(y)), rect, false, tight()).unwrap();
        assert!((r.value.re - PI).abs() < 1e-11);
    }

    #[test]
    fn antisymmetric_ordered_is_half_signed_full() {
        let f = |x: f64, y: f64| re((x - y) * (-(x * x + y * y)).exp() * (1.0 + x * y));
        let rect = Rect::square(-6.0, 6.0);
        let ordered = integrate_2d_ordered(f, rect, true, tight()).unwrap();
        let signed = Domain2d::new(rect)
            .diagonal_breaks(&[0.0])
            .integrate(|x, y| f(x, y) * (x - y).signum(), tight())
            .unwrap();
        assert!((ordered.value - 0.5 * signed.value).norm() < 1e-11);
    }

    #[test]
    fn ordered_plus_reflected_is_full() {
        let f = |x: f64, y: f64| Complex64::new((x + 2.0 * y).cos(), x * y * y) * (-(x * x + y * y)).exp();
        let rect = Rect::new((-5.0, 6.0), (-5.5, 5.0));
        let swapped_rect = Rect::new(rect.y, rect.x);
        let a = integrate_2d_ordered(f, rect, true, tight()).unwrap();
        let b = integrate_2d_ordered(|x, y| f(y, x), swapped_rect, true, tight()).unwrap();
        let full = integrate_2d_ordered(f, rect, false, tight()).unwrap();
        let combined = a.error_estimate + b.error_estimate + full.error_estimate;
        assert!((a.value + b.value - full.value).norm() <= combined.max(1e-13));
    }
}
