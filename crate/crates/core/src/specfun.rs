//! Complex error-function family.
//!
//! Everything is built on the Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
//! In the upper half-plane `w` is evaluated with Weideman's rational
//! expansion (N = 40) for `|z| < 6` and with the Laplace continued fraction
//! outside; the lower half-plane follows from `w(z) = 2e^{-z²} - w(-z)`.
//! Small arguments of the real functions use their Maclaurin series so
//! that relative accuracy survives near zero.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

/// All complex-valued quantities in the crate.
pub type ComplexValue = Complex64;

/// `2/√π`
pub const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;
/// `1/√π`
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// `√π / 2`
const SQRT_PI_OVER_2: f64 = 0.886_226_925_452_758;

/// Largest `|x|` for which `erfi(x)` is representable.
pub const ERFI_MAX_ARGUMENT: f64 = 26.0;

const WEIDEMAN_N: usize = 40;
const SERIES_RADIUS: f64 = 0.5;
const CONTINUED_FRACTION_RADIUS: f64 = 6.0;
const CONTINUED_FRACTION_TERMS: usize = 40;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SpecfunError {
    #[error("erfi({0}) overflows double range; use the Dawson function")]
    OverflowRange(f64),
}

struct Weideman {
    coeffs: [f64; WEIDEMAN_N],
    l: f64,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let m2 = 2 * m;
        let l = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        // samples f(t_k) at k = -m+1..m-1, with a leading zero: length m2
        let mut samples = vec![0.0; m2];
        for (idx, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let theta = k as f64 * PI / m as f64;
            let t = l * (theta / 2.0).tan();
            samples[idx + 1] = (-t * t).exp() * (l * l + t * t);
        }
        // a_j = Re(DFT(fftshift(samples)))_j / m2 for j = 1..n
        let half = m2 / 2;
        let mut coeffs = [0.0; WEIDEMAN_N];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let freq = (j + 1) as f64;
            let mut acc = 0.0;
            for (i, _) in samples.iter().enumerate() {
                let v = samples[(i + half) % m2];
                acc += v * (2.0 * PI * freq * i as f64 / m2 as f64).cos();
            }
            *c = acc / m2 as f64;
        }
        Weideman { coeffs, l }
    })
}

fn w_weideman(z: Complex64) -> Complex64 {
    let table = weideman();
    let i = Complex64::i();
    let denom = table.l - i * z;
    let zz = (table.l + i * z) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for &a in table.coeffs.iter().rev() {
        p = p * zz + a;
    }
    2.0 * p / (denom * denom) + FRAC_1_SQRT_PI / denom
}

fn w_continued_fraction(z: Complex64) -> Complex64 {
    // w(z) = (i/√π) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))
    let mut r = z;
    for k in (1..=CONTINUED_FRACTION_TERMS).rev() {
        r = z - (k as f64 / 2.0) / r;
    }
    Complex64::new(0.0, FRAC_1_SQRT_PI) / r
}

fn dawson_series(z: Complex64) -> Complex64 {
    // F(z) = Σ (-2z²)^k z / (2k+1)!!
    let minus_2z2 = -2.0 * z * z;
    let mut term = z;
    let mut sum = z;
    for k in 1..60 {
        term *= minus_2z2 / (2 * k + 1) as f64;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn w_upper(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < SERIES_RADIUS {
        (-(z * z)).exp() + Complex64::new(0.0, TWO_OVER_SQRT_PI) * dawson_series(z)
    } else if r < CONTINUED_FRACTION_RADIUS {
        w_weideman(z)
    } else {
        w_continued_fraction(z)
    }
}

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
///
/// Relative error below `1e-14` in the closed upper half-plane. In the
/// lower half-plane the value grows like `e^{y²-x²}` and overflows for
/// `|y|` beyond about 26.
pub fn faddeeva_w(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        w_upper(z)
    } else {
        2.0 * (-(z * z)).exp() - w_upper(-z)
    }
}

/// `e^{c} erfc(z)`, combining the exponentials before evaluation so the
/// product stays finite when the two factors separately would not.
pub fn erfc_scaled_by_exp(z: Complex64, log_factor: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.re >= 0.0 {
        (log_factor - z * z).exp() * w_upper(i * z)
    } else {
        2.0 * log_factor.exp() - (log_factor - z * z).exp() * w_upper(-i * z)
    }
}

fn erf_series(z: Complex64) -> Complex64 {
    let minus_z2 = -(z * z);
    let mut term = z;
    let mut sum = z;
    for n in 1..200 {
        term = term * minus_z2 / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if contrib.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    TWO_OVER_SQRT_PI * sum
}

/// Complementary error function of a complex argument.
pub fn erfc_complex(z: Complex64) -> Complex64 {
    erfc_scaled_by_exp(z, Complex64::new(0.0, 0.0))
}

/// Error function of a complex argument.
pub fn erf_complex(z: Complex64) -> Complex64 {
    if z.norm() < 2.0 {
        return erf_series(z);
    }
    if z.re >= 0.0 {
        1.0 - erfc_complex(z)
    } else {
        -(1.0 - erfc_complex(-z))
    }
}

/// Dawson's integral `F(x) = (√π/2) e^{-x²} erfi(x)`.
pub fn dawson(x: f64) -> f64 {
    if x.abs() < SERIES_RADIUS {
        return dawson_series(Complex64::new(x, 0.0)).re;
    }
    // w(x) = e^{-x²} + (2i/√π) F(x) on the real axis
    SQRT_PI_OVER_2 * faddeeva_w(Complex64::new(x, 0.0)).im
}

/// Imaginary error function for real arguments, `|x| ≤ 26`.
///
/// Closed forms should go through [`dawson`]; this exists for small
/// arguments and for checking.
pub fn erfi_real(x: f64) -> Result<f64, SpecfunError> {
    if !(x.abs() <= ERFI_MAX_ARGUMENT) {
        return Err(SpecfunError::OverflowRange(x));
    }
    if x.abs() <= 5.0 {
        // positive series, no cancellation
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        for n in 1..400 {
            term *= x2 / n as f64;
            let contrib = term / (2 * n + 1) as f64;
            sum += contrib;
            if contrib.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return Ok(TWO_OVER_SQRT_PI * sum);
    }
    Ok(TWO_OVER_SQRT_PI * (x * x).exp() * dawson(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn w_at_origin() {
        assert_eq!(faddeeva_w(c(0.0, 0.0)), c(1.0, 0.0));
    }

    #[test]
    fn w_reflection() {
        let z = c(1.0, 2.0);
        let lhs = faddeeva_w(-z.conj());
        assert!(rel(lhs, faddeeva_w(z).conj()) < 1e-15);
    }

    #[test]
    fn w_imaginary_axis_asymptote() {
        let y = 50.0;
        let w = faddeeva_w(c(0.0, y));
        let ratio = w.re * y * PI.sqrt();
        let series = 1.0 - 1.0 / (2.0 * y * y) + 3.0 / (4.0 * y.powi(4));
        assert!((ratio - series).abs() < 1e-6);
        let (oracle, _) = udw_oracle::faddeeva(0.0, y);
        assert!((w.re / oracle - 1.0).abs() < 1e-13);
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf_complex(c(0.0, 0.0)), c(0.0, 0.0));
        let (o, _) = udw_oracle::erf(1.0, 0.0);
        assert!((erf_complex(c(1.0, 0.0)).re / o - 1.0).abs() < 3e-16);
        let z = c(2.0, 1.0);
        assert!(rel(erf_complex(-z), -erf_complex(z)) < 1e-15);
    }

    #[test]
    fn erfi_values() {
        assert_eq!(erfi_real(0.0).unwrap(), 0.0);
        assert_eq!(erfi_real(-1.5).unwrap(), -erfi_real(1.5).unwrap());
        let v = erfi_real(1.0).unwrap();
        assert!((v / udw_oracle::erfi(1.0) - 1.0).abs() < 1e-15);
        assert!((v - 1.650_425_758_8).abs() < 1e-10);
        assert!(matches!(erfi_real(26.5), Err(SpecfunError::OverflowRange(_))));
        assert!(erfi_real(f64::NAN).is_err());
        assert!(erfi_real(26.0).unwrap().is_finite());
    }

    #[test]
    fn dawson_values() {
        assert_eq!(dawson(0.0), 0.0);
        assert!((2.0 * 100.0 * dawson(100.0) - 1.0).abs() < 1e-4);
        assert!((dawson(1.0) - 0.538_079_506_9).abs() < 1e-10);
        for x in [1e-300, 1e-8, 0.3, 0.49, 0.51, 2.0, 7.0] {
            assert!((dawson(x) / udw_oracle::dawson(x) - 1.0).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn complement_identity_on_grid() {
        for i in -10..=10 {
            for j in -10..=10 {
                let z = c(i as f64, j as f64 * 0.97);
                let e = erf_complex(z);
                let ec = erfc_complex(z);
                let scale = 1f64.max(e.norm()).max(ec.norm());
                assert!((e + ec - 1.0).norm() <= 1e-13 * scale, "z = {z}");
            }
        }
    }

    #[test]
    fn odd_symmetry_is_exact() {
        for k in 0..200 {
            let x = k as f64 * 0.13;
            assert_eq!(dawson(-x), -dawson(x));
            assert_eq!(erfi_real(-x).unwrap(), -erfi_real(x).unwrap());
        }
    }

    #[test]
    fn dawson_erfi_identity() {
        for k in 0..=100 {
            let x = -5.0 + 0.1 * k as f64;
            let via_dawson = dawson(x) * TWO_OVER_SQRT_PI * (x * x).exp();
            let direct = erfi_real(x).unwrap();
            assert!((via_dawson - direct).abs() <= 1e-11 * direct.abs().max(1e-300));
        }
    }

    #[test]
    fn scaled_erfc_survives_large_exponents() {
        // e^{-z²} overflows alone at z = 30i but the product is moderate
        let z = c(30.0, 28.0);
        let v = erfc_scaled_by_exp(z, z * z);
        let w = faddeeva_w(Complex64::i() * z);
        assert!(rel(v, w) < 1e-15);
        assert!(v.re.is_finite() && v.im.is_finite());
    }
}
