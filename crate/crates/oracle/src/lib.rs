//! Reference evaluator for the error-function family.
//!
//! Every function here is a plain Maclaurin series summed in binary
//! fixed point on top of `BigInt`. The working precision grows with
//! `|z|²` so that the cancellation between terms (up to `e^{|z|²}`) is
//! absorbed and the returned value carries well over 30 significant
//! digits before it is rounded to `f64`. Nothing in this crate shares
//! code with the fast evaluators it is used to check; it is slow on
//! purpose.

mod fixed;

pub use fixed::{Fixed, FixedComplex};

use num_bigint::BigInt;

/// Guard bits kept beyond the cancellation estimate (about 48 decimal digits).
const GUARD_BITS: u64 = 160;

fn precision_for(re: f64, im: f64) -> u64 {
    // log2(e) * |z|^2 bits are lost to cancellation in the worst case;
    // tiny arguments need extra bits so the leading term keeps full width.
    let largest = re.abs().max(im.abs());
    let small = if largest > 0.0 && largest < 1.0 {
        (-largest.log2()).ceil() as u64
    } else {
        0
    };
    let modulus_sq = re * re + im * im;
    GUARD_BITS + small + (modulus_sq * std::f64::consts::LOG2_E).ceil() as u64 + 16
}

/// π in fixed point, from Machin's formula.
pub fn pi(prec: u64) -> Fixed {
    // pi = 16 atan(1/5) - 4 atan(1/239); 8 extra bits absorb truncation
    let work = prec + 8;
    let a = atan_inv(5, work).mul_small(16);
    let b = atan_inv(239, work).mul_small(4);
    a.sub(&b).with_precision(prec)
}

fn atan_inv(n: u64, prec: u64) -> Fixed {
    // atan(1/n) = sum_k (-1)^k / ((2k+1) n^{2k+1})
    let one = Fixed::one(prec);
    let mut power = one.div_small(n);
    let n2 = n * n;
    let mut sum = Fixed::zero(prec);
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = power.div_small(2 * k + 1);
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        power = power.div_small(n2);
        k += 1;
    }
    sum
}

/// 2/√π in fixed point.
pub fn two_over_sqrt_pi(prec: u64) -> Fixed {
    let work = prec + 16;
    let sqrt_pi = pi(work).sqrt();
    Fixed::one(work).mul_small(2).div(&sqrt_pi).with_precision(prec)
}

/// erf(z) from its Maclaurin series, rounded to `f64` components.
pub fn erf(re: f64, im: f64) -> (f64, f64) {
    let prec = precision_for(re, im);
    let z = FixedComplex::from_f64(re, im, prec);
    let minus_z2 = z.mul(&z).neg();
    // t_n = z (-z^2)^n / n!, erf = 2/sqrt(pi) sum t_n / (2n+1)
    let mut t = z.clone();
    let mut sum = z.clone();
    let mut n: u64 = 0;
    loop {
        n += 1;
        t = t.mul(&minus_z2).div_small(n);
        if t.is_zero() && n as f64 > re * re + im * im {
            break;
        }
        sum = sum.add(&t.div_small(2 * n + 1));
    }
    sum.scale(&two_over_sqrt_pi(prec)).to_f64()
}

/// Complex Dawson function F(z) = Σ (−2)^k z^{2k+1} / (2k+1)!!.
pub fn dawson_complex(re: f64, im: f64) -> (f64, f64) {
    let prec = precision_for(re, im);
    dawson_fixed(&FixedComplex::from_f64(re, im, prec), re * re + im * im).to_f64()
}

fn dawson_fixed(z: &FixedComplex, modulus_sq: f64) -> FixedComplex {
    let minus_2z2 = z.mul(z).neg().mul_small(2);
    let mut t = z.clone();
    let mut sum = z.clone();
    let mut k: u64 = 0;
    loop {
        k += 1;
        t = t.mul(&minus_2z2).div_small(2 * k + 1);
        if t.is_zero() && k as f64 > modulus_sq {
            break;
        }
        sum = sum.add(&t);
    }
    sum
}

fn exp_minus_square(z: &FixedComplex, modulus_sq: f64) -> FixedComplex {
    let minus_z2 = z.mul(z).neg();
    let mut t = FixedComplex::one(z.precision());
    let mut sum = t.clone();
    let mut n: u64 = 0;
    loop {
        n += 1;
        t = t.mul(&minus_z2).div_small(n);
        if t.is_zero() && n as f64 > modulus_sq {
            break;
        }
        sum = sum.add(&t);
    }
    sum
}

/// Faddeeva function w(z) = e^{−z²} + (2i/√π) F(z), both pieces by series.
pub fn faddeeva(re: f64, im: f64) -> (f64, f64) {
    let m2 = re * re + im * im;
    let prec = precision_for(re, im);
    let z = FixedComplex::from_f64(re, im, prec);
    let gauss = exp_minus_square(&z, m2);
    let daw = dawson_fixed(&z, m2).scale(&two_over_sqrt_pi(prec)).mul_i();
    gauss.add(&daw).to_f64()
}

/// erfi(x) = (2/√π) Σ x^{2n+1} / (n!(2n+1)); all terms positive.
pub fn erfi(x: f64) -> f64 {
    let prec = precision_for(x.abs().min(1.0), 0.0);
    let xf = Fixed::from_f64(x, prec);
    let x2 = xf.mul(&xf);
    let mut t = xf.clone();
    let mut sum = xf.clone();
    let mut n: u64 = 0;
    loop {
        n += 1;
        t = t.mul(&x2).div_small(n);
        if t.is_zero() && n as f64 > x * x {
            break;
        }
        sum = sum.add(&t.div_small(2 * n + 1));
    }
    sum.mul(&two_over_sqrt_pi(prec)).to_f64()
}

/// Real Dawson function.
pub fn dawson(x: f64) -> f64 {
    dawson_complex(x, 0.0).0
}

/// Renders a fixed-point value with `digits` decimal places, for
/// checking published constants beyond `f64` precision.
pub fn decimal_string(value: &Fixed, digits: usize) -> String {
    let ten = BigInt::from(10u32);
    let scaled: BigInt = value.mantissa() * num_traits::pow(ten, digits) >> value.precision();
    let negative = scaled < BigInt::from(0);
    let mut s = scaled.magnitude().to_string();
    while s.len() <= digits {
        s.insert(0, '0');
    }
    s.insert(s.len() - digits, '.');
    if negative {
        s.insert(0, '-');
    }
    s
}

/// erf(x) for real x kept in fixed point, for high-digit comparisons.
pub fn erf_fixed(x: f64) -> Fixed {
    let prec = precision_for(x, 0.0);
    let z = FixedComplex::from_f64(x, 0.0, prec);
    let minus_z2 = z.mul(&z).neg();
    let mut t = z.clone();
    let mut sum = z.clone();
    let mut n: u64 = 0;
    loop {
        n += 1;
        t = t.mul(&minus_z2).div_small(n);
        if t.is_zero() && n as f64 > x * x {
            break;
        }
        sum = sum.add(&t.div_small(2 * n + 1));
    }
    sum.re().mul(&two_over_sqrt_pi(prec))
}
