use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// Binary fixed-point number: `mantissa / 2^precision`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    mantissa: BigInt,
    precision: u64,
}

impl Fixed {
    pub fn zero(precision: u64) -> Self {
        Self { mantissa: BigInt::zero(), precision }
    }

    pub fn one(precision: u64) -> Self {
        Self { mantissa: BigInt::from(1) << precision, precision }
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(x: f64, precision: u64) -> Self {
        assert!(x.is_finite(), "non-finite input to fixed-point conversion");
        if x == 0.0 {
            return Self::zero(precision);
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let mut m = BigInt::from(mant);
        let shift = exp + precision as i64;
        if shift >= 0 {
            m <<= shift as u64;
        } else {
            m >>= (-shift) as u64;
        }
        if negative {
            m = -m;
        }
        Self { mantissa: m, precision }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn precision(&self) -> u64 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn with_precision(&self, precision: u64) -> Self {
        let m = if precision >= self.precision {
            &self.mantissa << (precision - self.precision)
        } else {
            &self.mantissa >> (self.precision - precision)
        };
        Self { mantissa: m, precision }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.precision, other.precision);
        Self { mantissa: &self.mantissa + &other.mantissa, precision: self.precision }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.precision, other.precision);
        Self { mantissa: &self.mantissa - &other.mantissa, precision: self.precision }
    }

    pub fn neg(&self) -> Self {
        Self { mantissa: -&self.mantissa, precision: self.precision }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.precision, other.precision);
        Self {
            mantissa: (&self.mantissa * &other.mantissa) >> self.precision,
            precision: self.precision,
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        debug_assert_eq!(self.precision, other.precision);
        let num = &self.mantissa << self.precision;
        Self { mantissa: num.div_floor(&other.mantissa), precision: self.precision }
    }

    pub fn mul_small(&self, k: u64) -> Self {
        Self { mantissa: &self.mantissa * k, precision: self.precision }
    }

    pub fn div_small(&self, k: u64) -> Self {
        // truncation toward zero keeps |t| monotone in the series loops
        Self { mantissa: &self.mantissa / BigInt::from(k), precision: self.precision }
    }

    pub fn sqrt(&self) -> Self {
        assert!(self.mantissa.sign() != Sign::Minus);
        let shifted = &self.mantissa << self.precision;
        Self { mantissa: shifted.sqrt(), precision: self.precision }
    }

    /// Correctly scaled (not correctly rounded) conversion to `f64`.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let keep = 64i64;
        let (top, shift) = if bits > keep {
            ((&self.mantissa >> (bits - keep) as u64), bits - keep)
        } else {
            (self.mantissa.clone(), 0)
        };
        let top = top.to_f64().expect("64-bit mantissa fits in f64");
        let exponent = shift - self.precision as i64;
        scale_pow2(top, exponent)
    }
}

fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Complex number with `Fixed` components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedComplex {
    re: Fixed,
    im: Fixed,
}

impl FixedComplex {
    pub fn from_f64(re: f64, im: f64, precision: u64) -> Self {
        Self { re: Fixed::from_f64(re, precision), im: Fixed::from_f64(im, precision) }
    }

    pub fn one(precision: u64) -> Self {
        Self { re: Fixed::one(precision), im: Fixed::zero(precision) }
    }

    pub fn re(&self) -> Fixed {
        self.re.clone()
    }

    pub fn precision(&self) -> u64 {
        self.re.precision()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn neg(&self) -> Self {
        Self { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Self {
        Self { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn scale(&self, k: &Fixed) -> Self {
        Self { re: self.re.mul(k), im: self.im.mul(k) }
    }

    pub fn mul_small(&self, k: u64) -> Self {
        Self { re: self.re.mul_small(k), im: self.im.mul_small(k) }
    }

    pub fn div_small(&self, k: u64) -> Self {
        Self { re: self.re.div_small(k), im: self.im.div_small(k) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}
