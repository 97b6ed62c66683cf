//! Minimal complex arithmetic over binary arbitrary-precision floats.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_complex::Complex64;

pub type Float = FBig<HalfEven>;

fn float(v: f64, bits: usize) -> Float {
    Float::try_from(v)
        .expect("finite f64")
        .with_precision(bits)
        .value()
}

#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn from_c64(z: Complex64, bits: usize) -> Self {
        Self {
            re: float(z.re, bits),
            im: float(z.im, bits),
        }
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_c64(Complex64::new(0.0, 0.0), bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_c64(Complex64::new(1.0, 0.0), bits)
    }

    pub fn from_int(n: &num_bigint::BigInt, bits: usize) -> Self {
        let repr = dashu_int::IBig::from_str_radix(&n.to_str_radix(16), 16).expect("hex digits");
        let re = Float::from(repr).with_precision(bits).value();
        Self {
            re,
            im: float(0.0, bits),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale_f64(&self, k: f64) -> Self {
        let bits = self.re.precision().max(53);
        self.mul(&Self::from_c64(Complex64::new(k, 0.0), bits))
    }

    /// `None` when dividing by an exact zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den == Float::ZERO {
            return None;
        }
        Some(Self {
            re: (&self.re * &o.re + &self.im * &o.im) / &den,
            im: (&self.im * &o.re - &self.re * &o.im) / &den,
        })
    }

    /// `self^n` for any integer `n`; `None` for a negative power of zero.
    pub fn powi(&self, n: i64) -> Option<Self> {
        let bits = self.re.precision();
        let mut result = Self::one(bits);
        let mut base = if n < 0 {
            Self::one(bits).div(self)?
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Some(result)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().value(), self.im.to_f64().value())
    }

    /// Modulus rounded to `f64`.
    pub fn abs_f64(&self) -> f64 {
        let z = self.to_c64();
        if z.re.is_finite() && z.im.is_finite() {
            z.norm()
        } else {
            f64::INFINITY
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.re.repr().is_infinite() && !self.im.repr().is_infinite()
    }

    /// Decimal rendering of both parts with roughly `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> (String, String) {
        let render = |x: &Float| -> String {
            let d = x.to_decimal().value();
            d.with_precision(digits).value().to_string()
        };
        (render(&self.re), render(&self.im))
    }
}
