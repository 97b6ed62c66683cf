//! Truncated formal power series and Laurent series with exact integer
//! coefficients.
//!
//! An [`IntSeries`] of order `n` is known modulo `q^(n+1)`. Binary operations
//! truncate to the smaller of the operand orders and never extend a result
//! past what both inputs determine.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Power series in `q` truncated at `order`; `coeffs[k]` is the coefficient
/// of `q^k` and there are exactly `order + 1` of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntSeries {
    coeffs: Vec<BigInt>,
}

impl IntSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a series needs at least one coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, BigInt::one(), order)
    }

    /// `coeff * q^exp` known through `order`. Vanishes if `exp > order`.
    pub fn monomial(exp: usize, coeff: BigInt, order: usize) -> Self {
        let mut s = Self::zero(order);
        if exp <= order {
            s.coeffs[exp] = coeff;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&BigInt> {
        self.coeffs.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drops coefficients above `order`. Asking for a larger order than is
    /// known is an error: it would claim coefficients that were never computed.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::InsufficientOrder(format!(
                "cannot extend a series of order {} to order {order}",
                self.order()
            )));
        }
        Ok(Self {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn lowest_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Exact Cauchy product truncated to `min(self.order, other.order)`.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![BigInt::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (b, slot) in other.coeffs[..=order - i].iter().zip(&mut out[i..]) {
                if !b.is_zero() {
                    *slot += a * b;
                }
            }
        }
        Self { coeffs: out }
    }

    /// Multiplicative inverse through `self.order`. The constant term must be
    /// `1` or `-1` so that the result stays integral.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.abs() != BigInt::one() {
            return Err(Error::NonInvertible(a0.to_string()));
        }
        let n = self.order();
        let mut inv: Vec<BigInt> = Vec::with_capacity(n + 1);
        inv.push(a0.clone());
        for m in 1..=n {
            let mut acc = BigInt::zero();
            for k in 1..=m {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    acc += a * &inv[m - k];
                }
            }
            // 1/a0 == a0 for a0 = ±1
            inv.push(-(acc * a0));
        }
        Ok(Self { coeffs: inv })
    }

    /// `self^n` by repeated squaring, truncated to `self.order`.
    pub fn pow(&self, mut n: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplies in place by `(1 - q^k)`, `k >= 1`.
    pub fn mul_one_minus_monomial(&mut self, k: usize) {
        assert!(k >= 1, "factor exponent must be positive");
        for i in (k..self.coeffs.len()).rev() {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            hi[0] -= &lo[i - k];
        }
    }

    /// Divides in place by `(1 - q^k)`, `k >= 1`.
    pub fn div_one_minus_monomial(&mut self, k: usize) {
        assert!(k >= 1, "factor exponent must be positive");
        for i in k..self.coeffs.len() {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            hi[0] += &lo[i - k];
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: self.coeffs[..=order]
                .iter()
                .zip(&other.coeffs[..=order])
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

/// Euler's function `(q)_inf = prod_{k>=1} (1 - q^k)` through `order`.
///
/// Factors with `k > order` leave every retained coefficient unchanged.
pub fn euler_product(order: usize) -> IntSeries {
    let mut s = IntSeries::one(order);
    for k in 1..=order {
        s.mul_one_minus_monomial(k);
    }
    s
}

impl Add for &IntSeries {
    type Output = IntSeries;
    fn add(self, rhs: &IntSeries) -> IntSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &IntSeries {
    type Output = IntSeries;
    fn sub(self, rhs: &IntSeries) -> IntSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &IntSeries {
    type Output = IntSeries;
    fn mul(self, rhs: &IntSeries) -> IntSeries {
        IntSeries::mul(self, rhs)
    }
}

impl Neg for &IntSeries {
    type Output = IntSeries;
    fn neg(self) -> IntSeries {
        IntSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for IntSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, 0, &self.coeffs)?;
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, valuation: i64, coeffs: &[BigInt]) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = valuation + k as i64;
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        match (e, mag.is_one()) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => write!(f, "q")?,
            (1, false) => write!(f, "{mag}*q")?,
            (_, true) => write!(f, "q^{e}")?,
            (_, false) => write!(f, "{mag}*q^{e}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Laurent series `sum_k body[k] q^(valuation + k)`, known below
/// [`precision`](Self::precision).
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    valuation: i64,
    body: IntSeries,
}

impl LaurentSeries {
    pub fn new(valuation: i64, body: IntSeries) -> Self {
        Self { valuation, body }
    }

    /// Exact Laurent polynomial `sum coeffs[k] q^(valuation+k)`, padded with
    /// zeros so that it is known below `precision`.
    pub fn polynomial(valuation: i64, coeffs: Vec<BigInt>, precision: i64) -> Result<Self> {
        let needed = precision - valuation;
        if needed < 1 {
            return Err(Error::InvalidArgument(format!(
                "precision {precision} must exceed valuation {valuation}"
            )));
        }
        let needed = needed as usize;
        if coeffs.len() > needed && coeffs[needed..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InsufficientOrder(format!(
                "polynomial has terms at or above precision {precision}"
            )));
        }
        let mut coeffs = coeffs;
        coeffs.resize(needed, BigInt::zero());
        Ok(Self::new(valuation, IntSeries::new(coeffs)?))
    }

    /// `coeff * q^exp` known below `precision`.
    pub fn monomial(exp: i64, coeff: BigInt, precision: i64) -> Result<Self> {
        Self::polynomial(exp, vec![coeff], precision)
    }

    /// The zero series known below `precision`.
    pub fn zero(precision: i64) -> Self {
        Self::new(precision - 1, IntSeries::zero(0))
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn body(&self) -> &IntSeries {
        &self.body
    }

    /// First exponent whose coefficient is not determined.
    pub fn precision(&self) -> i64 {
        self.valuation + self.body.order() as i64 + 1
    }

    /// Coefficient of `q^exp`, or `None` if `exp` lies at or above the precision.
    pub fn coeff(&self, exp: i64) -> Option<BigInt> {
        if exp >= self.precision() {
            None
        } else if exp < self.valuation {
            Some(BigInt::zero())
        } else {
            Some(self.body.coeffs[(exp - self.valuation) as usize].clone())
        }
    }

    /// Lowest exponent with a nonzero coefficient, if any is known.
    pub fn lowest_nonzero(&self) -> Option<i64> {
        self.body
            .lowest_nonzero()
            .map(|k| self.valuation + k as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// Strips leading zero coefficients; an all-zero series becomes
    /// [`LaurentSeries::zero`] at the same precision.
    pub fn normalized(&self) -> Self {
        match self.body.lowest_nonzero() {
            None => Self::zero(self.precision()),
            Some(0) => self.clone(),
            Some(k) => Self::new(
                self.valuation + k as i64,
                IntSeries {
                    coeffs: self.body.coeffs[k..].to_vec(),
                },
            ),
        }
    }

    /// Multiplication by `q^by`.
    pub fn shift(&self, by: i64) -> Self {
        Self::new(self.valuation + by, self.body.clone())
    }

    /// Valuations add; the relative order is the smaller of the two.
    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.valuation + other.valuation, self.body.mul(&other.body))
    }

    pub fn pow(&self, n: u32) -> Self {
        Self::new(self.valuation * i64::from(n), self.body.pow(n))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.valuation, -&self.body)
    }

    /// Sum aligned on the lower valuation and truncated to the common
    /// precision. Operands whose known windows do not overlap are rejected:
    /// one of them would vanish into the other's error term.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (pa, pb) = (self.precision(), other.precision());
        if pa <= other.valuation || pb <= self.valuation {
            return Err(Error::InsufficientOrder(format!(
                "windows [{}, {pa}) and [{}, {pb}) do not overlap",
                self.valuation, other.valuation
            )));
        }
        let valuation = self.valuation.min(other.valuation);
        let precision = pa.min(pb);
        let mut coeffs = vec![BigInt::zero(); (precision - valuation) as usize];
        for series in [self, other] {
            for (k, c) in series.body.coeffs.iter().enumerate() {
                let e = series.valuation + k as i64;
                if e >= precision {
                    break;
                }
                coeffs[(e - valuation) as usize] += c;
            }
        }
        Ok(Self::new(valuation, IntSeries { coeffs }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Keeps only exponents below `precision`.
    pub fn truncate(&self, precision: i64) -> Result<Self> {
        if precision > self.precision() {
            return Err(Error::InsufficientOrder(format!(
                "cannot extend precision {} to {precision}",
                self.precision()
            )));
        }
        if precision <= self.valuation {
            return Ok(Self::zero(precision));
        }
        Ok(Self::new(
            self.valuation,
            self.body
                .truncate((precision - self.valuation - 1) as usize)?,
        ))
    }

    /// `(exponent, coefficient)` pairs of every known nonzero term.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.body
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.valuation + k as i64, c))
    }
}

/// Equal when both series are known to the same precision and agree on
/// every known coefficient, regardless of leading-zero padding.
impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        if self.precision() != other.precision() {
            return false;
        }
        let lo = self.valuation.min(other.valuation);
        (lo..self.precision()).all(|e| self.coeff(e) == other.coeff(e))
    }
}

impl Eq for LaurentSeries {}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.valuation, &self.body.coeffs)?;
        write!(f, " + O(q^{})", self.precision())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64]) -> IntSeries {
        IntSeries::from_i64s(c).unwrap()
    }

    #[test]
    fn make_series_examples() {
        assert_eq!(s(&[1]).order(), 0);
        assert_eq!(s(&[1, -1, -1]).order(), 2);
        assert_eq!(s(&[1, -3, 0, 5]).coeffs()[3], BigInt::from(5));
        assert!(matches!(
            IntSeries::new(vec![]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(s(&[1, 1, 0]).mul(&s(&[1, -1, 0])), s(&[1, 0, -1]));
        let e = euler_product(6);
        assert_eq!(e.pow(3), s(&[1, -3, 0, 5, 0, 0, -7]));
        assert_eq!(e.mul(&s(&[1])), s(&[1]));
        assert_eq!(e.mul(&IntSeries::one(6)), e);
    }

    #[test]
    fn mul_truncates_to_min_order() {
        assert_eq!(s(&[1, 1, 1, 1]).mul(&s(&[1, 1])).order(), 1);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(s(&[1, -1, 0, 0, 0]).inverse().unwrap(), s(&[1, 1, 1, 1, 1]));
        let m = euler_product(5).pow(3);
        assert_eq!(m.inverse().unwrap(), s(&[1, 3, 9, 22, 51, 108]));
        assert_eq!(s(&[1]).inverse().unwrap(), s(&[1]));
        assert_eq!(s(&[-1, 1]).inverse().unwrap(), s(&[-1, -1]));
        assert!(matches!(s(&[2, 1]).inverse(), Err(Error::NonInvertible(_))));
        assert!(matches!(s(&[0, 1]).inverse(), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(s(&[1, 1, 0]).pow(2), s(&[1, 2, 1]));
        assert_eq!(s(&[3, 1, 4]).pow(0), IntSeries::one(2));
        let tp: Vec<i64> = vec![1, -3, 0, 5, 0, 0, -7, 0, 0, 0, 9];
        assert_eq!(euler_product(10).pow(3), s(&tp));
    }

    #[test]
    fn euler_product_examples() {
        assert_eq!(euler_product(7), s(&[1, -1, -1, 0, 0, 1, 0, 1]));
        assert_eq!(euler_product(1), s(&[1, -1]));
        assert_eq!(euler_product(0), s(&[1]));
    }

    #[test]
    fn truncate_refuses_to_extend() {
        assert!(s(&[1, 2]).truncate(3).is_err());
        assert_eq!(s(&[1, 2, 3]).truncate(1).unwrap(), s(&[1, 2]));
    }

    #[test]
    fn one_minus_monomial_round_trip() {
        let mut a = s(&[1, 4, -2, 7, 0, 3]);
        let orig = a.clone();
        a.mul_one_minus_monomial(2);
        a.div_one_minus_monomial(2);
        assert_eq!(a, orig);
    }

    fn mono(e: i64, c: i64, prec: i64) -> LaurentSeries {
        LaurentSeries::monomial(e, BigInt::from(c), prec).unwrap()
    }

    #[test]
    fn laurent_examples() {
        let one = mono(0, 1, 10);
        let shifted = one.shift(-4);
        assert_eq!(shifted.valuation(), -4);
        assert_eq!(shifted.coeff(-4), Some(BigInt::one()));

        let a = mono(-3, 1, 5);
        let sq = a.mul(&a);
        assert_eq!(sq.lowest_nonzero(), Some(-6));

        let z = mono(-4, 1, 3).add(&mono(-4, -1, 3)).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.normalized(), LaurentSeries::zero(3));
        assert_eq!(z, LaurentSeries::zero(3));
    }

    #[test]
    fn laurent_add_window_rules() {
        // 1 + O(q) cannot absorb q^5 + O(q^6)
        let a = mono(0, 1, 1);
        let b = mono(5, 1, 6);
        assert!(matches!(a.add(&b), Err(Error::InsufficientOrder(_))));
        // overlapping windows truncate to the common precision
        let c = mono(-2, 1, 4).add(&mono(1, 3, 8)).unwrap();
        assert_eq!(c.precision(), 4);
        assert_eq!(c.coeff(1), Some(BigInt::from(3)));
    }

    #[test]
    fn laurent_mul_precision() {
        // (q^-1 + O(q^2)) * (1 + 2q + O(q^3)): relative order min(2, 2)
        let a = LaurentSeries::polynomial(-1, vec![BigInt::one()], 2).unwrap();
        let b = LaurentSeries::polynomial(0, vec![1.into(), 2.into()], 3).unwrap();
        let p = a.mul(&b);
        assert_eq!(p.valuation(), -1);
        assert_eq!(p.precision(), 2);
        assert_eq!(p.coeff(0), Some(BigInt::from(2)));
    }

    #[test]
    fn display() {
        assert_eq!(s(&[1, -3, 0, 5]).to_string(), "1 - 3*q + 5*q^3 + O(q^4)");
        assert_eq!(mono(-4, -1, 0).to_string(), "-q^-4 + O(q^0)");
    }
}
