//! Evaluation of `theta(q, x)` and `d theta / dx` with truncation bounds.
//!
//! Summation stops at the first term `s` for which the term ratio
//! `|q|^(s+1) |x|` is at most `1/2` and the term itself is at most `eps/2`.
//! From there on the ratios only shrink, so the tail is dominated by a
//! geometric series started at the next term.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bigcomplex::BigComplex;
use crate::error::{Error, Result};

/// Hard cap on summed terms.
pub const TERM_CAP: usize = 1_000_000;

/// Working precision for extended evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    /// 53-bit mantissa.
    Double,
    /// Explicit mantissa width in bits.
    Bits(u32),
    /// Chosen from the magnitude of the largest term and the requested accuracy.
    #[default]
    Auto,
}

impl Precision {
    pub(crate) fn resolve(self, auto_bits: impl FnOnce() -> usize) -> usize {
        match self {
            Precision::Double => 53,
            Precision::Bits(b) => (b as usize).max(16),
            Precision::Auto => auto_bits().max(53),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalResult {
    pub value: Complex64,
    /// Bound on the omitted tail of the series.
    pub tail_bound: f64,
    /// Estimate of accumulated rounding error, including conversion of the
    /// result to `f64`.
    pub rounding_bound: f64,
    pub terms_used: usize,
    pub precision_bits: usize,
}

pub(crate) struct BigEval {
    pub value: BigComplex,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    pub terms_used: usize,
}

// f64 magnitudes are rounded; inflate derived bounds slightly.
const SLACK: f64 = 1.0 + 1e-9;

/// `log2` of the largest term modulus `|q|^(s(s+1)/2) |x|^s`.
pub(crate) fn max_term_log2(q_abs: f64, x_abs: f64) -> f64 {
    if q_abs == 0.0 || x_abs == 0.0 {
        return 0.0;
    }
    let (lq, lx) = (q_abs.log2(), x_abs.log2());
    let mut best = 0.0f64;
    let mut s = 0.0f64;
    // Past the point where |q|^(s+1)|x| < 1 terms only decrease.
    while (s + 1.0) * lq + lx >= 0.0 && s < TERM_CAP as f64 {
        s += 1.0;
        best = best.max(s * (s + 1.0) / 2.0 * lq + s * lx);
    }
    best
}

pub(crate) fn auto_bits(max_term_log2: f64, eps: f64) -> usize {
    let need = max_term_log2 - eps.log2();
    53 + need.max(0.0).ceil() as usize + 16
}

fn check_domain(q_abs: f64) -> Result<()> {
    if !(q_abs < 1.0) {
        return Err(Error::Domain(format!("|q| = {q_abs} is not below 1")));
    }
    Ok(())
}

/// Sums `theta` (or `d theta/dx` when `derivative`) at working precision
/// `bits`, which the caller has already applied to `q` and `x`.
pub(crate) fn eval_big(
    q: &BigComplex,
    x: &BigComplex,
    eps: f64,
    bits: usize,
    derivative: bool,
) -> Result<BigEval> {
    let (qa, xa) = (q.abs_f64(), x.abs_f64());
    check_domain(qa)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    // term = q^(s(s+1)/2) x^(s - d); qpow = q^(s+1)
    let d = usize::from(derivative);
    let mut sum = BigComplex::zero(bits);
    let mut term = if derivative {
        q.clone()
    } else {
        BigComplex::one(bits)
    };
    let mut qpow = if derivative { q.mul(q) } else { q.clone() };
    let mut qpow_abs = if derivative { qa * qa } else { qa };
    let mut s = d;
    let mut max_term = 0.0f64;
    let mut terms_used = 0usize;
    loop {
        let weight = if derivative { s as f64 } else { 1.0 };
        let contrib = if derivative {
            term.scale_f64(weight)
        } else {
            term.clone()
        };
        sum = sum.add(&contrib);
        terms_used += 1;
        let mag = contrib.abs_f64();
        max_term = max_term.max(mag);
        // |t_(s+1)| / |t_s|, including the weight change for the derivative
        let growth = if derivative {
            (s as f64 + 1.0) / s as f64
        } else {
            1.0
        };
        let ratio = growth * qpow_abs * xa;
        if ratio <= 0.5 && mag <= eps / 2.0 {
            let next = mag * ratio;
            let next_growth = if derivative {
                (s as f64 + 2.0) / (s as f64 + 1.0)
            } else {
                1.0
            };
            let later = next_growth * qpow_abs * qa * xa;
            let tail_bound = next / (1.0 - later) * SLACK;
            let rounding_bound = 4.0 * terms_used as f64 * max_term * 2f64.powi(-(bits as i32));
            return Ok(BigEval {
                value: sum,
                tail_bound,
                rounding_bound,
                terms_used,
            });
        }
        if terms_used >= TERM_CAP {
            return Err(Error::NoConvergence(format!(
                "series summation exceeded {TERM_CAP} terms"
            )));
        }
        term = term.mul(&qpow).mul(x);
        qpow = qpow.mul(q);
        qpow_abs *= qa;
        s += 1;
    }
}

fn public(e: BigEval, bits: usize) -> EvalResult {
    let value = e.value.to_c64();
    EvalResult {
        value,
        tail_bound: e.tail_bound,
        // plus the final rounding of each part to f64
        rounding_bound: e.rounding_bound + value.norm() * f64::EPSILON,
        terms_used: e.terms_used,
        precision_bits: bits,
    }
}

fn eval_c64(
    q: Complex64,
    x: Complex64,
    eps: f64,
    precision: Precision,
    derivative: bool,
) -> Result<EvalResult> {
    check_domain(q.norm())?;
    let bits = precision.resolve(|| auto_bits(max_term_log2(q.norm(), x.norm()), eps));
    let bq = BigComplex::from_c64(q, bits);
    let bx = BigComplex::from_c64(x, bits);
    eval_big(&bq, &bx, eps, bits, derivative).map(|e| public(e, bits))
}

/// `theta(q, x)` with `|value - theta| <= tail_bound <= eps` up to rounding.
pub fn theta_eval(
    q: Complex64,
    x: Complex64,
    eps: f64,
    precision: Precision,
) -> Result<EvalResult> {
    eval_c64(q, x, eps, precision, false)
}

/// `d theta / dx (q, x) = sum_{s>=1} s q^(s(s+1)/2) x^(s-1)`, same bound scheme.
pub fn theta_dx(q: Complex64, x: Complex64, eps: f64, precision: Precision) -> Result<EvalResult> {
    eval_c64(q, x, eps, precision, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn theta_at_zero_x_is_one() {
        for q in [0.0, 0.3, -0.7] {
            let r = theta_eval(c(q), c(0.0), 1e-12, Precision::Double).unwrap();
            assert_eq!(r.value, c(1.0));
        }
    }

    #[test]
    fn theta_small_q_direct_sum() {
        // 1 + 0.1 + 0.001 + 1e-6 + 1e-10 + 1e-15 + ...
        let oracle: f64 = (0..12).map(|j| 0.1f64.powi(j * (j + 1) / 2)).sum();
        let r = theta_eval(c(0.1), c(1.0), 1e-15, Precision::Auto).unwrap();
        assert!((r.value.re - oracle).abs() < 1e-15);
        assert!((r.value.re - 1.1010010001).abs() < 1e-14);
        assert!(r.tail_bound <= 1e-15);
    }

    #[test]
    fn derivative_at_zero_x_is_q() {
        let r = theta_dx(c(0.2), c(0.0), 1e-14, Precision::Double).unwrap();
        assert!((r.value.re - 0.2).abs() < 1e-16);
        let r = theta_dx(c(0.0), c(5.0), 1e-14, Precision::Double).unwrap();
        assert_eq!(r.value, c(0.0));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let (q, x, h) = (c(0.05), c(-10.0), 1e-6);
        let f = |x: Complex64| theta_eval(q, x, 1e-20, Precision::Bits(160)).unwrap().value;
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        let d = theta_dx(q, x, 1e-20, Precision::Bits(160)).unwrap().value;
        assert!((fd - d).norm() < 1e-8 * d.norm().max(1.0), "{fd} vs {d}");
    }

    #[test]
    fn complex_arguments() {
        let q = Complex64::new(0.1, 0.2);
        let x = Complex64::new(-1.0, 3.0);
        let oracle: Complex64 = (0..40)
            .map(|s: i32| q.powi(s * (s + 1) / 2) * x.powi(s))
            .sum();
        let r = theta_eval(q, x, 1e-14, Precision::Auto).unwrap();
        assert!((r.value - oracle).norm() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            theta_eval(c(1.0), c(1.0), 1e-8, Precision::Double),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            theta_eval(Complex64::new(0.8, 0.8), c(1.0), 1e-8, Precision::Double),
            Err(Error::Domain(_))
        ));
        assert!(theta_eval(c(0.5), c(1.0), 0.0, Precision::Double).is_err());
    }

    #[test]
    fn auto_precision_grows_with_term_size() {
        let small = theta_eval(c(0.5), c(1.0), 1e-10, Precision::Auto).unwrap();
        let big = theta_eval(c(0.02), c(-1e10), 1e-10, Precision::Auto).unwrap();
        assert!(big.precision_bits > small.precision_bits + 60);
    }
}
