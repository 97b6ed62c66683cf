//! The stabilized coefficient sequence `r_k` (OEIS A000716), the
//! coefficients of `1/(q)_inf^3`, computed three independent ways.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::series::{euler_product, IntSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RkMethod {
    /// Signed sum over triangular-number lags.
    Recurrence,
    /// Inverse of the cube of the Euler product.
    EulerCube,
    /// Inverse of the sparse triple-product series for `(q)_inf^3`.
    TripleProductInverse,
}

impl RkMethod {
    pub const ALL: [RkMethod; 3] = [
        RkMethod::Recurrence,
        RkMethod::EulerCube,
        RkMethod::TripleProductInverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RkMethod::Recurrence => "recurrence",
            RkMethod::EulerCube => "euler-cube",
            RkMethod::TripleProductInverse => "triple-product-inverse",
        }
    }
}

impl fmt::Display for RkMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `r_0..=r_n` together with the method that produced them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RkTable {
    pub n: usize,
    pub method: RkMethod,
    #[serde(serialize_with = "crate::json::bigints")]
    pub values: Vec<BigInt>,
}

impl RkTable {
    pub fn compute(n: usize, method: RkMethod) -> Self {
        match method {
            RkMethod::Recurrence => rk_recurrence(n),
            RkMethod::EulerCube => rk_euler_cube(n),
            RkMethod::TripleProductInverse => rk_triple_product_inverse(n),
        }
    }

    pub fn as_series(&self) -> IntSeries {
        IntSeries::new(self.values.clone()).expect("table holds r_0")
    }
}

/// `r_k = sum_{nu>=1} (-1)^(nu-1) (2 nu + 1) r_(k - nu(nu+1)/2)`, `r_0 = 1`.
pub fn rk_recurrence(n: usize) -> RkTable {
    let mut r: Vec<BigInt> = Vec::with_capacity(n + 1);
    r.push(BigInt::one());
    for k in 1..=n {
        let mut acc = BigInt::zero();
        // Terms with nu(nu+1)/2 > k read r at a negative index, which is 0.
        let mut nu = 1usize;
        loop {
            let lag = nu * (nu + 1) / 2;
            if lag > k {
                break;
            }
            let term = &r[k - lag] * BigInt::from(2 * nu + 1);
            if nu % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            nu += 1;
        }
        r.push(acc);
    }
    RkTable {
        n,
        method: RkMethod::Recurrence,
        values: r,
    }
}

pub fn rk_euler_cube(n: usize) -> RkTable {
    let cube = euler_product(n).pow(3);
    RkTable {
        n,
        method: RkMethod::EulerCube,
        values: cube.inverse().expect("unit constant term").into_coeffs(),
    }
}

pub fn rk_triple_product_inverse(n: usize) -> RkTable {
    RkTable {
        n,
        method: RkMethod::TripleProductInverse,
        values: triple_product_series(n)
            .inverse()
            .expect("unit constant term")
            .into_coeffs(),
    }
}

/// `sum_{j>=0} (-1)^j (2j+1) q^(j(j+1)/2)` materialized densely through `order`.
pub fn triple_product_series(order: usize) -> IntSeries {
    let mut s = IntSeries::zero(order).into_coeffs();
    let mut j = 0usize;
    loop {
        let e = j * (j + 1) / 2;
        if e > order {
            break;
        }
        let c = BigInt::from(2 * j + 1);
        s[e] = if j.is_multiple_of(2) { c } else { -c };
        j += 1;
    }
    IntSeries::new(s).expect("non-empty")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientMismatch {
    pub exponent: usize,
    #[serde(serialize_with = "crate::json::bigint")]
    pub left: BigInt,
    #[serde(serialize_with = "crate::json::bigint")]
    pub right: BigInt,
}

fn first_mismatch(a: &[BigInt], b: &[BigInt]) -> Option<CoefficientMismatch> {
    a.iter()
        .zip(b)
        .enumerate()
        .find(|(_, (x, y))| x != y)
        .map(|(k, (x, y))| CoefficientMismatch {
            exponent: k,
            left: x.clone(),
            right: y.clone(),
        })
}

/// Outcome of comparing `prod (1-q^k)^3` against the sparse series.
#[derive(Clone, Debug, Serialize)]
pub struct TripleProductReport {
    pub order: usize,
    pub holds: bool,
    /// `left` is the cubed product, `right` the sparse series.
    pub first_mismatch: Option<CoefficientMismatch>,
}

pub fn verify_triple_product(order: usize) -> TripleProductReport {
    let product = euler_product(order).pow(3);
    let sparse = triple_product_series(order);
    let first_mismatch = first_mismatch(product.coeffs(), sparse.coeffs());
    TripleProductReport {
        order,
        holds: first_mismatch.is_none(),
        first_mismatch,
    }
}

/// Result of running every [`RkMethod`] at the same `n`.
#[derive(Clone, Debug)]
pub struct CrossValidation {
    pub n: usize,
    pub tables: Vec<RkTable>,
    /// First disagreement of a method against the recurrence.
    pub disagreement: Option<(RkMethod, CoefficientMismatch)>,
}

impl CrossValidation {
    pub fn agree(&self) -> bool {
        self.disagreement.is_none()
    }

    pub fn table(&self, method: RkMethod) -> &RkTable {
        self.tables
            .iter()
            .find(|t| t.method == method)
            .expect("all methods computed")
    }
}

/// Runs the three methods concurrently and compares them exactly.
pub fn cross_validate(n: usize) -> CrossValidation {
    let tables: Vec<RkTable> = std::thread::scope(|scope| {
        let handles: Vec<_> = RkMethod::ALL
            .iter()
            .map(|&m| scope.spawn(move || RkTable::compute(n, m)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("rk worker panicked"))
            .collect()
    });
    let reference = &tables[0];
    let disagreement = tables[1..]
        .iter()
        .find_map(|t| first_mismatch(&reference.values, &t.values).map(|m| (t.method, m)));
    CrossValidation {
        n,
        tables,
        disagreement,
    }
}

/// Coefficients of `R^3 W`, `R^2 W`, `R W` and `W`, where `R = 1/(1-q)` and
/// `W = prod_{k>=2} (1-q^k)^-3`.
#[derive(Clone, Debug)]
pub struct AuxCoeffTable {
    pub n: usize,
    pub r: Vec<BigInt>,
    pub s: Vec<BigInt>,
    pub t: Vec<BigInt>,
    pub u: Vec<BigInt>,
}

impl AuxCoeffTable {
    /// Obtains `W = (1-q)^3 / (q)_inf^3` from the given `r`, then rebuilds
    /// `RW` and `R^2 W` by partial sums.
    pub fn from_r(r: &[BigInt]) -> Self {
        assert!(!r.is_empty(), "need at least r_0");
        let n = r.len() - 1;
        let mut w = IntSeries::new(r.to_vec()).expect("non-empty");
        for _ in 0..3 {
            w.mul_one_minus_monomial(1);
        }
        let u = w.into_coeffs();
        let prefix = |v: &[BigInt]| -> Vec<BigInt> {
            v.iter()
                .scan(BigInt::zero(), |acc, x| {
                    *acc += x;
                    Some(acc.clone())
                })
                .collect()
        };
        let t = prefix(&u);
        let s = prefix(&t);
        Self {
            n,
            r: r.to_vec(),
            s,
            t,
            u,
        }
    }

    /// First `k` where `r_(k+1) = r_k + s_(k+1)`, `s_(k+1) = s_k + t_(k+1)` or
    /// `t_(k+1) = t_k + u_(k+1)` fails.
    pub fn telescoping_failure(&self) -> Option<usize> {
        (0..self.n).find(|&k| {
            self.r[k + 1] != &self.r[k] + &self.s[k + 1]
                || self.s[k + 1] != &self.s[k] + &self.t[k + 1]
                || self.t[k + 1] != &self.t[k] + &self.u[k + 1]
        })
    }

    /// First `k >= 2` where one of `s_k, t_k, u_k` is not positive.
    pub fn positivity_failure(&self) -> Option<usize> {
        (2..=self.n).find(|&k| {
            !(self.s[k].is_positive() && self.t[k].is_positive() && self.u[k].is_positive())
        })
    }
}

/// `prod_{k=2}^{order} (1-q^k)^-3` expanded directly, independent of any `r`.
pub fn w_series_direct(order: usize) -> IntSeries {
    let mut w = IntSeries::one(order);
    for k in 2..=order {
        for _ in 0..3 {
            w.div_one_minus_monomial(k);
        }
    }
    w
}

/// Where a strictly increasing check first failed: the sequence name and the
/// index `k` with `x_k >= x_(k+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityFailure {
    pub sequence: &'static str,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub n: usize,
    pub failures: Vec<MonotonicityFailure>,
    pub telescoping_failure: Option<usize>,
    pub positivity_failure: Option<usize>,
}

impl MonotonicityReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
            && self.telescoping_failure.is_none()
            && self.positivity_failure.is_none()
    }
}

fn first_non_increase(v: &[BigInt]) -> Option<usize> {
    v.windows(2).position(|w| w[0] >= w[1])
}

/// Checks that `r_k`, `r_(k+1) - r_k` and `r_(k+2) - 2 r_(k+1) + r_k` (the
/// last from `k = 1`) are strictly increasing over every comparison
/// determined by `r_0..=r_(n+1)`, and checks the auxiliary table.
///
/// Panics if `n < 3`.
pub fn difference_monotonicity(n: usize) -> MonotonicityReport {
    assert!(n >= 3, "difference_monotonicity needs n >= 3");
    let r = rk_recurrence(n + 1).values;
    let d: Vec<BigInt> = r.windows(2).map(|w| &w[1] - &w[0]).collect();
    let e: Vec<BigInt> = d.windows(2).skip(1).map(|w| &w[1] - &w[0]).collect();
    let mut failures = Vec::new();
    if let Some(k) = first_non_increase(&r) {
        failures.push(MonotonicityFailure { sequence: "r", k });
    }
    if let Some(k) = first_non_increase(&d) {
        failures.push(MonotonicityFailure {
            sequence: "first-difference",
            k,
        });
    }
    if let Some(k) = first_non_increase(&e) {
        failures.push(MonotonicityFailure {
            sequence: "second-difference",
            k: k + 1,
        });
    }
    let aux = AuxCoeffTable::from_r(&r);
    MonotonicityReport {
        n,
        failures,
        telescoping_failure: aux.telescoping_failure(),
        positivity_failure: aux.positivity_failure(),
    }
}

/// Exact ratios `r_(k+1)/r_k` for `k = 0..n`, with observations about the
/// prefix. Whether the ratios decrease is reported, never required.
#[derive(Clone, Debug)]
pub struct RatioProfile {
    pub ratios: Vec<BigRational>,
    /// `None` if the ratios decrease strictly from `k = 1` on.
    pub first_increase_from_k1: Option<usize>,
}

impl RatioProfile {
    pub fn observed_decreasing(&self) -> bool {
        self.first_increase_from_k1.is_none()
    }

    pub fn last_ratio_f64(&self) -> f64 {
        self.ratios
            .last()
            .and_then(ToPrimitive::to_f64)
            .unwrap_or(f64::NAN)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.ratios
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

/// Panics if `n < 1`.
pub fn ratio_profile(n: usize) -> RatioProfile {
    assert!(n >= 1, "ratio_profile needs n >= 1");
    let r = rk_recurrence(n).values;
    let ratios: Vec<BigRational> = r
        .windows(2)
        .map(|w| BigRational::new(w[1].clone(), w[0].clone()))
        .collect();
    let first_increase_from_k1 = ratios
        .windows(2)
        .enumerate()
        .skip(1)
        .find(|(_, w)| w[1] >= w[0])
        .map(|(k, _)| k);
    RatioProfile {
        ratios,
        first_increase_from_k1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn recurrence_small() {
        assert_eq!(rk_recurrence(5).values, ints(&[1, 3, 9, 22, 51, 108]));
        assert_eq!(rk_recurrence(0).values, ints(&[1]));
        let r20 = rk_recurrence(20).values;
        assert_eq!(r20[19], BigInt::from(221910));
        assert_eq!(r20[20], BigInt::from(341649));
    }

    #[test]
    fn euler_cube_small() {
        assert_eq!(rk_euler_cube(3).values, ints(&[1, 3, 9, 22]));
        assert_eq!(rk_euler_cube(0).values, ints(&[1]));
    }

    #[test]
    fn triple_product_examples() {
        assert_eq!(
            triple_product_series(6).coeffs(),
            &ints(&[1, -3, 0, 5, 0, 0, -7])[..]
        );
        assert_eq!(triple_product_series(0).coeffs(), &ints(&[1])[..]);
        assert_eq!(triple_product_series(10).coeffs()[10], BigInt::from(9));
        assert!(verify_triple_product(0).holds);
        assert!(verify_triple_product(6).holds);
    }

    #[test]
    fn three_methods_agree() {
        let cv = cross_validate(300);
        assert!(cv.agree(), "{:?}", cv.disagreement);
    }

    #[test]
    fn monotonicity_small() {
        let rep = difference_monotonicity(3);
        assert!(rep.all_pass(), "{rep:?}");
        let rep = difference_monotonicity(20);
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn second_difference_n3_values() {
        // 22 - 18 + 3 = 7 and 51 - 44 + 9 = 16
        let r = rk_recurrence(4).values;
        assert_eq!(&r[3] - 2 * &r[2] + &r[1], BigInt::from(7));
        assert_eq!(&r[4] - 2 * &r[3] + &r[2], BigInt::from(16));
    }

    #[test]
    fn aux_w_matches_direct_product() {
        let n = 200;
        let aux = AuxCoeffTable::from_r(&rk_recurrence(n).values);
        assert_eq!(aux.u, w_series_direct(n).into_coeffs());
        assert_eq!(aux.telescoping_failure(), None);
        assert_eq!(aux.positivity_failure(), None);
        assert!(aux.u[1].is_zero());
    }

    #[test]
    fn telescoping_detects_corruption() {
        let mut aux = AuxCoeffTable::from_r(&rk_recurrence(10).values);
        aux.s[4] += 1;
        assert_eq!(aux.telescoping_failure(), Some(3));
    }

    #[test]
    fn ratios() {
        let p = ratio_profile(5);
        assert_eq!(p.ratios[0], BigRational::from_integer(3.into()));
        assert_eq!(p.ratios[4], BigRational::new(108.into(), 51.into()));
    }

    #[test]
    fn method_names_serialize() {
        let s = serde_json::to_string(&RkMethod::TripleProductInverse).unwrap();
        assert_eq!(s, "\"triple-product-inverse\"");
    }
}
