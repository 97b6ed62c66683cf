//! Numerical witnesses for the analytic properties of `M(q) = (q)_inf^3` and
//! `(q)_inf` on the real interval.
//!
//! With `M = exp(3L)`, `L = sum_k ln(1 - q^k)`, convexity of `M` on `(0, 1)`
//! reduces to `3 L'^2 + L'' > 0`. Writing `3 L'^2 = sum_s q^s S_s` and
//! `L'' = -sum_s q^s T_s`, it suffices that `S_s > T_s` termwise, which
//! follows from `S_s > 3(s+1)/(1-q^(s+1))^3 > T_s`. A finite grid can only
//! witness these inequalities, never prove them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::bigcomplex::Float;

fn check_unit_interval(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} is not in (0, 1)")));
    }
    Ok(())
}

/// `ln(1 - q^k)`, accurate when `q^k` is tiny or close to 1.
fn ln_one_minus_pow(q: f64, k: i32) -> f64 {
    (-q.powi(k)).ln_1p()
}

/// `1 / ((1-q^a)^2 (1-q^b)^2)` accumulated in log space.
fn inv_sq_pair(q: f64, a: i32, b: i32) -> f64 {
    (-2.0 * ln_one_minus_pow(q, a) - 2.0 * ln_one_minus_pow(q, b)).exp()
}

/// Coefficient of `q^s` in `3 L'^2`, as a function of `q`.
pub fn s_value(s: u32, q: f64) -> Result<f64> {
    check_unit_interval(q)?;
    let s = s as i32;
    let m = s + 2;
    let pairs = if s % 2 == 0 { s / 2 } else { (s + 1) / 2 };
    let mut sum: f64 = (1..=pairs).map(|nu| 6.0 * inv_sq_pair(q, nu, m - nu)).sum();
    if s % 2 == 0 {
        sum += 3.0 * (-4.0 * ln_one_minus_pow(q, s / 2 + 1)).exp();
    }
    Ok(sum)
}

/// `T_s = (s+1)/(1-q^(s+2))^2 + 2(s+1) q^s/(1-q^(s+1))^3`.
pub fn t_value(s: u32, q: f64) -> Result<f64> {
    check_unit_interval(q)?;
    let n = f64::from(s) + 1.0;
    let s = s as i32;
    let a = n * (-2.0 * ln_one_minus_pow(q, s + 2)).exp();
    let b = 2.0 * n * q.powi(s) * (-3.0 * ln_one_minus_pow(q, s + 1)).exp();
    Ok(a + b)
}

/// The separating bound `3(s+1)/(1-q^(s+1))^3`.
pub fn bridge_value(s: u32, q: f64) -> Result<f64> {
    check_unit_interval(q)?;
    let n = f64::from(s) + 1.0;
    Ok(3.0 * n * (-3.0 * ln_one_minus_pow(q, s as i32 + 1)).exp())
}

const SERIES_EPS: f64 = 1e-18;
const SERIES_CAP: i32 = 1_000_000;

/// Sums `term(k)` for `k = start..` until a term is negligible relative to
/// the running sum, once terms have started to decrease.
fn sum_until_small(start: i32, term: impl Fn(i32) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in start..SERIES_CAP {
        let t = term(k);
        sum += t;
        if t.abs() <= SERIES_EPS * sum.abs() && t.abs() <= prev.abs() {
            break;
        }
        prev = t;
    }
    sum
}

/// `L'(q) = -sum_{j>=1} q^(j-1)/(1-q^j)^2`.
pub fn l_prime(q: f64) -> f64 {
    -sum_until_small(1, |j| q.powi(j - 1) * (-2.0 * ln_one_minus_pow(q, j)).exp())
}

/// `U(q) = -sum_{j>=2} (j-1) q^(j-2)/(1-q^j)^2`.
pub fn u_series(q: f64) -> f64 {
    -sum_until_small(2, |j| {
        f64::from(j - 1) * q.powi(j - 2) * (-2.0 * ln_one_minus_pow(q, j)).exp()
    })
}

/// `V(q) = -sum_{j>=1} j q^(2j-2)/(1-q^j)^3`.
pub fn v_series(q: f64) -> f64 {
    -sum_until_small(1, |j| {
        f64::from(j) * q.powi(2 * j - 2) * (-3.0 * ln_one_minus_pow(q, j)).exp()
    })
}

/// `L''(q) = U + 2V`.
pub fn l_second(q: f64) -> f64 {
    u_series(q) + 2.0 * v_series(q)
}

/// `sum_{s<=s_max} q^s S_s(q)`, which tends to `3 L'(q)^2`.
pub fn s_partial_sum(q: f64, s_max: u32) -> Result<f64> {
    (0..=s_max).try_fold(0.0, |acc, s| Ok(acc + q.powi(s as i32) * s_value(s, q)?))
}

/// `-sum_{s<=s_max} q^s T_s(q)`, which tends to `L''(q)`.
pub fn t_partial_sum(q: f64, s_max: u32) -> Result<f64> {
    (0..=s_max).try_fold(0.0, |acc, s| Ok(acc - q.powi(s as i32) * t_value(s, q)?))
}

/// Logarithmic derivatives of `(q)_inf` in product form, valid on `(-1, 1)`:
/// `(L, L', L'')` with `L = sum_k ln(1 - q^k)`.
pub fn euler_log_derivatives(q: f64) -> (f64, f64, f64) {
    let l = sum_until_small(1, |k| ln_one_minus_pow(q, k));
    let l1 = -sum_until_small(1, |k| {
        let qk = q.powi(k);
        f64::from(k) * q.powi(k - 1) / (1.0 - qk)
    });
    let l2 = -sum_until_small(1, |k| {
        let kf = f64::from(k);
        let qk = q.powi(k);
        let first = if k >= 2 {
            kf * (kf - 1.0) * q.powi(k - 2) / (1.0 - qk)
        } else {
            0.0
        };
        first + kf * kf * q.powi(2 * k - 2) / ((1.0 - qk) * (1.0 - qk))
    });
    (l, l1, l2)
}

/// `((q)_inf)^c` and its second derivative at `q`, from the product form.
pub fn euler_power_and_second(q: f64, c: f64) -> (f64, f64) {
    let (l, l1, l2) = euler_log_derivatives(q);
    let f = (c * l).exp();
    (f, f * (c * c * l1 * l1 + c * l2))
}

/// `M''(q)` from `M = exp(3L)`: `M'' = M (9 L'^2 + 3 L'')`.
pub fn m_second_derivative_product(q: f64) -> Result<f64> {
    check_unit_interval(q)?;
    Ok(euler_power_and_second(q, 3.0).1)
}

fn sparse_weight(j: u64) -> (u64, f64) {
    let e = j * (j + 1) / 2;
    let c = (2 * j + 1) as f64 * (e as f64) * (e as f64 - 1.0);
    (e, if j.is_multiple_of(2) { c } else { -c })
}

/// `M''(q) = sum_j (-1)^j (2j+1) e(e-1) q^(e-2)`, `e = j(j+1)/2`, summed over
/// every `e <= order`.
///
/// The alternating terms cancel heavily as `q -> 1`, so the sum is carried in
/// binary floating point at a precision wide enough for the ratio between
/// the largest term and the product-form estimate, and accepted once two
/// precisions agree. The first omitted term must be below `1e-12` relative
/// to the result.
pub fn m_second_derivative(q: f64, order: u64) -> Result<f64> {
    check_unit_interval(q)?;
    let mut js = 0u64;
    while sparse_weight(js + 1).0 <= order {
        js += 1;
    }
    let terms: Vec<(u64, f64)> = (0..=js).map(sparse_weight).collect();
    let (next_e, next_c) = sparse_weight(js + 1);
    let omitted = next_c.abs() * q.powi(next_e as i32 - 2);
    let largest = terms
        .iter()
        .map(|&(e, c)| {
            if e < 2 {
                0.0
            } else {
                c.abs() * q.powi(e as i32 - 2)
            }
        })
        .fold(0.0, f64::max);
    let estimate = m_second_derivative_product(q)?.abs().max(f64::MIN_POSITIVE);
    let base_bits = 96 + (largest / estimate).log2().max(0.0).ceil() as usize;

    let sum_at = |bits: usize| -> f64 {
        let qf = Float::try_from(q)
            .expect("finite")
            .with_precision(bits)
            .value();
        let mut acc = Float::try_from(0.0)
            .expect("finite")
            .with_precision(bits)
            .value();
        for &(e, c) in &terms {
            if e < 2 {
                continue;
            }
            let coeff = Float::try_from(c)
                .expect("finite")
                .with_precision(bits)
                .value();
            acc += coeff * qf.powi((e - 2).into());
        }
        acc.to_f64().value()
    };
    let mut bits = base_bits;
    let mut value = sum_at(bits);
    for _ in 0..8 {
        let wider = sum_at(bits * 2);
        let agrees = (wider - value).abs() <= 1e-12 * wider.abs();
        value = wider;
        if agrees {
            break;
        }
        bits *= 2;
    }
    if !(omitted <= 1e-12 * value.abs()) {
        return Err(Error::InsufficientOrder(format!(
            "first omitted term {omitted:e} is not negligible against M'' = {value:e}; raise order above {order}"
        )));
    }
    Ok(value)
}

/// Smallest sparse order for which [`m_second_derivative`] accepts `q`.
pub fn m_second_derivative_auto(q: f64) -> Result<f64> {
    let mut order = 64u64;
    loop {
        match m_second_derivative(q, order) {
            Err(Error::InsufficientOrder(_)) if order < 1 << 24 => order *= 2,
            other => return other,
        }
    }
}

/// `0.01, 0.02, ..., 0.99`.
pub fn default_grid() -> Vec<f64> {
    (1..=99).map(|k| f64::from(k) / 100.0).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityRow {
    pub q: f64,
    pub s: u32,
    pub s_value: f64,
    pub t_value: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub q_grid: Vec<f64>,
    pub s_max: u32,
    /// Smallest `S_s - T_s`.
    pub min_margin: f64,
    /// Smallest `S_s - 3(s+1)/(1-q^(s+1))^3`.
    pub min_upper_margin: f64,
    /// Smallest `3(s+1)/(1-q^(s+1))^3 - T_s`.
    pub min_lower_margin: f64,
    /// Smallest `M''` over the grid from the sparse series.
    pub mpp_min: f64,
    /// Smallest `M''` over the grid from the product form.
    pub mpp_product_min: f64,
    pub all_pass: bool,
    /// Always "witnessed": the check covers finitely many points.
    pub status: &'static str,
}

/// Checks `S_s > 3(s+1)/(1-q^(s+1))^3 > T_s` for every grid point and
/// `s <= s_max`, and `M'' > 0` at every grid point.
pub fn verify_s_gt_t(q_grid: &[f64], s_max: u32) -> Result<ConvexityReport> {
    let mut min_margin = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    let mut min_lower = f64::INFINITY;
    let mut mpp_min = f64::INFINITY;
    let mut mpp_product_min = f64::INFINITY;
    for &q in q_grid {
        for s in 0..=s_max {
            let (sv, tv, bv) = (s_value(s, q)?, t_value(s, q)?, bridge_value(s, q)?);
            min_margin = min_margin.min(sv - tv);
            min_upper = min_upper.min(sv - bv);
            min_lower = min_lower.min(bv - tv);
        }
        mpp_min = mpp_min.min(m_second_derivative_auto(q)?);
        mpp_product_min = mpp_product_min.min(m_second_derivative_product(q)?);
    }
    let all_pass = !q_grid.is_empty()
        && min_margin > 0.0
        && min_upper > 0.0
        && min_lower > 0.0
        && mpp_min > 0.0
        && mpp_product_min > 0.0;
    Ok(ConvexityReport {
        q_grid: q_grid.to_vec(),
        s_max,
        min_margin,
        min_upper_margin: min_upper,
        min_lower_margin: min_lower,
        mpp_min,
        mpp_product_min,
        all_pass,
        status: "witnessed",
    })
}

/// Per-point rows `(q, s, S_s, T_s, S_s - T_s)` for plotting.
pub fn convexity_rows(q_grid: &[f64], s_max: u32) -> Result<Vec<ConvexityRow>> {
    let mut rows = Vec::with_capacity(q_grid.len() * (s_max as usize + 1));
    for &q in q_grid {
        for s in 0..=s_max {
            let (sv, tv) = (s_value(s, q)?, t_value(s, q)?);
            rows.push(ConvexityRow {
                q,
                s,
                s_value: sv,
                t_value: tv,
                margin: sv - tv,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub q: f64,
    pub m: f64,
    pub euler: f64,
    pub m_second: f64,
    pub euler_second: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeProfile {
    pub rows: Vec<ProfileRow>,
    pub argmax_m: f64,
    pub argmax_euler: f64,
    pub max_m: f64,
    pub max_euler: f64,
    pub all_positive: bool,
    /// Both functions strictly decrease across the grid points in `[0, 1)`.
    pub decreasing_on_nonnegative: bool,
    /// Grid intervals across which `M''` changes sign.
    pub m_inflection_brackets: Vec<(f64, f64)>,
    pub euler_inflection_brackets: Vec<(f64, f64)>,
}

fn sign_changes(rows: &[ProfileRow], f: impl Fn(&ProfileRow) -> f64) -> Vec<(f64, f64)> {
    rows.windows(2)
        .filter(|w| f(&w[0]).signum() != f(&w[1]).signum() || f(&w[1]) == 0.0)
        .map(|w| (w[0].q, w[1].q))
        .collect()
}

/// Tabulates `M` and `(q)_inf` with their second derivatives on a sorted
/// grid inside `(-1, 1)`.
pub fn shape_profile(q_grid: &[f64]) -> Result<ShapeProfile> {
    if q_grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if let Some(&q) = q_grid.iter().find(|q| !(q.abs() < 1.0)) {
        return Err(Error::Domain(format!(
            "grid point {q} is not inside (-1, 1)"
        )));
    }
    let mut grid = q_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let rows: Vec<ProfileRow> = grid
        .iter()
        .map(|&q| {
            let (m, m_second) = euler_power_and_second(q, 3.0);
            let (euler, euler_second) = euler_power_and_second(q, 1.0);
            ProfileRow {
                q,
                m,
                euler,
                m_second,
                euler_second,
            }
        })
        .collect();
    let argmax = |f: fn(&ProfileRow) -> f64| {
        rows.iter()
            .max_by(|a, b| f(a).total_cmp(&f(b)))
            .map(|r| (r.q, f(r)))
            .expect("non-empty")
    };
    let (argmax_m, max_m) = argmax(|r| r.m);
    let (argmax_euler, max_euler) = argmax(|r| r.euler);
    let nonneg: Vec<&ProfileRow> = rows.iter().filter(|r| r.q >= 0.0).collect();
    let decreasing_on_nonnegative = nonneg
        .windows(2)
        .all(|w| w[1].m < w[0].m && w[1].euler < w[0].euler);
    Ok(ShapeProfile {
        all_positive: rows.iter().all(|r| r.m > 0.0 && r.euler > 0.0),
        m_inflection_brackets: sign_changes(&rows, |r| r.m_second),
        euler_inflection_brackets: sign_changes(&rows, |r| r.euler_second),
        rows,
        argmax_m,
        argmax_euler,
        max_m,
        max_euler,
        decreasing_on_nonnegative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_small_cases() {
        for q in [0.1f64, 0.5, 0.9] {
            let s0 = 3.0 / (1.0 - q).powi(4);
            assert!((s_value(0, q).unwrap() - s0).abs() < 1e-12 * s0);
            let s1 = 6.0 / ((1.0 - q).powi(2) * (1.0 - q * q).powi(2));
            assert!((s_value(1, q).unwrap() - s1).abs() < 1e-12 * s1);
        }
    }

    #[test]
    fn t_small_case() {
        for q in [0.1f64, 0.5, 0.9] {
            let t0 = 1.0 / (1.0 - q * q).powi(2) + 2.0 / (1.0 - q).powi(3);
            assert!((t_value(0, q).unwrap() - t0).abs() < 1e-12 * t0);
        }
    }

    #[test]
    fn hand_checked_point() {
        let s0 = s_value(0, 0.5).unwrap();
        let t0 = t_value(0, 0.5).unwrap();
        assert!((s0 - 48.0).abs() < 1e-12);
        assert!((t0 - (1.0 / 0.5625 + 16.0)).abs() < 1e-12);
        assert!(s0 > t0);
    }

    #[test]
    fn t_below_bridge_on_samples() {
        for s in [0, 1, 2, 5, 17, 100] {
            for q in [0.01, 0.3, 0.77, 0.99] {
                assert!(t_value(s, q).unwrap() < bridge_value(s, q).unwrap());
            }
        }
    }

    #[test]
    fn domain() {
        assert!(s_value(0, 0.0).is_err());
        assert!(t_value(0, 1.0).is_err());
        assert!(m_second_derivative(-0.1, 100).is_err());
    }

    #[test]
    fn lambert_and_product_forms_of_l_prime_agree() {
        for q in [-0.7, -0.2, 0.1, 0.5, 0.9] {
            let (_, l1, _) = euler_log_derivatives(q);
            assert!((l1 - l_prime(q)).abs() < 1e-10 * l1.abs(), "q={q}");
            let (_, _, l2) = euler_log_derivatives(q);
            assert!((l2 - l_second(q)).abs() < 1e-10 * l2.abs(), "q={q}");
        }
    }

    #[test]
    fn m_second_series_matches_product() {
        for q in [0.05, 0.5, 0.9, 0.99] {
            let a = m_second_derivative_auto(q).unwrap();
            let b = m_second_derivative_product(q).unwrap();
            assert!(a > 0.0);
            assert!((a - b).abs() < 1e-8 * b.abs(), "q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn low_order_is_rejected() {
        assert!(matches!(
            m_second_derivative(0.9, 10),
            Err(Error::InsufficientOrder(_))
        ));
    }

    #[test]
    fn m_at_origin() {
        // M(0) = 1, M'(0) = -3
        let (l, l1, _) = euler_log_derivatives(0.0);
        assert_eq!(l, 0.0);
        assert_eq!(3.0 * l1, -3.0);
    }

    #[test]
    fn profile_shape() {
        let grid: Vec<f64> = (-99..=99).map(|k| f64::from(k) / 100.0).collect();
        let p = shape_profile(&grid).unwrap();
        assert!(p.all_positive);
        assert!(p.decreasing_on_nonnegative);
        assert!(p.argmax_m < 0.0 && p.argmax_m > -1.0);
        assert!(p.max_m > 1.0 && p.max_euler > 1.0);
        let m_half = p.rows.iter().find(|r| r.q == 0.5).unwrap().m;
        assert!(m_half > 0.0 && m_half < 1.0);
    }
}
