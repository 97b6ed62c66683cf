//! Laurent expansions of the zeros of `theta(q, x) = sum_s q^(s(s+1)/2) x^s`.
//!
//! The `j`-th zero is written `-q^-j + sign * q^kappa * sum_k g_k q^k`. The
//! solver starts from `x = -q^-j`, finds the lowest power of `q` that survives
//! in `theta(q, x)` together with the leading term of `d theta / dx`, and
//! from these reads off `sign` and `kappa`. Each further `g_m` is fixed by
//! making the next coefficient of the residual vanish. Every pivot is a unit,
//! so all coefficients stay integral; a non-unit pivot is reported as a
//! structural error.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rk::rk_recurrence;
use crate::series::{IntSeries, LaurentSeries};

fn tri(s: i64) -> i64 {
    s * (s + 1) / 2
}

/// Degree of `q^(s(s+1)/2) x^s` at `x = -q^-j`: `s(s+1)/2 - j s`.
pub fn lambda_degree(s: u64, j: u64) -> i64 {
    let (s, j) = (s as i64, j as i64);
    tri(s) - j * s
}

/// Degree of the first correction term of `Psi_s` once `x` carries a
/// correction at `q^kappa`.
pub fn mu_degree(s: u64, j: u64, kappa: i64) -> i64 {
    let (s, j) = (s as i64, j as i64);
    tri(s) - (s - 1) * j + kappa
}

/// `sum_{s>=0} c_s q^(s(s+1)/2) x^(s - d)` known below `top`, where `d = 0`
/// gives `theta` and `d = 1` (with `c_s = s`) gives `d theta / dx`.
///
/// `x` must be known to high enough precision; see [`required_precision`].
fn power_sum(x: &LaurentSeries, top: i64, derivative: bool) -> Result<LaurentSeries> {
    let v = x.lowest_nonzero().unwrap_or_else(|| x.precision());
    let d = i64::from(derivative);
    // Lower bound on the degree of term s. Increasing once s >= -v - 1.
    let floor = |s: i64| tri(s) + (s - d) * v;
    let mut acc = LaurentSeries::zero(top);
    let one_order = x.body().order().max(top.max(0) as usize);
    let mut power = LaurentSeries::new(0, IntSeries::one(one_order));
    let mut s = 0i64;
    loop {
        if s >= d {
            let f = floor(s);
            if f >= top && s >= -v - 1 {
                break;
            }
            if f < top {
                let weight = if derivative {
                    BigInt::from(s)
                } else {
                    BigInt::one()
                };
                let term = power.shift(tri(s));
                if term.precision() < top {
                    return Err(Error::InsufficientOrder(format!(
                        "term {s} known only below q^{}, need q^{top}",
                        term.precision()
                    )));
                }
                let term = term.truncate(top)?;
                let term = LaurentSeries::new(term.valuation(), term.body().scale(&weight));
                if term.valuation() < top {
                    acc = acc.add(&term)?;
                }
            }
            power = power.mul(x);
        }
        s += 1;
        if s > 1_000_000 {
            return Err(Error::InsufficientOrder("term cap reached".into()));
        }
    }
    Ok(acc)
}

/// Smallest precision of `x` (valuation `v`) for which every term of
/// `theta(q, x)` with `s <= s_max` is known below `top`.
fn required_precision(v: i64, top: i64, s_max: i64) -> i64 {
    (1..=s_max.max(1))
        .map(|s| top - tri(s) - (s - 1) * v)
        .max()
        .unwrap_or(top)
        .max(v + 1)
}

/// Number of terms of `theta` that reach below `top` for `x` of valuation `v`.
fn term_count(v: i64, top: i64) -> i64 {
    let mut s = 0;
    while tri(s + 1) + (s + 1) * v < top || s + 1 < -v - 1 {
        s += 1;
    }
    s
}

/// Pads an exact Laurent polynomial so that `theta(q, x)` is known below `top`.
fn padded(x: &LaurentSeries, top: i64) -> Result<LaurentSeries> {
    let x = x.normalized();
    let v = x.valuation();
    let need = required_precision(v, top, term_count(v, top)).max(x.precision());
    let coeffs: Vec<BigInt> = x.body().coeffs().to_vec();
    LaurentSeries::polynomial(v, coeffs, need)
}

/// `theta(q, x)` for an exact Laurent polynomial `x`, known below `top`.
pub fn theta_substitute(x: &LaurentSeries, top: i64) -> Result<LaurentSeries> {
    if x.is_zero() {
        // theta(q, 0) = 1
        return if top > 0 {
            LaurentSeries::monomial(0, BigInt::one(), top)
        } else {
            Ok(LaurentSeries::zero(top))
        };
    }
    let mut extra = 0;
    loop {
        let xp = padded(x, top + extra)?;
        match power_sum(&xp, top, false) {
            Err(Error::InsufficientOrder(_)) if extra < 64 => extra = extra * 2 + 1,
            other => return other,
        }
    }
}

/// `d theta / dx (q, x)` for an exact Laurent polynomial `x`, known below `top`.
pub fn theta_dx_substitute(x: &LaurentSeries, top: i64) -> Result<LaurentSeries> {
    let mut extra = 0;
    loop {
        let xp = padded(x, top + extra + x.normalized().valuation().abs())?;
        match power_sum(&xp, top, true) {
            Err(Error::InsufficientOrder(_)) if extra < 64 => extra = extra * 2 + 1,
            other => return other,
        }
    }
}

/// Lowest surviving term of a series computed by `f(top)`, widening the
/// window until one appears.
fn lowest_term(
    mut f: impl FnMut(i64) -> Result<LaurentSeries>,
    start: i64,
) -> Result<(i64, BigInt)> {
    let mut top = start;
    for _ in 0..24 {
        let series = f(top)?;
        if let Some(e) = series.lowest_nonzero() {
            let c = series.coeff(e).expect("inside window");
            return Ok((e, c));
        }
        top += top.abs().max(1);
    }
    Err(Error::InsufficientOrder(
        "no surviving term found in any window".into(),
    ))
}

/// The expansion `-q^-j + sign * q^kappa * sum_k g[k] q^k` of the `j`-th zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroExpansion {
    pub j: u32,
    pub kappa: i64,
    pub sign: i32,
    #[serde(serialize_with = "crate::json::bigints")]
    pub g: Vec<BigInt>,
    /// Lowest degree surviving in `theta(q, -q^-j)`.
    #[serde(skip)]
    pub leading_degree: i64,
}

impl ZeroExpansion {
    /// Highest degree through which the residual is known to vanish.
    pub fn resolved_degree(&self) -> i64 {
        self.leading_degree + self.g.len() as i64 - 1
    }

    /// Keeps `g[0..=order]`.
    pub fn truncated(&self, order: usize) -> Self {
        let mut z = self.clone();
        z.g.truncate(order + 1);
        z
    }
}

fn ansatz(j: u32, kappa: i64, sign: i32, g: &[BigInt]) -> Result<LaurentSeries> {
    let v = -i64::from(j);
    let top = kappa + g.len() as i64;
    let mut coeffs = vec![BigInt::zero(); (top - v) as usize];
    coeffs[0] = -BigInt::one();
    for (k, gk) in g.iter().enumerate() {
        coeffs[(kappa + k as i64 - v) as usize] += gk * sign;
    }
    LaurentSeries::polynomial(v, coeffs, top)
}

fn unit(c: &BigInt, what: &str) -> Result<i32> {
    if c.is_one() {
        Ok(1)
    } else if (-c).is_one() {
        Ok(-1)
    } else {
        Err(Error::Structural(format!("{what} is {c}, not a unit")))
    }
}

/// Solves for `g_0..g_(n_coeffs-1)` of the `j`-th zero.
pub fn solve_expansion(j: u32, n_coeffs: usize) -> Result<ZeroExpansion> {
    if j == 0 {
        return Err(Error::InvalidArgument("zero index j must be >= 1".into()));
    }
    if n_coeffs == 0 {
        return Err(Error::InvalidArgument("n_coeffs must be >= 1".into()));
    }
    let v = -i64::from(j);
    let x0 = LaurentSeries::monomial(v, -BigInt::one(), v + 1)?;

    let (lead_deg, lead_coeff) = lowest_term(|top| theta_substitute(&x0, top), 1)?;
    let (dx_deg, pivot) = lowest_term(|top| theta_dx_substitute(&x0, top), 1)?;
    let pivot = unit(&pivot, "derivative pivot")?;
    // Linear response: lead_coeff + pivot * a = 0.
    let sign = unit(&(-&lead_coeff * pivot), "leading correction")?;
    let kappa = lead_deg - dx_deg;
    if kappa <= v {
        return Err(Error::Structural(format!(
            "correction exponent {kappa} does not exceed -j = {v}"
        )));
    }

    let mut g = vec![BigInt::one()];
    for m in 1..n_coeffs {
        let target = lead_deg + m as i64;
        let residual = theta_substitute(&ansatz(j, kappa, sign, &g)?, target + 1)?;
        check_vanishing(&residual, target, j, m)?;
        let rho = residual.coeff(target).expect("inside window");
        // residual + sign * g_m * pivot = 0
        g.push(-rho * (sign * pivot));
    }
    let z = ZeroExpansion {
        j,
        kappa,
        sign,
        g,
        leading_degree: lead_deg,
    };
    let residual = residual_check(&z, z.resolved_degree() + 1)?;
    check_vanishing(&residual, z.resolved_degree() + 1, j, n_coeffs)?;
    Ok(z)
}

fn check_vanishing(residual: &LaurentSeries, below: i64, j: u32, step: usize) -> Result<()> {
    match residual.lowest_nonzero() {
        Some(e) if e < below => Err(Error::Structural(format!(
            "j={j}, step {step}: residual term at q^{e} did not cancel"
        ))),
        _ => Ok(()),
    }
}

/// The zero as a Laurent polynomial of valuation `-j`, exact below
/// `q^(kappa + len(g))`.
pub fn expansion_to_laurent(z: &ZeroExpansion) -> LaurentSeries {
    ansatz(z.j, z.kappa, z.sign, &z.g).expect("well-formed expansion")
}

/// `theta(q, x)` at the truncated zero, known below `top`. Coefficients
/// through [`ZeroExpansion::resolved_degree`] vanish.
pub fn residual_check(z: &ZeroExpansion, top: i64) -> Result<LaurentSeries> {
    theta_substitute(&expansion_to_laurent(z), top)
}

/// One term `Psi_s = q^(s(s+1)/2) x^s` at a given zero ansatz.
#[derive(Clone, Debug)]
pub struct PsiExpansion {
    pub s: u64,
    pub j: u64,
    pub lambda: i64,
    pub mu: i64,
    pub coeffs: LaurentSeries,
}

/// `Psi_s` at the truncated zero `z`, known below `top`.
pub fn psi_expansion(s: u64, z: &ZeroExpansion, top: i64) -> Result<PsiExpansion> {
    let j = u64::from(z.j);
    let x = expansion_to_laurent(z);
    let v = -i64::from(z.j);
    let need = required_precision(v, top, s as i64).max(x.precision());
    let x = LaurentSeries::polynomial(v, x.body().coeffs().to_vec(), need)?;
    let psi = x.pow(s as u32).shift(tri(s as i64)).truncate(top)?;
    Ok(PsiExpansion {
        s,
        j,
        lambda: lambda_degree(s, j),
        mu: mu_degree(s, j, z.kappa),
        coeffs: psi,
    })
}

/// `Delta_j = 1 + sign q^(j(j+1)/2) Phi_j`, with `-xi_j = -q^-j / Delta_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSeries {
    pub j: u32,
    pub delta: IntSeries,
    pub phi: IntSeries,
}

/// `Delta_j` through `q^order` from the relation
/// `1/Delta_j = 1 - sign q^(j(j+1)/2) sum_k g_k q^k`.
pub fn delta_series(j: u32, order: usize) -> Result<DeltaSeries> {
    if j == 0 {
        return Err(Error::InvalidArgument("zero index j must be >= 1".into()));
    }
    let t = tri(i64::from(j)) as usize;
    if order < t {
        return Err(Error::InvalidArgument(format!(
            "order {order} is below j(j+1)/2 = {t}"
        )));
    }
    let z = solve_expansion(j, order - t + 1)?;
    Ok(delta_from_expansion(&z, order))
}

/// `Delta_j` through `q^order` from an already solved expansion.
///
/// Panics if `z` does not carry enough coefficients.
pub fn delta_from_expansion(z: &ZeroExpansion, order: usize) -> DeltaSeries {
    let t = tri(i64::from(z.j)) as usize;
    assert!(
        order >= t && z.g.len() > order - t,
        "expansion too short for Delta order {order}"
    );
    let mut inv = IntSeries::one(order).into_coeffs();
    for (k, gk) in z.g.iter().take(order - t + 1).enumerate() {
        inv[t + k] -= gk * z.sign;
    }
    let delta = IntSeries::new(inv)
        .and_then(|s| s.inverse())
        .expect("unit constant term");
    let phi = IntSeries::new(delta.coeffs()[t..].iter().map(|c| c * z.sign).collect())
        .expect("non-empty");
    DeltaSeries { j: z.j, delta, phi }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub k: usize,
    #[serde(serialize_with = "crate::json::bigint")]
    pub g: BigInt,
    #[serde(serialize_with = "crate::json::bigint")]
    pub r: BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationRow {
    pub j: u32,
    /// Number of leading indices `k >= 1` checked against `r_k`.
    pub checked: usize,
    pub matches: bool,
    pub sign: i32,
    pub kappa: i64,
    /// First `k >= 1` where `g_k != r_k`, among the computed coefficients.
    pub first_divergence: Option<Divergence>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub j_max: u32,
    pub depth: usize,
    pub rows: Vec<StabilizationRow>,
}

impl StabilizationReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

/// For each `2 <= j <= j_max`, compares `g_(j,k)` with `r_k` for
/// `1 <= k <= min(depth, j)`, and also looks one index past `j` for the
/// first divergence.
pub fn stabilization_report(j_max: u32, depth: usize) -> Result<StabilizationReport> {
    if j_max < 2 {
        return Err(Error::InvalidArgument("j_max must be >= 2".into()));
    }
    let horizon = depth.max(j_max as usize + 1);
    let r = rk_recurrence(horizon).values;
    let rows = (2..=j_max)
        .map(|j| {
            let look = depth.max(j as usize + 1);
            let z = solve_expansion(j, look + 1)?;
            let checked = depth.min(j as usize);
            let matches = (1..=checked).all(|k| z.g[k] == r[k]);
            let first_divergence = (1..=look).find(|&k| z.g[k] != r[k]).map(|k| Divergence {
                k,
                g: z.g[k].clone(),
                r: r[k].clone(),
            });
            Ok(StabilizationRow {
                j,
                checked,
                matches,
                sign: z.sign,
                kappa: z.kappa,
                first_divergence,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilizationReport { j_max, depth, rows })
}

/// `(-1)^j` as the sign convention predicts.
pub fn expected_sign(j: u32) -> i32 {
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `j(j-1)/2`.
pub fn expected_kappa(j: u32) -> i64 {
    let j = i64::from(j);
    j * (j - 1) / 2
}

/// Magnitude-free check used by reports: every `g_k` is a positive integer.
pub fn all_positive(z: &ZeroExpansion) -> bool {
    z.g.iter().all(Signed::is_positive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_degree(0, 4), 0);
        assert_eq!(lambda_degree(3, 4), -6);
        assert_eq!(lambda_degree(4, 4), -6);
        assert_eq!(lambda_degree(8, 4), 4);
        for j in 1..20u64 {
            assert_eq!(lambda_degree(2 * j, j), j as i64);
            assert_eq!(lambda_degree(j - 1, j), -((j * (j - 1) / 2) as i64));
        }
    }

    #[test]
    fn lambda_symmetry_and_steps() {
        for j in 1..=50u64 {
            for nu in 0..j {
                assert_eq!(lambda_degree(nu, j), lambda_degree(2 * j - 1 - nu, j));
            }
            for s in 0..=3 * j {
                assert_eq!(
                    lambda_degree(s + 1, j) - lambda_degree(s, j),
                    s as i64 + 1 - j as i64
                );
            }
        }
    }

    #[test]
    fn mu_minimum_at_j_minus_one_and_j() {
        for j in 2..12u64 {
            let kappa = (j * (j - 1) / 2) as i64;
            let lo = mu_degree(j - 1, j, kappa);
            assert_eq!(lo, mu_degree(j, j, kappa));
            assert_eq!(lo, j as i64);
            for s in 1..3 * j {
                if s != j && s != j - 1 {
                    assert!(mu_degree(s, j, kappa) > lo);
                }
            }
        }
    }

    #[test]
    fn worked_example_j4() {
        let z = solve_expansion(4, 6).unwrap();
        assert_eq!(z.g, ints(&[1, 3, 9, 22, 51, 107]));
        assert_eq!(z.kappa, 6);
        assert_eq!(z.sign, 1);
    }

    #[test]
    fn generic_sextuple() {
        for j in 5..=8 {
            assert_eq!(
                solve_expansion(j, 6).unwrap().g,
                ints(&[1, 3, 9, 22, 51, 108])
            );
        }
    }

    #[test]
    fn j1_anomaly() {
        let z = solve_expansion(1, 2).unwrap();
        assert_eq!(z.g, ints(&[1, 2]));
        assert_eq!(z.sign, -1);
        assert_eq!(z.kappa, 0);
    }

    #[test]
    fn small_j_systems_match_stated_rows() {
        // j=2: -a+1=0, -b+3a=0, -c+3b=0
        assert_eq!(solve_expansion(2, 3).unwrap().g, ints(&[1, 3, 9]));
        // j=3 adds -d+3c-5a=0
        assert_eq!(solve_expansion(3, 4).unwrap().g, ints(&[1, 3, 9, 22]));
    }

    #[test]
    fn delta_rows() {
        let rows = [
            (1, [1, -1, -1, -1, -2, -4, -10, -25, -66, -178]),
            (2, [1, 0, 0, 1, 3, 9, 24, 66, 180, 498]),
            (3, [1, 0, 0, 0, 0, 0, -1, -3, -9, -22]),
        ];
        for (j, row) in rows {
            let d = delta_series(j, 9).unwrap();
            assert_eq!(d.delta.coeffs(), &ints(&row)[..], "j={j}");
            assert!(d.phi.coeffs()[0].is_one());
        }
    }

    #[test]
    fn delta_order_too_small() {
        assert!(matches!(delta_series(3, 5), Err(Error::InvalidArgument(_))));
        assert!(delta_series(3, 6).is_ok());
    }

    #[test]
    fn invalid_inputs() {
        assert!(solve_expansion(0, 3).is_err());
        assert!(solve_expansion(3, 0).is_err());
        assert!(stabilization_report(1, 3).is_err());
    }

    #[test]
    fn laurent_forms() {
        let z1 = expansion_to_laurent(&solve_expansion(1, 3).unwrap());
        assert_eq!(z1.valuation(), -1);
        assert_eq!(z1.coeff(-1), Some(BigInt::from(-1)));
        assert_eq!(z1.coeff(0), Some(BigInt::from(-1)));
        assert_eq!(z1.coeff(1), Some(BigInt::from(-2)));

        let z2 = expansion_to_laurent(&solve_expansion(2, 3).unwrap());
        assert_eq!(z2.coeff(-2), Some(BigInt::from(-1)));
        assert_eq!(z2.coeff(0), Some(BigInt::zero()));
        assert_eq!(z2.coeff(1), Some(BigInt::from(1)));
        assert_eq!(z2.coeff(3), Some(BigInt::from(9)));

        let z4 = expansion_to_laurent(&solve_expansion(4, 6).unwrap());
        let expect = [(6, 1), (7, 3), (8, 9), (9, 22), (10, 51), (11, 107)];
        for (e, c) in expect {
            assert_eq!(z4.coeff(e), Some(BigInt::from(c)));
        }
        assert_eq!(z4.precision(), 12);
    }

    #[test]
    fn residual_of_bare_leading_term_cancels_negative_degrees() {
        let x = LaurentSeries::monomial(-3, -BigInt::one(), -2).unwrap();
        let res = theta_substitute(&x, 4).unwrap();
        assert_eq!(res.lowest_nonzero(), Some(3));
    }

    #[test]
    fn residual_at_zero_is_one() {
        let res = theta_substitute(&LaurentSeries::zero(5), 5).unwrap();
        assert_eq!(res.coeff(0), Some(BigInt::one()));
        assert_eq!(res.terms().count(), 1);
    }

    #[test]
    fn residual_above_resolved_window() {
        let z = solve_expansion(4, 6).unwrap();
        assert_eq!(z.resolved_degree(), 9);
        let res = residual_check(&z, 14).unwrap();
        assert!(res.lowest_nonzero().unwrap() > 9);
    }

    #[test]
    fn delta_and_laurent_agree() {
        for j in 1..=6u32 {
            let t = (j * (j + 1) / 2) as usize;
            let z = solve_expansion(j, 8).unwrap();
            let d = delta_from_expansion(&z, t + 7);
            let inv = d.delta.inverse().unwrap();
            let from_delta = LaurentSeries::new(0, inv).shift(-i64::from(j)).neg();
            let from_zero = expansion_to_laurent(&z);
            let common = from_delta.precision().min(from_zero.precision());
            assert_eq!(
                from_delta.truncate(common).unwrap(),
                from_zero.truncate(common).unwrap(),
                "j={j}"
            );
        }
    }

    #[test]
    fn paired_terms_leading_structure() {
        for j in [4u32, 5] {
            let z = solve_expansion(j, 4).unwrap();
            let jj = u64::from(j);
            for l in 0..jj {
                let top = 3 * j as i64 + 10;
                let a = psi_expansion(jj - 1 - l, &z, top).unwrap();
                let b = psi_expansion(jj + l, &z, top).unwrap();
                assert_eq!(a.lambda, b.lambda);
                let sum = a.coeffs.add(&b.coeffs).unwrap();
                let lead = lambda_degree(jj + l, jj) + i64::from(j) + z.kappa;
                assert_eq!(sum.lowest_nonzero(), Some(lead), "j={j} l={l}");
                // (-1)^(j+l-1) (2l+1) times the leading correction sign
                let parity = if (u64::from(j) + l) % 2 == 1 { 1 } else { -1 };
                let expect = parity * i64::from(z.sign) * (2 * l as i64 + 1);
                assert_eq!(sum.coeff(lead), Some(BigInt::from(expect)));
            }
        }
    }

    #[test]
    fn stabilization_examples() {
        let rep = stabilization_report(4, 4).unwrap();
        assert!(rep.all_match());
        let j2 = &rep.rows[0];
        assert_eq!(
            j2.first_divergence,
            Some(Divergence {
                k: 3,
                g: 23.into(),
                r: 22.into()
            })
        );
        let j4 = &rep.rows[2];
        assert_eq!(
            j4.first_divergence,
            Some(Divergence {
                k: 5,
                g: 107.into(),
                r: 108.into()
            })
        );
    }
}
