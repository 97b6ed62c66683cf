//! The full reference suite: golden fixtures plus exact and numerical
//! cross-checks. Each check is independent and reports a one-line detail.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::analysis;
use crate::error::Result;
use crate::fixtures::Golden;
use crate::numeric::{convergence_sweep, find_zero, ZeroFindParams};
use crate::rk::{self, RkMethod};
use crate::zeros::{self, delta_series, expected_kappa, expected_sign, solve_expansion};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: u32, name: &'static str, outcome: Result<(bool, String)>) -> Self {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        Self {
            id,
            name,
            passed,
            detail,
        }
    }
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().copied().map(BigInt::from).collect()
}

/// `r_1..=r_20` from each method against the fixture, and three-way
/// agreement at `agree_n`.
pub fn check_rk_golden(golden: &Golden, agree_n: usize) -> Result<(bool, String)> {
    let n = golden.rk.len();
    let expected: Vec<BigInt> = golden.rk.iter().copied().map(BigInt::from).collect();
    let small = rk::cross_validate(n);
    let mut bad = Vec::new();
    for m in RkMethod::ALL {
        if small.table(m).values[1..] != expected[..] {
            bad.push(m.name());
        }
    }
    let big = rk::cross_validate(agree_n);
    let ok = bad.is_empty() && small.agree() && big.agree();
    Ok((
        ok,
        format!(
            "fixture mismatches: [{}]; methods agree at n={agree_n}: {}",
            bad.join(", "),
            big.agree()
        ),
    ))
}

pub fn check_triple_product(order: usize) -> Result<(bool, String)> {
    let rep = rk::verify_triple_product(order);
    let detail = match &rep.first_mismatch {
        None => format!("(q)_inf^3 = triple-product series through q^{order}"),
        Some(m) => format!(
            "first mismatch at q^{}: {} vs {}",
            m.exponent, m.left, m.right
        ),
    };
    Ok((rep.holds, detail))
}

pub fn check_delta_rows(golden: &Golden) -> Result<(bool, String)> {
    let mut bad = Vec::new();
    for (j, row) in golden.delta.rows() {
        let d = delta_series(j, row.len() - 1)?;
        if d.delta.coeffs() != &ints(row)[..] {
            bad.push(j.to_string());
        }
    }
    Ok((
        bad.is_empty(),
        format!("mismatched rows j = [{}]", bad.join(", ")),
    ))
}

pub fn check_worked_examples(golden: &Golden) -> Result<(bool, String)> {
    let ex = &golden.expansion;
    let mut bad = Vec::new();
    if solve_expansion(4, ex.j4.len())?.g != ints(&ex.j4) {
        bad.push(4);
    }
    for j in ex.stable_j_from..=ex.stable_j_to {
        if solve_expansion(j, ex.stable.len())?.g != ints(&ex.stable) {
            bad.push(j);
        }
    }
    let list: Vec<String> = bad.iter().map(u32::to_string).collect();
    Ok((
        bad.is_empty(),
        format!("mismatched j = [{}]", list.join(", ")),
    ))
}

pub fn check_stabilization(j_max: u32) -> Result<(bool, String)> {
    let rep = zeros::stabilization_report(j_max, j_max as usize)?;
    let mut sign_bad = Vec::new();
    for j in 1..=j_max {
        let z = solve_expansion(j, 1)?;
        if z.sign != expected_sign(j) || z.kappa != expected_kappa(j) {
            sign_bad.push(j.to_string());
        }
    }
    let unmatched: Vec<String> = rep
        .rows
        .iter()
        .filter(|r| !r.matches)
        .map(|r| r.j.to_string())
        .collect();
    Ok((
        unmatched.is_empty() && sign_bad.is_empty(),
        format!(
            "g_(j,k) = r_k fails for j = [{}]; sign/exponent wrong for j = [{}]",
            unmatched.join(", "),
            sign_bad.join(", ")
        ),
    ))
}

pub fn check_first_zero_anomaly(golden: &Golden) -> Result<(bool, String)> {
    let c = &golden.expansion.j1;
    let z = solve_expansion(1, c.k + 1)?;
    Ok((
        z.g[c.k] == BigInt::from(c.value),
        format!("g_(1,{}) = {}", c.k, z.g[c.k]),
    ))
}

pub const NUMERIC_Q: [f64; 4] = [0.02, 0.05, 0.1, 0.108];
pub const NUMERIC_SEED_ORDER: usize = 12;
pub const NUMERIC_TOL: f64 = 1e-10;

pub fn check_numeric_agreement(j_max: u32) -> Result<(bool, String)> {
    let mut worst_residual = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut failures = Vec::new();
    for &qv in &NUMERIC_Q {
        let q = Complex64::new(qv, 0.0);
        for j in 1..=j_max {
            let rep = find_zero(&ZeroFindParams::new(q, j, NUMERIC_SEED_ORDER, NUMERIC_TOL))?;
            worst_residual = worst_residual.max(rep.residual);
            worst_ratio = worst_ratio.max(rep.bound_ratio());
            let orders: Vec<usize> = (0..=NUMERIC_SEED_ORDER).collect();
            let sweep = convergence_sweep(q, j, &orders, NUMERIC_TOL)?;
            let sweep_ok = sweep.strictly_decreasing();
            if !(rep.residual <= NUMERIC_TOL && rep.bound_ratio() <= 10.0 && sweep_ok) {
                failures.push(format!("(q={qv}, j={j})"));
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!(
            "max |theta| = {worst_residual:.3e}, max agreement/omitted = {worst_ratio:.3}; failing [{}]",
            failures.join(", ")
        ),
    ))
}

pub fn check_difference_monotonicity(n: usize) -> Result<(bool, String)> {
    let rep = rk::difference_monotonicity(n);
    let failures: Vec<String> = rep
        .failures
        .iter()
        .map(|f| format!("{}@{}", f.sequence, f.k))
        .collect();
    Ok((
        rep.all_pass(),
        format!(
            "n={n}; monotonicity failures [{}]; telescoping failure {:?}; positivity failure {:?}",
            failures.join(", "),
            rep.telescoping_failure,
            rep.positivity_failure
        ),
    ))
}

pub fn check_convexity(s_max: u32) -> Result<(bool, String)> {
    let rep = analysis::verify_s_gt_t(&analysis::default_grid(), s_max)?;
    Ok((
        rep.all_pass,
        format!(
            "{}: min S-B = {:.3e}, min B-T = {:.3e}, min M'' = {:.3e}",
            rep.status, rep.min_upper_margin, rep.min_lower_margin, rep.mpp_min
        ),
    ))
}

pub const PARTIAL_SUM_Q: [f64; 3] = [0.1, 0.3, 0.5];

pub fn check_partial_sums(s_max: u32, tol: f64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &q in &PARTIAL_SUM_Q {
        let lp = analysis::l_prime(q);
        worst = worst.max((analysis::s_partial_sum(q, s_max)? - 3.0 * lp * lp).abs());
        worst = worst.max((analysis::t_partial_sum(q, s_max)? - analysis::l_second(q)).abs());
    }
    Ok((
        worst <= tol,
        format!("max deviation {worst:.3e} (tol {tol:e})"),
    ))
}

/// All checks at their reference sizes.
pub fn verify_all() -> Vec<Check> {
    let g = Golden::embedded();
    vec![
        Check::new(1, "rk-golden", check_rk_golden(&g, 1000)),
        Check::new(2, "triple-product", check_triple_product(500)),
        Check::new(3, "delta-golden", check_delta_rows(&g)),
        Check::new(4, "worked-examples", check_worked_examples(&g)),
        Check::new(5, "stabilization", check_stabilization(12)),
        Check::new(6, "first-zero-anomaly", check_first_zero_anomaly(&g)),
        Check::new(7, "symbolic-numeric", check_numeric_agreement(6)),
        Check::new(
            8,
            "difference-monotonicity",
            check_difference_monotonicity(10_000),
        ),
        Check::new(9, "convexity-witness", check_convexity(200)),
        Check::new(10, "partial-sums", check_partial_sums(200, 1e-8)),
    ]
}
