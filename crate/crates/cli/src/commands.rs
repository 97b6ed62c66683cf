use num_bigint::BigInt;
use num_complex::Complex64;
use partial_theta::analysis;
use partial_theta::fixtures::Golden;
use partial_theta::json::Ints;
use partial_theta::numeric::{
    convergence_sweep, find_zero, theta_dx, theta_eval, Precision, ZeroFindParams,
};
use partial_theta::rk::{self, RkMethod, RkTable};
use partial_theta::verify;
use partial_theta::zeros::{self, delta_series, expansion_to_laurent, solve_expansion};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{Outcome, Table};

/// Shortest round-trip text, switching to exponent form for very large or
/// small magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v)?)
}

fn ints(v: &[BigInt]) -> Result<Value, CliError> {
    to_value(&Ints(v.to_vec()))
}

pub fn rk(n: usize, method: Option<RkMethod>) -> Result<Outcome, CliError> {
    let golden = Golden::embedded();
    let fixture_match = |t: &RkTable| {
        let m = golden.rk.len().min(n);
        t.values[1..=m]
            .iter()
            .zip(&golden.rk)
            .all(|(a, b)| *a == BigInt::from(*b))
    };
    match method {
        Some(m) => {
            let t = RkTable::compute(n, m);
            let mut table = Table::new(&["k", m.name()]);
            for (k, v) in t.values.iter().enumerate() {
                table.push(vec![k.to_string(), v.to_string()]);
            }
            let matches = fixture_match(&t);
            Ok(Outcome {
                json: json!({
                    "n": n,
                    "method": m.name(),
                    "values": ints(&t.values)?,
                    "fixture_match": matches,
                }),
                table,
                verified: matches,
            })
        }
        None => {
            let cv = rk::cross_validate(n);
            let mut header = vec!["k"];
            header.extend(RkMethod::ALL.iter().map(|m| m.name()));
            let mut table = Table::new(&header);
            for k in 0..=n {
                let mut row = vec![k.to_string()];
                row.extend(
                    RkMethod::ALL
                        .iter()
                        .map(|&m| cv.table(m).values[k].to_string()),
                );
                table.push(row);
            }
            let mut tables = serde_json::Map::new();
            for m in RkMethod::ALL {
                tables.insert(m.name().to_owned(), ints(&cv.table(m).values)?);
            }
            let matches = fixture_match(cv.table(RkMethod::Recurrence));
            let disagreement = cv
                .disagreement
                .as_ref()
                .map(|(m, mis)| to_value(&json!({"method": m.name(), "mismatch": to_value(mis)?})))
                .transpose()?;
            Ok(Outcome {
                json: json!({
                    "n": n,
                    "method": "all",
                    "tables": tables,
                    "verdict": if cv.agree() { "agree" } else { "disagree" },
                    "disagreement": disagreement,
                    "fixture_match": matches,
                }),
                table,
                verified: cv.agree() && matches,
            })
        }
    }
}

pub fn zero(j: u32, order: usize) -> Result<Outcome, CliError> {
    let z = solve_expansion(j, order + 1)?;
    let mut table = Table::new(&["k", "exponent", "g"]);
    for (k, g) in z.g.iter().enumerate() {
        table.push(vec![
            k.to_string(),
            (z.kappa + k as i64).to_string(),
            g.to_string(),
        ]);
    }
    let laurent = expansion_to_laurent(&z);
    Ok(Outcome {
        json: json!({
            "expansion": to_value(&z)?,
            "resolved_degree": z.resolved_degree(),
            "series": laurent.to_string(),
        }),
        table,
        verified: true,
    })
}

pub fn delta(j: u32, order: usize) -> Result<Outcome, CliError> {
    let d = delta_series(j, order)?;
    let mut table = Table::new(&["k", "delta", "phi"]);
    for (k, c) in d.delta.coeffs().iter().enumerate() {
        let phi = d.phi.coeff(k).map(ToString::to_string).unwrap_or_default();
        table.push(vec![k.to_string(), c.to_string(), phi]);
    }
    Ok(Outcome {
        json: json!({
            "j": j,
            "order": order,
            "delta": ints(d.delta.coeffs())?,
            "phi": ints(d.phi.coeffs())?,
            "series": d.delta.to_string(),
        }),
        table,
        verified: true,
    })
}

pub fn stabilize(j_max: u32, depth: usize) -> Result<Outcome, CliError> {
    let rep = zeros::stabilization_report(j_max, depth)?;
    let mut table = Table::new(&[
        "j",
        "sign",
        "kappa",
        "checked",
        "matches",
        "divergence_k",
        "divergence_g",
        "divergence_r",
    ]);
    for r in &rep.rows {
        let (k, g, rr) = match &r.first_divergence {
            Some(d) => (d.k.to_string(), d.g.to_string(), d.r.to_string()),
            None => Default::default(),
        };
        table.push(vec![
            r.j.to_string(),
            r.sign.to_string(),
            r.kappa.to_string(),
            r.checked.to_string(),
            r.matches.to_string(),
            k,
            g,
            rr,
        ]);
    }
    let ok = rep.all_match()
        && rep
            .rows
            .iter()
            .all(|r| r.sign == zeros::expected_sign(r.j) && r.kappa == zeros::expected_kappa(r.j));
    let mut json = to_value(&rep)?;
    json["all_match"] = ok.into();
    Ok(Outcome {
        json,
        table,
        verified: ok,
    })
}

pub fn numeric(params: &ZeroFindParams) -> Result<Outcome, CliError> {
    let rep = find_zero(params)?;
    let mut table = Table::new(&[
        "j",
        "q_re",
        "q_im",
        "seed_order",
        "predicted_re",
        "predicted_im",
        "found_re",
        "found_im",
        "residual",
        "agreement",
        "first_omitted_term",
        "iterations",
        "precision_bits",
        "regime",
    ]);
    table.push(vec![
        rep.j.to_string(),
        num(rep.q.re),
        num(rep.q.im),
        rep.seed_order.to_string(),
        num(rep.predicted.re),
        num(rep.predicted.im),
        rep.found_decimal.0.clone(),
        rep.found_decimal.1.clone(),
        num(rep.residual),
        num(rep.agreement),
        num(rep.first_omitted_term),
        rep.iterations.to_string(),
        rep.precision_bits.to_string(),
        to_value(&rep.regime)?
            .as_str()
            .unwrap_or_default()
            .to_owned(),
    ]);
    let mut json = to_value(&rep)?;
    json["within_bound"] = (rep.agreement <= 10.0 * rep.first_omitted_term).into();
    Ok(Outcome {
        json,
        table,
        verified: true,
    })
}

pub fn theta(
    q: Complex64,
    x: Complex64,
    eps: f64,
    precision: Precision,
    derivative: bool,
) -> Result<Outcome, CliError> {
    let r = if derivative {
        theta_dx(q, x, eps, precision)?
    } else {
        theta_eval(q, x, eps, precision)?
    };
    let mut table = Table::new(&[
        "value_re",
        "value_im",
        "tail_bound",
        "rounding_bound",
        "terms_used",
        "precision_bits",
    ]);
    table.push(vec![
        num(r.value.re),
        num(r.value.im),
        num(r.tail_bound),
        num(r.rounding_bound),
        r.terms_used.to_string(),
        r.precision_bits.to_string(),
    ]);
    Ok(Outcome {
        json: to_value(&r)?,
        table,
        verified: true,
    })
}

pub fn sweep(q: Complex64, j: u32, orders: &[usize], tol: f64) -> Result<Outcome, CliError> {
    let t = convergence_sweep(q, j, orders, tol)?;
    let mut table = Table::new(&["order", "error", "first_omitted_term", "ratio", "same_zero"]);
    for r in &t.rows {
        table.push(vec![
            r.order.to_string(),
            num(r.error),
            num(r.first_omitted_term),
            num(r.ratio),
            r.same_zero.to_string(),
        ]);
    }
    let mut json = to_value(&t)?;
    json["strictly_decreasing"] = t.strictly_decreasing().into();
    Ok(Outcome {
        json,
        table,
        verified: true,
    })
}

pub fn convexity(grid: &[f64], s_max: u32) -> Result<Outcome, CliError> {
    let rep = analysis::verify_s_gt_t(grid, s_max)?;
    let mut table = Table::new(&["q", "s", "S_s", "T_s", "margin"]);
    for r in analysis::convexity_rows(grid, s_max)? {
        table.push(vec![
            num(r.q),
            r.s.to_string(),
            num(r.s_value),
            num(r.t_value),
            num(r.margin),
        ]);
    }
    Ok(Outcome {
        json: to_value(&rep)?,
        table,
        verified: rep.all_pass,
    })
}

pub fn profile(grid: &[f64]) -> Result<Outcome, CliError> {
    let p = analysis::shape_profile(grid)?;
    let mut table = Table::new(&["q", "m", "euler", "m_second", "euler_second"]);
    for r in &p.rows {
        table.push(vec![
            num(r.q),
            num(r.m),
            num(r.euler),
            num(r.m_second),
            num(r.euler_second),
        ]);
    }
    Ok(Outcome {
        json: to_value(&p)?,
        table,
        verified: true,
    })
}

pub fn verify_all() -> Result<Outcome, CliError> {
    let checks = verify::verify_all();
    let mut table = Table::new(&["id", "name", "passed", "detail"]);
    for c in &checks {
        eprintln!(
            "[{}] {:>2} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.detail
        );
        table.push(vec![
            c.id.to_string(),
            c.name.to_owned(),
            c.passed.to_string(),
            c.detail.clone(),
        ]);
    }
    let all = checks.iter().all(|c| c.passed);
    Ok(Outcome {
        json: json!({ "checks": to_value(&checks)?, "all_pass": all }),
        table,
        verified: all,
    })
}
