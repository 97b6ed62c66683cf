//! Newton refinement of zeros of `theta(q, .)` seeded by truncated Laurent
//! expansions, and sweeps of the seed error against truncation order.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use super::bigcomplex::BigComplex;
use super::theta::{auto_bits, eval_big, max_term_log2, Precision};
use crate::error::{Error, Result};
use crate::zeros::{expansion_to_laurent, solve_expansion, ZeroExpansion};

/// Radius below which all zeros are known to be simple and distinct.
pub const SEPARATION_RADIUS: f64 = 0.108;
pub const MAX_NEWTON_ITERS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `|q| <= 0.108`: zeros are separated, expansions converge.
    Guaranteed,
    BestEffort,
}

impl Regime {
    pub fn of(q: Complex64) -> Self {
        if q.norm() <= SEPARATION_RADIUS {
            Regime::Guaranteed
        } else {
            Regime::BestEffort
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroFindParams {
    pub q: Complex64,
    pub j: u32,
    /// Seed uses `g_0..=g_seed_order`.
    pub seed_order: usize,
    pub tol: f64,
    pub precision: Precision,
    pub max_iters: usize,
}

impl ZeroFindParams {
    pub fn new(q: Complex64, j: u32, seed_order: usize, tol: f64) -> Self {
        Self {
            q,
            j,
            seed_order,
            tol,
            precision: Precision::Auto,
            max_iters: MAX_NEWTON_ITERS,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroFindReport {
    pub j: u32,
    pub q: Complex64,
    pub seed_order: usize,
    /// Truncated expansion evaluated at `q`.
    pub predicted: Complex64,
    /// Newton limit.
    pub found: Complex64,
    /// `found` in decimal at the working precision, real and imaginary part.
    pub found_decimal: (String, String),
    pub iterations: usize,
    /// `|theta(q, found)|`.
    pub residual: f64,
    /// `|found - predicted|`.
    pub agreement: f64,
    /// `|g_(seed_order+1) q^(kappa+seed_order+1)|`.
    pub first_omitted_term: f64,
    pub precision_bits: usize,
    /// `|q|^-j * 2^-bits`: absolute size of one unit of working precision.
    pub conditioning: f64,
    pub regime: Regime,
    pub tol: f64,
    #[serde(skip)]
    pub found_big: BigComplex,
}

impl ZeroFindReport {
    /// `agreement / first_omitted_term`.
    pub fn bound_ratio(&self) -> f64 {
        self.agreement / self.first_omitted_term
    }
}

fn laurent_value(z: &ZeroExpansion, q: &BigComplex) -> Result<BigComplex> {
    let bits = q.re.precision();
    let x = expansion_to_laurent(z);
    let mut acc = BigComplex::zero(bits);
    for (e, c) in x.terms() {
        let qe = q
            .powi(e)
            .ok_or_else(|| Error::Domain("q = 0 has no negative powers".into()))?;
        acc = acc.add(&qe.mul(&BigComplex::from_int(c, bits)));
    }
    Ok(acc)
}

fn omitted_term(next_g: &BigInt, q_abs: f64, exponent: i64) -> f64 {
    let g: f64 = next_g.to_string().parse().unwrap_or(f64::INFINITY);
    g.abs() * q_abs.powi(exponent as i32)
}

struct Solved {
    expansion: ZeroExpansion,
    first_omitted_term: f64,
}

fn solved(j: u32, seed_order: usize, q_abs: f64) -> Result<Solved> {
    let full = solve_expansion(j, seed_order + 2)?;
    let next = &full.g[seed_order + 1];
    let first_omitted_term = omitted_term(next, q_abs, full.kappa + seed_order as i64 + 1);
    Ok(Solved {
        expansion: full.truncated(seed_order),
        first_omitted_term,
    })
}

fn validate(q: Complex64, j: u32, tol: f64) -> Result<()> {
    let qa = q.norm();
    if !(qa > 0.0) || !(qa < 1.0) {
        return Err(Error::Domain(format!("|q| = {qa} must lie in (0, 1)")));
    }
    if j == 0 {
        return Err(Error::InvalidArgument("zero index j must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Working precision for a zero of modulus about `|q|^-j`: enough to resolve
/// `tol` against the largest term and the omitted expansion term against `x`.
fn zero_bits(q_abs: f64, j: u32, tol: f64, omitted: f64) -> usize {
    let x_abs = q_abs.powi(-(j as i32));
    let mut bits = auto_bits(max_term_log2(q_abs, x_abs), tol);
    if omitted > 0.0 && omitted.is_finite() {
        let need = x_abs.log2() - omitted.log2();
        bits = bits.max(53 + need.max(0.0).ceil() as usize + 48);
    }
    bits
}

/// Newton iteration from the truncated expansion of the `j`-th zero.
///
/// The iteration keeps polishing past `tol` until the step falls to the
/// working precision, so that `found` can be compared with expansions of
/// any order.
pub fn find_zero(p: &ZeroFindParams) -> Result<ZeroFindReport> {
    validate(p.q, p.j, p.tol)?;
    let qa = p.q.norm();
    let sol = solved(p.j, p.seed_order, qa)?;
    let bits = p
        .precision
        .resolve(|| zero_bits(qa, p.j, p.tol, sol.first_omitted_term));
    let q = BigComplex::from_c64(p.q, bits);
    let seed = laurent_value(&sol.expansion, &q)?;
    newton(p, &q, seed, bits, sol.first_omitted_term)
}

fn newton(
    p: &ZeroFindParams,
    q: &BigComplex,
    seed: BigComplex,
    bits: usize,
    first_omitted_term: f64,
) -> Result<ZeroFindReport> {
    let qa = p.q.norm();
    let ulp = 2f64.powi(-(bits as i32));
    let max_term = 2f64.powf(max_term_log2(qa, seed.abs_f64()));
    let eps = (max_term * ulp).min(p.tol * 1e-3).max(f64::MIN_POSITIVE);
    let mut x = seed.clone();
    let mut iterations = 0;
    loop {
        if iterations >= p.max_iters {
            break;
        }
        iterations += 1;
        let f = eval_big(q, &x, eps, bits, false)?;
        let df = eval_big(q, &x, eps, bits, true)?;
        if df.value.abs_f64() < 1e-300 {
            return Err(Error::SingularDerivative(format!(
                "|d theta/dx| = {:e} at iteration {iterations}",
                df.value.abs_f64()
            )));
        }
        let step = f
            .value
            .div(&df.value)
            .ok_or_else(|| Error::SingularDerivative("exact zero derivative".into()))?;
        x = x.sub(&step);
        if !x.is_finite() || !x.abs_f64().is_finite() {
            return Err(Error::NoConvergence(format!(
                "Newton iterate diverged at iteration {iterations}"
            )));
        }
        let step_abs = step.abs_f64();
        if step_abs <= x.abs_f64() * ulp * 4096.0 {
            break;
        }
    }
    let residual = eval_big(q, &x, eps, bits, false)?.value.abs_f64();
    if !(residual <= p.tol) {
        return Err(Error::NoConvergence(format!(
            "|theta| = {residual:e} > tol = {:e} after {iterations} iterations at {bits} bits",
            p.tol
        )));
    }
    let agreement = x.sub(&seed).abs_f64();
    Ok(ZeroFindReport {
        j: p.j,
        q: p.q,
        seed_order: p.seed_order,
        predicted: seed.to_c64(),
        found: x.to_c64(),
        found_decimal: x.to_decimal_string(((bits as f64) * std::f64::consts::LOG10_2) as usize),
        iterations,
        residual,
        agreement,
        first_omitted_term,
        precision_bits: bits,
        conditioning: qa.powi(-(p.j as i32)) * ulp,
        regime: Regime::of(p.q),
        tol: p.tol,
        found_big: x,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub order: usize,
    /// `|found - seed_order|` against the reference zero.
    pub error: f64,
    pub first_omitted_term: f64,
    /// `error / first_omitted_term`.
    pub ratio: f64,
    /// Newton from this seed reached the reference zero.
    pub same_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub q: Complex64,
    pub j: u32,
    pub precision_bits: usize,
    pub regime: Regime,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Errors strictly decrease along increasing orders.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }
}

/// For each truncation order, the distance between the reference zero
/// (Newton from the highest order seed) and the truncated expansion, plus a
/// basin check that Newton from that seed lands on the same zero.
pub fn convergence_sweep(q: Complex64, j: u32, orders: &[usize], tol: f64) -> Result<SweepTable> {
    validate(q, j, tol)?;
    if orders.is_empty() {
        return Err(Error::InvalidArgument("no orders given".into()));
    }
    let mut orders = orders.to_vec();
    orders.sort_unstable();
    orders.dedup();
    let qa = q.norm();
    let top = *orders.last().expect("non-empty");
    let top_sol = solved(j, top, qa)?;
    let bits = zero_bits(qa, j, tol, top_sol.first_omitted_term);
    let mut params = ZeroFindParams::new(q, j, top, tol);
    params.precision = Precision::Bits(bits as u32);
    let reference = find_zero(&params)?;
    let bq = BigComplex::from_c64(q, bits);
    let rows = orders
        .iter()
        .map(|&m| {
            let sol = solved(j, m, qa)?;
            let seed = laurent_value(&sol.expansion, &bq)?;
            let error = reference.found_big.sub(&seed).abs_f64();
            params.seed_order = m;
            let same_zero = match newton(&params, &bq, seed, bits, sol.first_omitted_term) {
                Ok(rep) => {
                    let d = rep.found_big.sub(&reference.found_big).abs_f64();
                    d <= reference.found.norm() * 2f64.powi(-(bits as i32) + 24)
                }
                Err(_) => false,
            };
            Ok(SweepRow {
                order: m,
                error,
                first_omitted_term: sol.first_omitted_term,
                ratio: error / sol.first_omitted_term,
                same_zero,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        q,
        j,
        precision_bits: bits,
        regime: Regime::of(q),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn first_zero_at_q_005() {
        let rep = find_zero(&ZeroFindParams::new(c(0.05), 1, 10, 1e-12)).unwrap();
        // 50-digit reference root from an independent arbitrary-precision solver
        assert!(
            (rep.found.re - (-21.111_274_895_303_185)).abs() < 1e-12,
            "{}",
            rep.found
        );
        assert!(rep.agreement <= rep.first_omitted_term * 10.0);
        assert!(rep.residual <= 1e-12);
        assert_eq!(rep.regime, Regime::Guaranteed);
    }

    #[test]
    fn second_zero_at_q_005() {
        let rep = find_zero(&ZeroFindParams::new(c(0.05), 2, 10, 1e-12)).unwrap();
        assert!(
            (rep.found.re - (-399.941_209_752_149_07)).abs() < 1e-10,
            "{}",
            rep.found
        );
    }

    #[test]
    fn small_q_asymptotics() {
        let rep = find_zero(&ZeroFindParams::new(c(1e-3), 1, 6, 1e-12)).unwrap();
        // -1/q - 1 - 2q - ...
        assert!((rep.found.re + 1001.0).abs() < 3e-3, "{}", rep.found);
    }

    #[test]
    fn double_precision_mode_works_for_first_zero() {
        let mut p = ZeroFindParams::new(c(0.05), 1, 4, 1e-10);
        p.precision = Precision::Double;
        let rep = find_zero(&p).unwrap();
        assert_eq!(rep.precision_bits, 53);
        assert!(rep.residual <= 1e-10);
    }

    #[test]
    fn sweep_q01_j3() {
        let t = convergence_sweep(c(0.1), 3, &[2, 4, 6, 8], 1e-10).unwrap();
        assert!(t.strictly_decreasing(), "{:?}", t.rows);
        assert!(t.rows.iter().all(|r| r.same_zero));
    }

    #[test]
    fn zeroth_order_seed_reaches_same_zero() {
        let t = convergence_sweep(c(0.05), 2, &[0, 12], 1e-10).unwrap();
        assert!(t.rows[0].same_zero);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            find_zero(&ZeroFindParams::new(c(0.0), 1, 4, 1e-10)),
            Err(Error::Domain(_))
        ));
        assert!(find_zero(&ZeroFindParams::new(c(0.05), 0, 4, 1e-10)).is_err());
        assert!(find_zero(&ZeroFindParams::new(c(0.05), 1, 4, -1.0)).is_err());
        assert_eq!(Regime::of(c(0.2)), Regime::BestEffort);
    }
}
