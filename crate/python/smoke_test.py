"""Smoke test for the `partial_theta` extension module.

Build and install first, for example:

    maturin develop --release -m crates/py/Cargo.toml

then run `python python/smoke_test.py`.
"""

import cmath
import sys

import partial_theta as pt


def check(name, cond):
    print(f"[{'PASS' if cond else 'FAIL'}] {name}")
    return bool(cond)


def main():
    results = []

    e = pt.euler_product(8)
    results.append(check("euler product", e.coeffs == [1, -1, -1, 0, 0, 1, 0, 1, 0]))
    cube = e ** 3
    results.append(check("triple product", cube == pt.triple_product_series(8)))
    inv = cube.inverse()
    results.append(check("inverse is r_k", inv.coeffs == pt.rk_values(8)))
    one = pt.Series([1] + [0] * 8)
    results.append(check("series arithmetic", e * e.inverse() == one and (e - e) + one == one))
    try:
        pt.Series([2, 1]).inverse()
        results.append(check("non-unit inverse raises", False))
    except ZeroDivisionError:
        results.append(check("non-unit inverse raises", True))

    r = pt.rk_values(20, "triple-product")
    results.append(check("r_20", r[20] == 341649))
    cv = pt.cross_validate(300)
    results.append(check("three methods agree", cv["agree"] and cv["euler-cube"][300] > 2**63))

    z = pt.solve_expansion(4, 6)
    results.append(check("j=4 expansion", z.g == [1, 3, 9, 22, 51, 107] and z.kappa == 6 and z.sign == 1))
    results.append(check("j=1 anomaly", pt.solve_expansion(1, 2).g[1] == 2))
    delta, phi = pt.delta_series(2, 9)
    results.append(check("Delta_2", delta == [1, 0, 0, 1, 3, 9, 24, 66, 180, 498] and phi[0] == 1))

    val = pt.theta_eval(0.1, 1.0, 1e-15)
    results.append(check("theta(0.1, 1)", abs(val["value"] - 1.1010010001) < 1e-14))
    rep = pt.find_zero(0.05, 1)
    results.append(check("first zero at q=0.05", abs(rep["found"] - (-21.111274895303184806)) < 1e-12))
    results.append(check("zero residual", rep["residual"] <= 1e-10))
    theta_at_zero = pt.theta_eval(0.05, rep["found"], 1e-20)["value"]
    results.append(check("theta vanishes there", abs(theta_at_zero) < 1e-8))
    sweep = pt.convergence_sweep(0.05, 2, list(range(0, 9)))
    results.append(check("sweep decreasing", sweep["strictly_decreasing"]))
    try:
        pt.find_zero(0.1, 6, precision="double", tol=1e-12)
        results.append(check("non-convergence raises", False))
    except pt.ConvergenceError:
        results.append(check("non-convergence raises", True))

    conv = pt.convexity([0.1, 0.5, 0.9], 50)
    results.append(check("convexity witness", conv["all_pass"] and conv["status"] == "witnessed"))
    results.append(check("M'' positive", pt.m_second_derivative(0.9) > 0))
    prof = pt.profile([x / 10 for x in range(-9, 10)])
    results.append(check("profile argmax in (-1, 0)", -1 < prof["argmax_m"] < 0))

    print(f"{sum(results)}/{len(results)} passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
