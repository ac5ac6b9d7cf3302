"""Acceptance suite: eleven end-to-end checks at their stated tolerances.

Each check prints one ``PASS``/``FAIL`` line. Run directly with
``python tests/test_acceptance.py`` for the bare report, or through pytest.
"""

import math
import sys

import numpy as np
import pytest

from wq1d import (atoms, beta_one, cell_lower_bounds, classify_order, error_cdf_form,
                  error_quantile_form, error_w1_closed, exp_power, explicit_bound_constant,
                  gaussian, mc_baseline, midpoint_grid, optimal_grid, pair_lower_bound, pareto,
                  sweep, tail_profile, uniform)
from wq1d.verify import suite

RHOS = (1.0, 1.5, 2.0, 3.0)
POW2 = [2 ** k for k in range(6, 15)]


def _err(d, g, rho):
    return error_quantile_form(d, g, rho).value


def uniform_exactness():
    worst = 0.0
    for n in (10, 100, 1000):
        for rho in (1.0, 2.0, 3.0):
            ref = 1 / (2 * n * (rho + 1) ** (1 / rho))
            g = optimal_grid(uniform(), n, rho)
            for fn in (error_quantile_form, error_cdf_form):
                worst = max(worst, abs(fn(uniform(), g, rho).value - ref) / ref)
    return worst <= 1e-8, f"max rel err {worst:.2e} (tol 1e-8)"


def beta_rho_one_constant():
    n = 2 ** 14
    ok, parts = True, []
    for beta in (0.5, 2.0, 5.0):
        c = n * error_w1_closed(beta_one(beta), n).value
        gap = abs(c - 0.25) / 0.25
        ok &= gap <= 0.02
        parts.append(f"beta={beta:g}: {c:.6f} ({100 * gap:.2f}%)")
    return ok, "N e_N at 2^14 vs 1/4 within 2%: " + ", ".join(parts)


def beta_four_order():
    order = sweep(beta_one(4), 2.0, POW2, "optimal").fitted_order
    return 0.72 <= order <= 0.78, f"fitted order {order:.4f} in [0.72, 0.78]"


def pareto_orders():
    ok, parts = True, []
    for rho, beta in ((1.0, 2.0), (2.0, 4.0), (2.0, 8.0)):
        d = pareto(beta)
        alpha = 1 / rho - 1 / beta
        rep = sweep(d, rho, POW2, "optimal")
        ceiling = explicit_bound_constant(d, rho, alpha) ** (1 / rho)
        scaled = np.asarray(POW2, dtype=float) ** alpha * rep.errors
        good = abs(rep.fitted_order - alpha) <= 0.05 and bool(np.all(scaled <= ceiling))
        ok &= good
        parts.append(f"(rho={rho:g}, beta={beta:g}) order {rep.fitted_order:.4f} vs {alpha:.4f}, "
                     f"max scaled {scaled.max():.4f} <= {ceiling:.4f}")
    return ok, "; ".join(parts)


def exp_power_log_rates():
    n = np.asarray(POW2, dtype=float)
    e1 = sweep(exp_power(1), 1.0, POW2, "optimal").errors * n / np.log(n)
    e2 = sweep(exp_power(2), 2.0, POW2, "optimal").errors * np.sqrt(n * np.log(n))
    ok = all(np.all((v >= 0.2) & (v <= 5.0)) for v in (e1, e2))
    return ok, (f"beta=1 rho=1: e_N N/ln N in [{e1.min():.4f}, {e1.max():.4f}]; "
                f"beta=2 rho=2: e_N (N ln N)^1/2 in [{e2.min():.4f}, {e2.max():.4f}]; "
                "band [0.2, 5]")


def two_atom_closed_form():
    d = atoms([0, 1], [0.5, 0.5])
    vals = [error_w1_closed(d, n).value for n in range(1, 51)]
    exact = all(v == (0.0 if n % 2 == 0 else 1 / (2 * n)) for n, v in enumerate(vals, 1))
    top = max(n * v for n, v in enumerate(vals, 1))
    return exact and top == 0.5, f"exact for N=1..50: {exact}, max N e_N = {top}"


def formula_equivalence():
    worst, where = 0.0, ""
    for d in suite():
        for rho in RHOS:
            if not d.has_moment(rho):
                continue
            for n in (1, 2, 7, 32, 128):
                g = optimal_grid(d, n, rho)
                q = error_quantile_form(d, g, rho).value
                c = error_cdf_form(d, g, rho).value
                rel = 0.0 if q == c else abs(q - c) / max(abs(q), abs(c))
                if rel > worst:
                    worst, where = rel, f" at {d.name} rho={rho:g} N={n}"
    return worst <= 1e-8, f"max rel discrepancy {worst:.2e}{where} (tol 1e-8)"


def bound_suite():
    violations = []
    for d in suite():
        pb = pair_lower_bound(d)
        w1 = [error_w1_closed(d, n).value for n in range(1, 66)]
        for n in range(1, 65):
            if n * w1[n - 1] + (n + 1) * w1[n] < pb * (1 - 1e-10):
                violations.append(f"pair {d.name} N={n}")
        for n in (1, 2, 5, 16, 32, 128):
            vals = []
            for rho in RHOS:
                if not d.has_moment(rho):
                    continue
                r = error_quantile_form(d, optimal_grid(d, n, rho), rho)
                if math.fsum(cell_lower_bounds(d, n, rho)) > r.value_pow * (1 + 1e-10):
                    violations.append(f"cells {d.name} rho={rho:g} N={n}")
                vals.append(r.value)
            if any(a > b + 1e-9 * max(1.0, b) for a, b in zip(vals, vals[1:])):
                violations.append(f"rho-monotone {d.name} N={n}")
    return not violations, f"{len(violations)} violations" + (
        f": {', '.join(violations[:5])}" if violations else "")


CLASSIFY_CASES = [
    (pareto(4), 2.0, 0.25, "bounded"),
    (pareto(4), 2.0, 0.3, "unbounded"),
    (uniform(), 2.0, 0.5, "bounded"),
    (gaussian(), 2.0, 0.4, "bounded"),
    (pareto(4), 2.0, 0.5, "unbounded"),
    (exp_power(1), 2.0, 0.5, "undetermined"),
    (atoms([0, 1], [0.5, 0.5]), 2.0, 0.75, "unbounded"),
    (gaussian(), 2.0, 0.75, "unbounded"),
    (beta_one(4), 2.0, 1.0, "unbounded"),
    # bounded support
    (uniform(), 2.0, 0.75, "undetermined"),
    (uniform(), 2.0, 1.0, "bounded"),
    (atoms([0, 1], [0.5, 0.5]), 1.0, 1.0, "bounded"),
    (beta_one(2), 1.0, 1.0, "bounded"),
]


def tail_duality():
    bad = []
    for beta in (2.0, 4.0, 8.0):
        tp = tail_profile(pareto(beta), beta)
        if abs(tp.limit_x - 1.0) > 1e-3:
            bad.append(f"limit_x {tp.limit_x:.6f} at beta={beta:g}")
        u = tp.u_grid
        spread = tp.g_u / u ** (1 / beta)
        bound = (tp.sup_x_left / u) ** (1 / beta) + (tp.sup_x_right / u) ** (1 / beta)
        if np.any(spread > bound * (1 + 1e-9) + 1e-12):
            bad.append(f"majorization at beta={beta:g}")
    for d, rho, alpha, want in CLASSIFY_CASES:
        got = classify_order(d, rho, alpha).conclusion
        if got != want:
            bad.append(f"classify {d.name} rho={rho:g} alpha={alpha:g}: {got} != {want}")
    return not bad, (f"pareto limits, majorization, {len(CLASSIFY_CASES)} classify cases: "
                     + ("all match" if not bad else "; ".join(bad)))


def optimality():
    worse = []
    for d in suite():
        for rho in RHOS:
            if not d.has_moment(rho):
                continue
            for n in list(range(1, 17)) + [32, 64]:
                opt = _err(d, optimal_grid(d, n, rho), rho)
                mid = _err(d, midpoint_grid(d, n), rho)
                if opt > mid * (1 + 1e-12) + 1e-15:
                    worse.append(f"{d.name} rho={rho:g} N={n}")
    d = exp_power(1)
    opt = _err(d, optimal_grid(d, 8, 3.0), 3.0)
    mid = _err(d, midpoint_grid(d, 8), 3.0)
    gain = 1 - opt / mid
    return not worse and gain >= 0.01, (
        f"optimal <= midpoint violations: {len(worse)}; exp_power(1) rho=3 N=8 "
        f"improvement {100 * gain:.2f}% (need >= 1%)")


def mc_comparison():
    n = 4096
    a = mc_baseline(uniform(), 1.0, n, 200, seed=0)
    b = mc_baseline(uniform(), 1.0, n, 200, seed=0, threads=4)
    det = _err(uniform(), optimal_grid(uniform(), n, 1.0), 1.0)
    ratio = a.mean / det
    same = np.array_equal(a.values, b.values)
    return ratio > 10 and same, f"random/deterministic = {ratio:.2f} (> 10), reproducible: {same}"


CRITERIA = [
    ("1 uniform exactness", uniform_exactness),
    ("2 beta(b,1) rho=1 constant", beta_rho_one_constant),
    ("3 beta(4) rho=2 order", beta_four_order),
    ("4 pareto orders and ceilings", pareto_orders),
    ("5 exp-power log-corrected rates", exp_power_log_rates),
    ("6 two-atom closed form", two_atom_closed_form),
    ("7 formula equivalence", formula_equivalence),
    ("8 bound suite and rho-monotonicity", bound_suite),
    ("9 tail duality and classification", tail_duality),
    ("10 optimal beats midpoint", optimality),
    ("11 Monte Carlo comparison", mc_comparison),
]


def _line(name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'}  {name}  {detail}"


@pytest.mark.parametrize("name,check", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, check, capsys):
    ok, detail = check()
    line = _line(name, ok, detail)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for name, check in CRITERIA:
        ok, detail = check()
        failed += not ok
        print(_line(name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
