import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wq1d import (ErrorResult, atoms, beta_one, cell_lower_bound, cell_lower_bounds,
                  error_cdf_form, error_quantile_form, error_w1_closed, exp_power, gaussian,
                  midpoint_grid, optimal_grid, pair_lower_bound, pareto, tabulated, uniform,
                  w_rho_discrete)
from wq1d.wasserstein import format_number

SUITE = [uniform(), beta_one(2), beta_one(4), pareto(4), exp_power(1), exp_power(2),
         gaussian(), atoms([0, 1], [0.5, 0.5])]
RHOS = (1.0, 1.5, 2.0, 3.0)


def e(d, n, rho):
    return error_quantile_form(d, optimal_grid(d, n, rho), rho).value


@pytest.mark.parametrize("rho", RHOS)
@pytest.mark.parametrize("n", [1, 10, 100])
def test_uniform_closed_form(rho, n):
    ref = 1 / (2 * n * (rho + 1) ** (1 / rho))
    g = optimal_grid(uniform(), n, rho)
    assert error_quantile_form(uniform(), g, rho).value == pytest.approx(ref, rel=1e-10)
    assert error_cdf_form(uniform(), g, rho).value == pytest.approx(ref, rel=1e-10)


def test_exponential_single_point_rho_two():
    # variance of exp(1) is 1
    g = optimal_grid(exp_power(1), 1, 2.0)
    assert error_quantile_form(exp_power(1), g, 2.0).value_pow == pytest.approx(1.0, rel=1e-12)


def test_gaussian_single_point_rho_one():
    # E|Z| = sqrt(2/pi)
    g = optimal_grid(gaussian(), 1, 1.0)
    assert error_quantile_form(gaussian(), g, 1.0).value == pytest.approx(
        math.sqrt(2 / math.pi), rel=1e-12)


@pytest.mark.parametrize("d", SUITE, ids=lambda d: d.name)
def test_formulas_agree(d):
    for rho in RHOS:
        if not d.has_moment(rho):
            continue
        for n in (1, 2, 7, 32):
            for g in (optimal_grid(d, n, rho), midpoint_grid(d, n)):
                q = error_quantile_form(d, g, rho).value
                c = error_cdf_form(d, g, rho).value
                assert c == pytest.approx(q, rel=1e-8, abs=1e-300)
            if rho == 1.0:
                assert error_w1_closed(d, n).value == pytest.approx(q, rel=1e-8, abs=1e-300)


def test_formulas_agree_on_flat_and_jumpy_laws():
    d = tabulated([0, 1, 1, 2, 3], [0.1, 0.4, 0.6, 0.6, 1.0])
    for rho in (1.0, 2.0, 3.0):
        for n in (1, 3, 5, 10):
            g = optimal_grid(d, n, rho)
            assert error_cdf_form(d, g, rho).value == pytest.approx(
                error_quantile_form(d, g, rho).value, rel=1e-8, abs=1e-15)


def test_atoms_w1_exact():
    d = atoms([0, 1], [0.5, 0.5])
    for n in range(1, 51):
        assert error_w1_closed(d, n).value == (0.0 if n % 2 == 0 else 1 / (2 * n))


def test_dirac_is_zero():
    d = atoms([0.0], [1.0])
    for rho in RHOS:
        assert e(d, 7, rho) == 0.0
    assert error_w1_closed(d, 7).value == 0.0
    assert pair_lower_bound(d) == 0.0


def test_infinite_moment_is_a_value_not_an_error():
    r = error_quantile_form(pareto(1.5), midpoint_grid(pareto(1.5), 4), 2.0)
    assert r.is_infinite and r.value == math.inf
    assert json.loads(r.to_json())["value"] == "inf"
    assert error_w1_closed(pareto(0.9), 4).is_infinite


def test_cdf_form_rejects_points_outside_cells():
    with pytest.raises(ValueError, match="outside its cell"):
        error_cdf_form(uniform(), np.array([0.9, 0.95]), 1.0)
    with pytest.raises(ValueError):
        error_quantile_form(uniform(), np.array([0.9, 0.1]), 1.0)


def test_quantile_form_handles_any_grid():
    # all mass sent to one point: e = W_rho(U[0,1], delta_c)
    x = np.array([0.3, 0.3])
    ref = (0.3 ** 3 + 0.7 ** 3) / 3
    assert error_quantile_form(uniform(), x, 2.0).value_pow == pytest.approx(ref, rel=1e-12)


def test_per_cell_sums_to_total():
    r = error_quantile_form(gaussian(), optimal_grid(gaussian(), 9, 1.5), 1.5)
    assert math.fsum(r.per_cell) == pytest.approx(r.value_pow, rel=1e-15)
    assert len(r.to_dict(per_cell=True)["per_cell"]) == 9


@pytest.mark.parametrize("d", SUITE, ids=lambda d: d.name)
def test_cell_lower_bounds_below_error(d):
    for rho in RHOS:
        if not d.has_moment(rho):
            continue
        for n in (1, 5, 32):
            bound = math.fsum(cell_lower_bounds(d, n, rho))
            assert bound <= error_quantile_form(d, optimal_grid(d, n, rho), rho).value_pow * (
                1 + 1e-10)


def test_cell_lower_bound_formula():
    # uniform: (2/(4N))^rho / (4^rho N)
    n, rho = 8, 2.0
    assert cell_lower_bound(uniform(), 3, n, rho) == pytest.approx(
        (2 / (4 * n)) ** rho / (4 ** rho * n))
    with pytest.raises(ValueError):
        cell_lower_bound(uniform(), 0, n, rho)


def test_pair_bound_values():
    assert pair_lower_bound(uniform()) == pytest.approx(0.125, rel=1e-12)
    assert pair_lower_bound(atoms([0, 1], [0.5, 0.5])) == pytest.approx(0.25, rel=1e-12)
    # exp(1): int_0^ln2 (1 - e^-x) dx + int_ln2^inf e^-x dx = (ln 2 - 1/2) + 1/2
    assert pair_lower_bound(exp_power(1)) == pytest.approx(0.5 * math.log(2), rel=1e-10)
    assert pair_lower_bound(pareto(0.9)) == math.inf


@pytest.mark.parametrize("d", SUITE, ids=lambda d: d.name)
def test_pair_bound_holds(d):
    pb = pair_lower_bound(d)
    vals = [error_w1_closed(d, n).value for n in range(1, 66)]
    for n in range(1, 65):
        assert n * vals[n - 1] + (n + 1) * vals[n] >= pb * (1 - 1e-10)


@pytest.mark.parametrize("d", SUITE, ids=lambda d: d.name)
def test_monotone_in_rho(d):
    for n in (1, 3, 16):
        vals = [e(d, n, r) for r in RHOS if d.has_moment(r)]
        assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))


def test_decay():
    for d in SUITE:
        assert e(d, 4096, 1.0) <= e(d, 16, 1.0)


def test_affine_scaling():
    for d in (gaussian(), pareto(4), exp_power(1), atoms([0, 1], [0.5, 0.5])):
        for rho in (1.0, 2.0, 3.0):
            base = e(d, 8, rho)
            assert e(d.affine(2.0, 5.0), 8, rho) == pytest.approx(2.0 * base, rel=1e-9)


# ---------------------------------------------------------------------------
# exact discrete distance


def test_discrete_known_values():
    assert w_rho_discrete([0], [1], [3], [1], 2.0) == pytest.approx(3.0)
    assert w_rho_discrete([0, 1], [0.5, 0.5], [0, 1], [0.5, 0.5], 1.0) == 0.0
    # half the mass moves by 1
    assert w_rho_discrete([0, 1], [0.5, 0.5], [0], [1], 2.0) == pytest.approx(math.sqrt(0.5))


def test_discrete_matches_scipy_at_rho_one():
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(1)
    for _ in range(20):
        x, y = rng.normal(size=5), rng.normal(size=7)
        a, b = rng.random(5), rng.random(7)
        a[-1] = 0
        a /= a.sum()
        b /= b.sum()
        a[-1] = 1 - math.fsum(a[:-1])
        b[-1] = 1 - math.fsum(b[:-1])
        ref = stats.wasserstein_distance(x, y, a, b)
        assert w_rho_discrete(x, a, y, b, 1.0) == pytest.approx(ref, rel=1e-12)


def test_discrete_rejects_bad_weights():
    with pytest.raises(ValueError):
        w_rho_discrete([0, 1], [0.5, 0.6], [0], [1], 1.0)
    with pytest.raises(ValueError):
        w_rho_discrete([0, 1], [0.5], [0], [1], 1.0)
    with pytest.raises(ValueError):
        w_rho_discrete([0, 1], [1.5, -0.5], [0], [1], 1.0)


@st.composite
def laws(draw):
    k = draw(st.integers(1, 6))
    x = draw(st.lists(st.floats(-50, 50), min_size=k, max_size=k))
    w = np.array(draw(st.lists(st.floats(0.01, 1), min_size=k, max_size=k)))
    w /= w.sum()
    w[-1] = 1.0 - math.fsum(w[:-1])
    return np.array(x), w


@settings(max_examples=100, deadline=None)
@given(laws(), laws(), laws(), st.sampled_from(RHOS))
def test_discrete_metric(p, q, r, rho):
    dpq = w_rho_discrete(*p, *q, rho)
    assert dpq == w_rho_discrete(*q, *p, rho)
    assert dpq <= w_rho_discrete(*p, *r, rho) + w_rho_discrete(*r, *q, rho) + 1e-12
    assert w_rho_discrete(*p, *p, rho) == 0.0


@settings(max_examples=30, deadline=None)
@given(laws(), st.integers(1, 12), st.sampled_from(RHOS))
def test_quantile_form_matches_discrete(law, n, rho):
    # an N-point grid against a finite law: both routes are exact sums
    x, w = law
    d = atoms(x, w)
    g = midpoint_grid(d, n).points
    ref = w_rho_discrete(x, w, g, np.full(n, 1 / n), rho)
    got = error_quantile_form(d, g, rho).value_pow
    # compared before the 1/rho root: weights that sum to a cell edge only up
    # to an ulp leave a sliver of u-mass of order eps in either route, moved
    # by at most the span of the points
    span = max(np.ptp(x), np.ptp(g))
    assert got == pytest.approx(ref ** rho, rel=1e-9, abs=64 * np.finfo(float).eps * span ** rho)


def test_result_serialization():
    r = ErrorResult.from_cells([0.25, 0.5], "quantile_form", 2.0, 0.0)
    assert r.value == pytest.approx(math.sqrt(0.75))
    d = json.loads(r.to_json())
    assert d["n"] == 2 and d["formula"] == "quantile_form"
    assert format_number(float("inf")) == "inf"
    assert format_number(0.1) == 0.1


def test_quantile_form_against_scipy_quad():
    # independent per-cell integration of |x_i - F^-1(u)|^rho
    integrate = pytest.importorskip("scipy.integrate")
    for d, rho in ((gaussian(), 1.5), (exp_power(1), 3.0), (beta_one(2), 2.5)):
        n = 5
        g = optimal_grid(d, n, rho).points
        total = 0.0
        for i in range(n):
            f = lambda u, x=g[i]: abs(x - float(d.quantile(u))) ** rho  # noqa: E731
            cut = float(d.cdf(g[i]))
            val, _ = integrate.quad(f, i / n, (i + 1) / n, points=[cut], limit=200,
                                    epsabs=0, epsrel=1e-12)
            total += val
        got = error_quantile_form(d, g, rho).value_pow
        assert got == pytest.approx(total, rel=1e-9)


def test_atom_weights_off_by_an_ulp_converge_quietly():
    # five weights of 1/6 sum to one ulp below the cell edge 5/6
    w = np.full(6, 1 / 6)
    w[-1] = 1 - math.fsum(w[:-1])
    d = atoms([0.0] * 5 + [1.0], w)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        r = error_quantile_form(d, midpoint_grid(d, 6), 1.5)
    assert r.value_pow <= 1e-15
