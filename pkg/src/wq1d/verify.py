"""Numerical self-checks of the library's structural guarantees.

Each check returns :class:`Outcome` records; :func:`run_all` runs them in
order and :func:`main` (the ``verify`` subcommand) prints one line per
outcome. ``quick=True`` thins the N ranges so the whole pass takes about a
minute; ``quick=False`` uses the full ranges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (Distribution, atoms, beta_one, exp_power, gaussian, mixture,
                            pareto, tabulated, uniform)
from .quantizer import _derivatives, cell_edges, midpoint_grid, optimal_grid
from .rates import (explicit_bound_constant, extremal_growth, limit_constant, mc_baseline,
                    sweep, tail_profile)
from .wasserstein import (cell_lower_bounds, error_cdf_form, error_quantile_form,
                          error_w1_closed, pair_lower_bound, w_rho_discrete)

RHOS = (1.0, 1.5, 2.0, 3.0)


@dataclass
class Outcome:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}  {self.detail}".rstrip()


def suite() -> list[Distribution]:
    """The reference laws used throughout the checks."""
    return [uniform(), beta_one(2), beta_one(4), pareto(4), exp_power(1), exp_power(2),
            gaussian(), atoms([0, 1], [0.5, 0.5])]


def _extra_laws() -> list[Distribution]:
    return [
        atoms([-1.0, 0.5, 2.0], [0.2, 0.5, 0.3]),
        tabulated([0.0, 1.0, 1.0, 2.0, 3.0], [0.1, 0.4, 0.6, 0.6, 1.0]),
        mixture([0.3, 0.7], [uniform(), gaussian(2.0, 0.5)]),
        beta_one(0.5),
        pareto(2),
    ]


def _short(d):
    return d.name


def _few(failures):
    return "" if not failures else f"{len(failures)} failing, e.g. {failures[:3]}"


# ---------------------------------------------------------------------------
# distributions


def check_distributions() -> list[Outcome]:
    out = []
    u = (np.arange(1000) + 0.5) / 1000
    for d in suite() + _extra_laws():
        q = np.asarray(d.quantile(u))
        qr = np.asarray(d.quantile_right(u))
        mono = bool(np.all(np.diff(q) >= 0) and np.all(np.diff(qr) >= 0) and np.all(q <= qr))
        out.append(Outcome(f"quantile order [{_short(d)}]", mono))

        # ties x == F^-1(u) are exact only for atomic laws; a continuous CDF
        # rounds to within an ulp of u there, so probe just beside them
        off = 1e-9 * np.maximum(1, np.abs(q))
        xs = np.unique(np.concatenate([q + off, q - off] + ([q] if d.atomic else [])))
        F = np.asarray(d.cdf(xs))
        lhs = u[:, None] <= F[None, :]
        rhs = q[:, None] <= xs[None, :]
        out.append(Outcome(f"Galois duality [{_short(d)}]", bool(np.all(lhs == rhs)),
                           f"{int(np.count_nonzero(lhs != rhs))} mismatches"))

        Fq = np.asarray(d.cdf(q))
        Fq_left = np.asarray(d.left_cdf(q))
        ok = bool(np.all(Fq >= u - 1e-15) and np.all(Fq_left <= u + 1e-15))
        out.append(Outcome(f"F(F^-1(u)) >= u >= F(F^-1(u)-) [{_short(d)}]", ok))

        if d.density is not None and not d.atomic and d.u_breaks.size == 0:
            err = float(np.max(np.abs(Fq - u)))
            out.append(Outcome(f"round trip [{_short(d)}]", err <= 1e-10, f"max {err:.2e}"))

        a, b = 2.5, -1.25
        da = d.affine(a, b)
        err = float(np.max(np.abs(np.asarray(da.quantile(u)) - (a * q + b))))
        out.append(Outcome(f"affine quantile [{_short(d)}]", err == 0.0, f"max {err:.2e}"))
    return out


# ---------------------------------------------------------------------------
# quantizer


def check_quantizer(quick: bool = True) -> list[Outcome]:
    out = []
    ns = (1, 2, 3, 5, 8, 13, 21, 32) if quick else tuple(range(1, 33))
    worst = 0.0
    fails = []
    brackets = []
    foc = 0.0
    for d in suite():
        for rho in RHOS:
            if not d.has_moment(rho):
                continue
            for n in ns:
                g = optimal_grid(d, n, rho)
                eo = error_quantile_form(d, g, rho).value
                em = error_quantile_form(d, midpoint_grid(d, n), rho).value
                worst = max(worst, eo - em)
                if eo > em + 1e-10:
                    fails.append(f"{d.name} rho={rho} N={n}")
                L, R = cell_edges(d, n)
                fin = np.isfinite(L) & np.isfinite(R)
                slack = 1e-12 * np.maximum(1, np.abs(g.points))
                if np.any((g.points < L - slack) & fin) or np.any((g.points > R + slack) & fin):
                    brackets.append(f"{d.name} rho={rho} N={n}")
                if rho > 1 and not d.atomic and n in (1, 8, 32):
                    foc = max(foc, _relative_foc(d, n, rho, g.points))
    out.append(Outcome("optimal <= midpoint", not fails,
                       f"max excess {worst:.2e}" + (f"; {fails[:3]}" if fails else "")))
    out.append(Outcome("optimal points inside their cells", not brackets, _few(brackets)))
    out.append(Outcome("first-order condition at optimal points", foc <= 1e-8,
                       f"max relative derivative {foc:.2e}"))

    diff = 0.0
    for d in suite():
        if not d.has_moment(2.0) or d.atomic:
            continue
        for n in (1, 7, 32):
            closed = optimal_grid(d, n, 2.0).points
            root = optimal_grid(d, n, 2.0 + 1e-12).points
            diff = max(diff, float(np.max(np.abs(closed - root))))
    out.append(Outcome("rho=2 cell means match root finding", diff <= 1e-6, f"max {diff:.2e}"))

    ratios = []
    for beta in (4.0, 8.0):
        rho = 2.0
        alpha = 1 / rho - 1 / beta
        nv = [2 ** k for k in range(4, 13)]
        gr = extremal_growth(pareto(beta), rho, alpha, nv)
        ratios.append(float(gr.max() / gr.min()))
    out.append(Outcome("extremal points grow at most like N^(1/rho - alpha)",
                       max(ratios) <= 2.0, f"max/min ratios {np.round(ratios, 4).tolist()}"))

    aff = 0.0
    for d in suite():
        for rho in (1.5, 3.0):
            if not d.has_moment(rho):
                continue
            g = optimal_grid(d, 8, rho)
            ga = optimal_grid(d.affine(3.0, -2.0), 8, rho)
            aff = max(aff, float(np.max(np.abs(ga.points - (3.0 * g.points - 2.0))
                                        / np.maximum(1, np.abs(ga.points)))))
    out.append(Outcome("affine equivariance of optimal grids", aff <= 1e-9, f"max {aff:.2e}"))
    return out


def _relative_foc(d, n, rho, x):
    """|derivative| at the computed points, relative to ``rho int |x - F^-1|^(rho-1)``."""
    idx = np.arange(n, dtype=float)
    der = _derivatives(d, idx, n, rho, x).value
    from ._integrals import quantile_integral
    mag = quantile_integral(d, idx / n, (idx + 1) / n,
                            lambda q, k: rho * np.abs(x[k] - q) ** (rho - 1),
                            kink_x=x).value
    # derivative bracket of width ~tol*|x| leaves a residual of order
    # rho (rho-1) int |x - F^-1|^(rho-2) * tol, so compare against the magnitude
    return float(np.max(np.abs(der) / np.maximum(mag, 1e-300)))


# ---------------------------------------------------------------------------
# wasserstein


def check_wasserstein(quick: bool = True) -> list[Outcome]:
    out = []
    rel = 0.0
    w1 = 0.0
    lower_fail = []
    for d in suite():
        for rho in RHOS:
            if not d.has_moment(rho):
                continue
            for n in (1, 2, 7, 32, 128):
                g = optimal_grid(d, n, rho)
                q = error_quantile_form(d, g, rho)
                for grid, qv in ((g, q), (midpoint_grid(d, n), None)):
                    qv = qv or error_quantile_form(d, grid, rho)
                    c = error_cdf_form(d, grid, rho)
                    if qv.value or c.value:
                        rel = max(rel, abs(qv.value - c.value) / max(qv.value, 1e-300))
                scale = max(q.value, 1e-300)
                if rho == 1.0:
                    w = error_w1_closed(d, n)
                    if q.value or w.value:
                        w1 = max(w1, abs(q.value - w.value) / scale)
                lb = math.fsum(cell_lower_bounds(d, n, rho))
                if lb > q.value_pow * (1 + 1e-10) + 1e-300:
                    lower_fail.append(f"{d.name} rho={rho} N={n}")
    out.append(Outcome("quantile form == cdf form", rel <= 1e-8, f"max rel {rel:.2e}"))
    out.append(Outcome("rho=1: quantile form == W1 closed form", w1 <= 1e-8, f"max rel {w1:.2e}"))
    out.append(Outcome("sum of cell lower bounds <= e_N^rho", not lower_fail, _few(lower_fail)))

    pair_fail = []
    nmax = 64
    for d in suite():
        pb = pair_lower_bound(d)
        e = [error_w1_closed(d, n).value for n in range(1, nmax + 2)]
        for n in range(1, nmax + 1):
            if n * e[n - 1] + (n + 1) * e[n] < pb * (1 - 1e-10):
                pair_fail.append(f"{d.name} N={n}")
    out.append(Outcome("N e_N + (N+1) e_(N+1) >= pair bound (rho=1, hence all rho)",
                       not pair_fail, _few(pair_fail)))

    mono_fail = []
    for d in suite():
        for n in (1, 3, 16):
            vals = [error_quantile_form(d, optimal_grid(d, n, r), r).value
                    for r in RHOS if d.has_moment(r)]
            if any(a > b + 1e-9 for a, b in zip(vals, vals[1:])):
                mono_fail.append(f"{d.name} N={n}")
    out.append(Outcome("e_N nondecreasing in rho", not mono_fail, _few(mono_fail)))

    decay_fail = []
    for d in suite():
        for rho in ((1.0, 2.0) if quick else RHOS):
            if not d.has_moment(rho):
                continue
            e4 = error_quantile_form(d, optimal_grid(d, 16, rho), rho).value
            e12 = error_quantile_form(d, optimal_grid(d, 4096, rho), rho).value
            if e12 > e4:
                decay_fail.append(f"{d.name} rho={rho}")
    out.append(Outcome("e_(2^12) <= e_(2^4)", not decay_fail, _few(decay_fail)))

    rng = np.random.Generator(np.random.Philox(key=[2024, 0]))
    sym = True
    tri = 0.0
    for _ in range(200):
        laws = []
        for _ in range(3):
            k = int(rng.integers(1, 6))
            w = rng.random(k)
            w /= w.sum()
            w[-1] = 1.0 - math.fsum(w[:-1])
            laws.append((np.sort(rng.normal(size=k)), w))
        rho = float(rng.choice(RHOS))
        (x, a), (y, b), (z, c) = laws
        dxy = w_rho_discrete(x, a, y, b, rho)
        sym &= dxy == w_rho_discrete(y, b, x, a, rho)
        tri = max(tri, dxy - w_rho_discrete(x, a, z, c, rho) - w_rho_discrete(z, c, y, b, rho))
    out.append(Outcome("discrete W_rho symmetric", bool(sym)))
    out.append(Outcome("discrete W_rho triangle inequality", tri <= 1e-12, f"max excess {tri:.2e}"))

    aff = 0.0
    for d in suite():
        for rho in (1.0, 2.0, 3.0):
            if not d.has_moment(rho):
                continue
            e = error_quantile_form(d, optimal_grid(d, 8, rho), rho).value
            da = d.affine(2.0, 5.0)
            ea = error_quantile_form(da, optimal_grid(da, 8, rho), rho).value
            if e:
                aff = max(aff, abs(ea - 2.0 * e) / (2.0 * e))
    out.append(Outcome("e_N(aX+b) = a e_N(X)", aff <= 1e-9, f"max rel {aff:.2e}"))
    return out


# ---------------------------------------------------------------------------
# rates


def check_rates(quick: bool = True) -> list[Outcome]:
    out = []
    disagree = []
    major = []
    for d in suite():
        for beta in (0.5, 1.0, 2.0, 4.0, 8.0):
            tp = tail_profile(d, beta)
            if tp.finite_x != tp.finite_u:
                disagree.append(f"{d.name} beta={beta}")
            bound = tp.sup_x_left ** (1 / beta) + tp.sup_x_right ** (1 / beta)
            if tp.sup_u > bound * (1 + 1e-9) + 1e-12:
                major.append(f"{d.name} beta={beta}")
    out.append(Outcome("tail verdicts agree in x and u", not disagree, _few(disagree)))
    out.append(Outcome("quantile spread bounded by tail constants", not major, _few(major)))

    ceil_fail = []
    cases = [(pareto(4), 2.0, 0.25), (pareto(8), 2.0, 0.375), (pareto(2), 1.0, 0.5),
             (uniform(), 1.0, 0.5), (gaussian(), 2.0, 0.25), (exp_power(1), 1.0, 0.5)]
    nv = [2 ** k for k in range(4, 11 if quick else 15)]
    for d, rho, alpha in cases:
        B = explicit_bound_constant(d, rho, alpha)
        rep = sweep(d, rho, nv, "optimal")
        scaled = np.asarray(nv, dtype=float) ** (alpha * rho) * rep.errors ** rho
        if np.any(scaled > B):
            ceil_fail.append(f"{d.name} rho={rho} alpha={alpha}")
    out.append(Outcome("N^(alpha rho) e_N^rho below explicit ceiling", not ceil_fail,
                       _few(ceil_fail)))

    sand = []
    for d in suite():
        for rho in RHOS:
            if not d.has_moment(rho):
                continue

            def scaled(n):
                return n * math.fsum(cell_lower_bounds(d, n, rho)) ** (1 / rho)

            # the two-point law has e_N = 0 at every even N, so for atomic
            # laws the floor is taken over consecutive pairs (N, N+1)
            vals = [max(scaled(n), scaled(n + 1)) if d.atomic else scaled(n)
                    for n in (2 ** k for k in range(4, 13))]
            if min(vals) <= 0:
                sand.append(f"{d.name} rho={rho}")
    out.append(Outcome("N (sum of cell bounds)^(1/rho) stays positive", not sand, _few(sand)))

    r1 = sweep(gaussian(), 1.5, [4, 8, 16, 32], "optimal").to_csv()
    r2 = sweep(gaussian(), 1.5, [4, 8, 16, 32], "optimal", threads=3).to_csv()
    m1 = mc_baseline(exp_power(1), 1.0, 64, 5, seed=11).values
    m2 = mc_baseline(exp_power(1), 1.0, 64, 5, seed=11, threads=2).values
    out.append(Outcome("bit-identical reports and seeded baselines",
                       r1 == r2 and bool(np.array_equal(m1, m2))))
    return out


def constant_convergence_case(d: Distribution, rho: float) -> Outcome | None:
    """N e_N against the limiting constant along N = 2^8, ..., 2^14.

    ``None`` when the law has no density or the constant is infinite.
    """
    if d.density is None:
        return None
    lim = limit_constant(d, rho)
    if not math.isfinite(lim):
        return None
    rep = sweep(d, rho, [2 ** k for k in (8, 10, 12, 14)], "optimal", track_alpha=1.0)
    gaps = np.abs(rep.constant_track - lim)
    trend = bool(np.all(np.diff(gaps) <= 1e-12 * lim))
    gap = gaps[-1] / lim
    return Outcome(
        f"N e_N -> limit constant within 2% at 2^14 [{d.name} rho={rho}]",
        gap <= 0.02 and trend,
        f"N e_N {rep.constant_track[-1]:.6f} vs {lim:.6f} ({100 * gap:.2f}%)"
        + ("" if trend else ", gap not shrinking"))


def check_constant_convergence() -> list[Outcome]:
    out = []
    for d in suite():
        for rho in RHOS:
            o = constant_convergence_case(d, rho)
            if o is not None:
                out.append(o)
    return out


def run_all(quick: bool = True):
    yield from check_distributions()
    yield from check_quantizer(quick)
    yield from check_wasserstein(quick)
    yield from check_rates(quick)
    yield from check_constant_convergence()


def main(quick: bool = True, stream=None) -> int:
    import sys
    stream = stream or sys.stdout
    failed = 0
    for o in run_all(quick):
        print(o.line(), file=stream, flush=True)
        failed += not o.ok
    print(f"{failed} failed", file=stream)
    return 1 if failed else 0
