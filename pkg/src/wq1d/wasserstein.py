"""Wasserstein errors of N-point approximations, by several routes.

In one dimension the optimal coupling is comonotone, so the distance to
``(1/N) sum delta_{x_i}`` is an integral of ``|x_i - F^-1(u)|^rho`` over the
level cells. The same quantity can be rewritten as an integral of the CDF in
x space, and at ``rho = 1`` as a sawtooth functional of F; having all three
lets each one check the others.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._integrals import quantile_integral, x_integral
from .distributions import Distribution
from .quantizer import QuantGrid, _check_n, _check_rho, cell_edges, quantile_at

__all__ = [
    "ErrorResult",
    "error_quantile_form",
    "error_cdf_form",
    "error_w1_closed",
    "w_rho_discrete",
    "cell_lower_bound",
    "cell_lower_bounds",
    "pair_lower_bound",
    "format_number",
]

# relative slack when checking that grid points sit inside their cells
CELL_SLACK = 1e-12


def format_number(x: float):
    """17 significant digits for finite values, the string "inf" otherwise."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.17g}")


@dataclass
class ErrorResult:
    """One evaluated error ``e`` together with its pieces."""

    value: float
    value_pow: float
    per_cell: np.ndarray
    formula: str
    est_abs_error: float
    rho: float = 1.0
    n: int = field(default=0)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @classmethod
    def infinite(cls, formula, rho, n):
        return cls(math.inf, math.inf, np.full(n, math.inf), formula, math.inf, rho, n)

    @classmethod
    def from_cells(cls, per_cell, formula, rho, abserr):
        per_cell = np.asarray(per_cell, dtype=float)
        if not np.all(np.isfinite(per_cell)):
            return cls.infinite(formula, rho, per_cell.size)
        per_cell = np.maximum(per_cell, 0.0)
        total = math.fsum(per_cell)
        return cls(total ** (1.0 / rho), total, per_cell, formula,
                   float(abserr), rho, per_cell.size)

    def to_dict(self, per_cell: bool = False) -> dict:
        out = {
            "value": format_number(self.value),
            "value_pow": format_number(self.value_pow),
            "formula": self.formula,
            "est_abs_error": format_number(self.est_abs_error),
            "rho": format_number(self.rho),
            "n": self.n,
        }
        if per_cell:
            out["per_cell"] = [format_number(v) for v in self.per_cell]
        return out

    def to_json(self, per_cell: bool = False) -> str:
        return json.dumps(self.to_dict(per_cell))


def _points(grid):
    if isinstance(grid, QuantGrid):
        return grid.points, grid.rho
    pts = np.asarray(grid, dtype=float).ravel()
    if np.any(np.diff(pts) < 0):
        raise ValueError("grid points must be sorted")
    return pts, None


def error_quantile_form(dist: Distribution, grid, rho: float | None = None,
                        tol: float = 1e-11) -> ErrorResult:
    """``sum_i int_cell |x_i - F^-1(u)|^rho du``, each cell split at ``F(x_i)``.

    ``tol`` is the relative tolerance for each sign-definite piece. Laws
    without a moment of order ``rho`` give an infinite result.
    """
    x, grho = _points(grid)
    rho = _check_rho(grho if rho is None else rho)
    n = x.size
    if not dist.has_moment(rho):
        return ErrorResult.infinite("quantile_form", rho, n)
    i = np.arange(n)
    res = quantile_integral(dist, i / n, (i + 1) / n,
                            lambda q, k: np.abs(x[k] - q) ** rho,
                            kink_x=x, rtol=tol)
    return ErrorResult.from_cells(res.value, "quantile_form", rho, res.abserr.sum())


def _check_cells(dist, x, n):
    L, R = cell_edges(dist, n)
    slack = CELL_SLACK * np.maximum(1.0, np.abs(x))
    bad = (x < L - slack) | (x > R + slack)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0]) + 1
        raise ValueError(
            f"grid point x_{i} = {x[i - 1]!r} lies outside its cell "
            f"[{L[i - 1]!r}, {R[i - 1]!r}]; the CDF form does not apply")
    return L, R


def error_cdf_form(dist: Distribution, grid, rho: float | None = None,
                   tol: float = 1e-11) -> ErrorResult:
    """The x-space rewrite of the cell integrals.

    For each cell, ``rho * int_L^x (x-y)^(rho-1) (F(y) - (i-1)/N) dy``
    plus ``rho * int_x^R (y-x)^(rho-1) (i/N - F(y)) dy`` with
    ``L = F^-1((i-1)/N +)`` and ``R = F^-1(i/N)`` (support ends for the
    outer cells). Only valid when every ``x_i`` lies in ``[L_i, R_i]``;
    other grids are rejected with ``ValueError``.
    """
    x, grho = _points(grid)
    rho = _check_rho(grho if rho is None else rho)
    n = x.size
    if not dist.has_moment(rho):
        return ErrorResult.infinite("cdf_form", rho, n)
    L, R = _check_cells(dist, x, n)
    xc = np.clip(x, L, R)
    i = np.arange(n)
    a = i / n
    b = (i + 1) / n
    lo = np.concatenate([L, xc])
    hi = np.concatenate([xc, R])

    def h(y, k):
        left = k < n
        kk = np.where(left, k, k - n)
        xi = xc[kk]
        mass = np.where(left, dist.mass_above(y, a[kk]), dist.mass_below(y, b[kk]))
        mass = np.maximum(mass, 0.0)
        dist_ = np.where(left, xi - y, y - xi)
        with np.errstate(over="ignore", invalid="ignore"):
            val = rho * np.abs(dist_) ** (rho - 1) * mass
        return np.where(mass > 0, val, 0.0)

    res = x_integral(dist, lo, hi, h, rtol=tol)
    per_cell = res.value[:n] + res.value[n:]
    return ErrorResult.from_cells(per_cell, "cdf_form", rho, res.abserr.sum())


def error_w1_closed(dist: Distribution, n: int, tol: float = 1e-11) -> ErrorResult:
    """``e_N(mu, 1) = (1/N) int min_j |N F(y) - j| dy``.

    Purely atomic laws are summed exactly over the gaps between atoms;
    otherwise the integral is split at ``F^-1(j/N)`` and ``F^-1((2j-1)/(2N))``.
    """
    n = _check_n(n)
    if not dist.has_moment(1.0):
        return ErrorResult.infinite("w1_closed", 1.0, n)
    if dist.atomic:
        pts = np.asarray(dist.x_breaks, dtype=float)
        cum = np.asarray(dist.cdf(pts), dtype=float)
        gaps = np.diff(pts)
        level = n * cum[:-1]
        saw = np.abs(level - np.round(level))
        contrib = gaps * saw / n
        per_cell = np.zeros(n)
        cell = np.clip(np.ceil(level).astype(int) - 1, 0, n - 1)
        np.add.at(per_cell, cell, contrib)
        return ErrorResult.from_cells(per_cell, "w1_closed", 1.0, 0.0)

    L, R = cell_edges(dist, n)
    i = np.arange(n)
    mid = quantile_at(dist, 2.0 * i + 1, 2.0 * n)
    a = i / n
    b = (i + 1) / n

    def h(y, k):
        # distance of N F(y) to the nearer of i-1 and i, divided by N
        m = np.minimum(dist.mass_above(y, a[k]), dist.mass_below(y, b[k]))
        return np.maximum(m, 0.0)

    res = x_integral(dist, L, R, h, cuts=mid[:, None], rtol=tol)
    return ErrorResult.from_cells(res.value, "w1_closed", 1.0, res.abserr.sum())


def w_rho_discrete(xs: Sequence[float], ws: Sequence[float], ys: Sequence[float],
                   vs: Sequence[float], rho: float) -> float:
    """Exact ``W_rho`` between two finitely supported laws.

    Both quantile functions are step functions, so merging the two
    cumulative-weight partitions gives the integral as a finite sum.
    """
    rho = _check_rho(rho)
    xs, cx = _discrete(xs, ws)
    ys, cy = _discrete(ys, vs)
    levels = np.union1d(cx, cy)
    levels = levels[levels > 0]
    widths = np.diff(np.concatenate([[0.0], levels]))
    ix = np.minimum(np.searchsorted(cx, levels, side="left"), xs.size - 1)
    iy = np.minimum(np.searchsorted(cy, levels, side="left"), ys.size - 1)
    total = math.fsum(widths * np.abs(xs[ix] - ys[iy]) ** rho)
    return total ** (1.0 / rho)


def _discrete(points, weights):
    p = np.asarray(points, dtype=float).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if p.size == 0 or p.size != w.size:
        raise ValueError("need one weight per point")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    s = math.fsum(w)
    if abs(s - 1.0) > 1e-12:
        raise ValueError(f"weights sum to {s!r}, not 1 (tolerance 1e-12)")
    order = np.argsort(p, kind="stable")
    p, w = p[order], w[order]
    cum = np.cumsum(w)
    cum[-1] = 1.0
    return p, np.minimum(cum, 1.0)


def cell_lower_bounds(dist: Distribution, n: int, rho: float) -> np.ndarray:
    """Per-cell lower bounds ``(F^-1((4i-1)/4N) - F^-1((4i-3)/4N))^rho / (4^rho N)``."""
    n = _check_n(n)
    rho = _check_rho(rho)
    i = np.arange(1, n + 1, dtype=float)
    hi = quantile_at(dist, 4 * i - 1, 4.0 * n)
    lo = quantile_at(dist, 4 * i - 3, 4.0 * n)
    return np.maximum(hi - lo, 0.0) ** rho / (4.0 ** rho * n)


def cell_lower_bound(dist: Distribution, i: int, n: int, rho: float) -> float:
    n = _check_n(n)
    if not 1 <= i <= n:
        raise ValueError(f"cell index {i} outside 1..{n}")
    return float(cell_lower_bounds(dist, n, rho)[i - 1])


def pair_lower_bound(dist: Distribution, tol: float = 1e-9) -> float:
    """``(1/2) int F ^ (1 - F) dx``, a floor for ``N e_N + (N+1) e_{N+1}``.

    Computed in x space and again in level space as
    ``(1/2) int |F^-1(u) - F^-1(1/2)| du``; the two must agree to ``tol``
    (relative, or absolute below 1), otherwise ``ArithmeticError``.
    """
    if not dist.has_moment(1.0):
        return math.inf
    m = dist.median
    lo, hi = dist.support
    xr = x_integral(dist, [lo, m], [m, hi],
                    lambda y, k: np.where(k == 0, dist.cdf(y), dist.sf(y)), rtol=1e-12)
    ur = quantile_integral(dist, [0.0, 0.5], [0.5, 1.0],
                           lambda q, k: np.abs(q - m), rtol=1e-12)
    vx = 0.5 * math.fsum(xr.value)
    vu = 0.5 * math.fsum(ur.value)
    if not (math.isfinite(vx) and math.isfinite(vu)):
        return math.inf
    if abs(vx - vu) > tol * max(1.0, abs(vx)):
        raise ArithmeticError(
            f"pair bound routes disagree: x-space {vx!r}, level-space {vu!r}")
    return vx
