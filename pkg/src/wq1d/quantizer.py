"""Placement of the N equal-weight support points.

Cell ``i`` (1-based) of an N-point approximation is the level interval
``((i-1)/N, i/N]``; the point attached to it only ever sees the part of the
law that the quantile function maps out of that cell, so every method below
works cell by cell.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._integrals import quantile_integral
from ._quad import QuadratureError
from .distributions import Distribution

__all__ = [
    "QuantGrid",
    "MomentError",
    "cell_edges",
    "quantile_at",
    "midpoint_grid",
    "cell_derivative",
    "optimal_grid",
    "tail_modified_grid",
    "log_tail_grid",
]

METHODS = ("optimal", "midpoint", "tail_modified", "log_tail")


class MomentError(ValueError):
    """The law lacks the moment of order rho, so the error is infinite."""


@dataclass
class QuantGrid:
    """N ordered points of weight 1/N and the recipe that produced them."""

    points: np.ndarray
    rho: float
    method: str = "optimal"
    alpha: float | None = None
    lam: float | None = None
    inner: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        if pts.size == 0:
            raise ValueError("a grid needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if np.any(np.diff(pts) < 0):
            raise ValueError("grid points must be nondecreasing")
        self.points = pts

    @property
    def n(self) -> int:
        return int(self.points.size)

    def __len__(self):
        return self.n

    def to_csv(self, path=None) -> str:
        """``i,x_i`` rows with 1-based i; written to ``path`` when given."""
        buf = io.StringIO()
        buf.write("i,x_i\n")
        for i, x in enumerate(self.points, start=1):
            buf.write(f"{i},{float(x):.17g}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def affine(self, a: float, b: float = 0.0) -> "QuantGrid":
        return QuantGrid(a * self.points + b, self.rho, self.method,
                         self.alpha, self.lam, self.inner, dict(self.meta))


def quantile_at(dist: Distribution, num, den):
    """F^-1(num/den), read through ``isf`` above one half.

    Working with the integer pair keeps ``1 - num/den`` exact, which matters
    for heavy right tails where F^-1 is steep near 1.
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    upper = 2 * num > den
    out = np.empty(np.broadcast(num, den).shape)
    u = np.broadcast_to(num / den, out.shape)
    v = np.broadcast_to((den - num) / den, out.shape)
    up = np.broadcast_to(upper, out.shape)
    if np.any(~up):
        out[~up] = dist.quantile(u[~up])
    if np.any(up):
        out[up] = dist.isf(v[up])
    return out


def cell_edges(dist: Distribution, n: int):
    """Arrays ``L_i = F^-1((i-1)/N +)`` and ``R_i = F^-1(i/N)`` for i = 1..N.

    The outer edges are the support endpoints and may be infinite.
    """
    i = np.arange(1, n + 1, dtype=float)
    lo = np.empty(n)
    hi = np.empty(n)
    lo[0] = dist.support[0]
    if n > 1:
        lo[1:] = dist.quantile_right((i[1:] - 1) / n)
        hi[:-1] = quantile_at(dist, i[:-1], n)
    hi[-1] = dist.support[1]
    return lo, hi


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _check_rho(rho):
    if not (rho >= 1 and math.isfinite(rho)):
        raise ValueError(f"rho must be a finite real >= 1, got {rho!r}")
    return float(rho)


def midpoint_grid(dist: Distribution, n: int, rho: float = 1.0) -> QuantGrid:
    """Points at the cell-centre quantiles F^-1((2i-1)/(2N))."""
    n = _check_n(n)
    i = np.arange(1, n + 1, dtype=float)
    pts = quantile_at(dist, 2 * i - 1, 2 * n)
    return QuantGrid(pts, float(rho), "midpoint")


def _derivatives(dist, idx, n, rho, y, rtol=1e-12):
    """Vectorized cell derivatives for 0-based cells ``idx`` at points ``y``."""
    a = idx / n
    b = (idx + 1) / n

    def g(q, k):
        d = y[k] - q
        return rho * np.sign(d) * np.abs(d) ** (rho - 1)

    return quantile_integral(dist, a, b, g, kink_x=y, rtol=rtol, warn=False)


def cell_derivative(dist: Distribution, i: int, n: int, rho: float, y: float,
                    rtol: float = 1e-12) -> float:
    """Derivative in ``y`` of ``int_cell |y - F^-1(u)|^rho du`` for cell ``i``.

    Raises :class:`QuadratureError` (carrying the estimate) when the
    quadrature misses its tolerance.
    """
    n = _check_n(n)
    if not 1 <= i <= n:
        raise ValueError(f"cell index {i} outside 1..{n}")
    if not rho > 1:
        raise ValueError("the cell objective is differentiable only for rho > 1")
    res = _derivatives(dist, np.array([i - 1.0]), n, float(rho),
                       np.array([float(y)]), rtol=rtol)
    if not res.converged[0]:
        raise QuadratureError("cell derivative quadrature did not converge",
                              float(res.value[0]), float(res.abserr[0]))
    return float(res.value[0])


def _root_points(dist, n, rho, cells, tol):
    """Roots of the cell derivative for the 0-based ``cells``, bracketed throughout."""
    L, R = cell_edges(dist, n)
    L, R = L[cells], R[cells]
    m = cells.size
    lo, hi = L.copy(), R.copy()

    def deriv(pos, sel):
        res = _derivatives(dist, cells[sel].astype(float), n, rho, pos)
        if not res.converged.all():
            bad = np.flatnonzero(~res.converged)
            raise QuadratureError(
                f"cell derivative did not converge on {bad.size} cells",
                res.value, res.abserr)
        return res.value

    # infinite edges: start inside the cell and walk outwards geometrically
    for side in ("lo", "hi"):
        edge = lo if side == "lo" else hi
        sel = np.flatnonzero(~np.isfinite(edge))
        if sel.size == 0:
            continue
        num = np.where(side == "lo", cells[sel] + 0.05, cells[sel] + 0.95)
        start = quantile_at(dist, num, float(n))
        inner = hi[sel] if side == "lo" else lo[sel]
        other = np.where(np.isfinite(inner), inner, quantile_at(dist, cells[sel] + 0.5, float(n)))
        width = np.maximum(np.abs(start - other), 1e-3 * np.maximum(1.0, np.abs(start)))
        pos = start.copy()
        todo = np.ones(sel.size, dtype=bool)
        for _ in range(2000):
            d = deriv(pos[todo], sel[todo])
            wrong = d > 0 if side == "lo" else d < 0
            idx = np.flatnonzero(todo)
            todo[idx[~wrong]] = False
            if not todo.any():
                break
            step = np.where(side == "lo", -1.0, 1.0) * width[todo]
            pos[todo] += step
            width[todo] *= 2.0
            if not np.all(np.isfinite(pos)):
                raise ArithmeticError("could not bracket an extreme optimal point")
        edge[sel] = pos

    return _illinois(deriv, lo, hi, L, R, tol)


def _illinois(deriv, lo, hi, L, R, tol):
    """Shrink sign-change brackets ``[lo, hi]`` of ``deriv`` to ``tol * max(1, |x|)``.

    Regula falsi with the Illinois halving; any step that fails to halve the
    bracket is followed by a plain bisection, so the bracket width never does
    worse than bisection every second step. A point whose last step is within
    tolerance is confirmed by evaluating just either side of it.
    """
    m = lo.size
    x = 0.5 * (lo + hi)
    active = np.flatnonzero(hi > lo)
    if active.size:
        flo = np.zeros(m)
        fhi = np.zeros(m)
        flo[active] = deriv(lo[active], active)
        fhi[active] = deriv(hi[active], active)
        # roots sitting on an edge
        for edge, f in ((lo, flo), (hi, fhi)):
            hit = active[f[active] == 0]
            x[hit] = edge[hit]
            lo[hit] = hi[hit] = edge[hit]
        active = active[hi[active] > lo[active]]
        side = np.zeros(m, dtype=int)
        bisect_next = np.zeros(m, dtype=bool)
        for _ in range(400):
            if active.size == 0:
                break
            a = active
            mid = 0.5 * (lo[a] + hi[a])
            denom = fhi[a] - flo[a]
            with np.errstate(divide="ignore", invalid="ignore"):
                xf = (lo[a] * fhi[a] - hi[a] * flo[a]) / denom
            use_mid = bisect_next[a] | ~(xf > lo[a]) | ~(xf < hi[a])
            xn = np.where(use_mid, mid, xf)
            fx = deriv(xn, a)
            prev_w = hi[a] - lo[a]
            pos = fx > 0
            neg = fx < 0
            zero = ~pos & ~neg
            ia, ib, iz = a[pos], a[neg], a[zero]
            hi[ia], fhi[ia] = xn[pos], fx[pos]
            flo[ia[side[ia] == 1]] *= 0.5
            side[ia] = 1
            lo[ib], flo[ib] = xn[neg], fx[neg]
            fhi[ib[side[ib] == -1]] *= 0.5
            side[ib] = -1
            lo[iz] = hi[iz] = xn[zero]
            x[a] = xn
            new_w = hi[a] - lo[a]
            bisect_next[a] = new_w > 0.5 * prev_w
            scale = tol * np.maximum(1.0, np.abs(xn))
            small_step = np.minimum(np.abs(xn - lo[a]), np.abs(hi[a] - xn)) <= scale
            done = (new_w <= scale) | zero
            # confirm a near-root by testing both sides at tolerance distance
            probe = small_step & ~done
            if probe.any():
                pa = a[probe]
                d = scale[probe]
                left = np.maximum(xn[probe] - d, lo[pa])
                right = np.minimum(xn[probe] + d, hi[pa])
                fl = deriv(left, pa)
                fr = deriv(right, pa)
                okl = fl <= 0
                okr = fr >= 0
                lo[pa[okl]], flo[pa[okl]] = left[okl], fl[okl]
                hi[pa[okr]], fhi[pa[okr]] = right[okr], fr[okr]
                # a failed probe moved the root past xn: the probe point is the new edge
                lo[pa[~okr]], flo[pa[~okr]] = right[~okr], fr[~okr]
                hi[pa[~okl]], fhi[pa[~okl]] = left[~okl], fl[~okl]
                done[probe] = (hi[pa] - lo[pa]) <= 2 * d + 1e-300
            fin = a[done & ~zero]
            x[fin] = 0.5 * (lo[fin] + hi[fin])
            active = a[~done]
    lo_c = np.where(np.isfinite(L), L, -np.inf)
    hi_c = np.where(np.isfinite(R), R, np.inf)
    return np.clip(x, lo_c, hi_c)


def _optimal_points(dist, n, rho, tol, cells=None):
    if cells is None:
        cells = np.arange(n)
    cells = np.asarray(cells, dtype=int)
    if rho == 1.0:
        return quantile_at(dist, 2.0 * cells + 1, 2.0 * n)
    if rho == 2.0:
        # cell means; splitting at 0 keeps every piece sign-definite
        res = quantile_integral(dist, cells / n, (cells + 1) / n, lambda q, k: q,
                                kink_x=0.0, rtol=min(tol, 1e-11) if tol > 0 else 1e-12)
        if not res.converged.all():
            raise QuadratureError("cell-mean quadrature did not converge",
                                  res.value, res.abserr)
        L, R = cell_edges(dist, n)
        return np.clip(n * res.value, L[cells], R[cells])
    return _root_points(dist, n, rho, cells, tol)


def optimal_grid(dist: Distribution, n: int, rho: float, tol: float = 1e-12) -> QuantGrid:
    """The grid that attains the optimal N-point error at order ``rho``.

    rho = 1 gives the cell medians F^-1((2i-1)/(2N)), rho = 2 the cell means
    N * int_cell F^-1; other orders solve for the unique zero of the cell
    derivative inside ``[L_i, R_i]`` by bisection to a bracket of
    ``tol * max(1, |x|)``.

    Raises :class:`MomentError` when the law has no moment of order ``rho``.
    """
    n = _check_n(n)
    rho = _check_rho(rho)
    if not dist.has_moment(rho):
        raise MomentError(
            f"{dist.name} has no moment of order {rho:g}; the optimal error is +inf")
    pts = _optimal_points(dist, n, rho, tol)
    return QuantGrid(np.sort(pts), rho, "optimal", meta={"tol": tol})


def _edge_modified(dist, n, rho, inner, reach, tol):
    n = _check_n(n)
    rho = _check_rho(rho)
    if n < 2:
        raise ValueError("edge-modified grids need n >= 2")
    if inner not in ("optimal", "midpoint"):
        raise ValueError(f"inner method must be 'optimal' or 'midpoint', got {inner!r}")
    pts = np.empty(n)
    if n > 2:
        interior = np.arange(1, n - 1)
        if inner == "optimal":
            pts[1:-1] = _optimal_points(dist, n, rho, tol, interior)
        else:
            pts[1:-1] = quantile_at(dist, 2.0 * interior + 1, 2.0 * n)
    pts[0] = min(float(quantile_at(dist, 1.0, n)), -reach)
    pts[-1] = max(float(quantile_at(dist, n - 1.0, n)), reach)
    return np.sort(pts)


def tail_modified_grid(dist: Distribution, n: int, rho: float, alpha: float,
                       inner: str = "midpoint", tol: float = 1e-12) -> QuantGrid:
    """Interior points by ``inner``; the extremes pushed out to +/- N^(1/rho - alpha).

    ``x_1 = min(F^-1(1/N), -N^(1/rho-alpha))`` and
    ``x_N = max(F^-1((N-1)/N), N^(1/rho-alpha))``; the result is sorted.
    """
    rho = _check_rho(rho)
    if not 0 < alpha < 1 / rho:
        raise ValueError(f"alpha must lie in (0, 1/rho) = (0, {1 / rho:g})")
    reach = float(n) ** (1 / rho - alpha)
    pts = _edge_modified(dist, n, rho, inner, reach, tol)
    return QuantGrid(pts, rho, "tail_modified", alpha=float(alpha), inner=inner)


def log_tail_grid(dist: Distribution, n: int, rho: float, lam: float,
                  inner: str = "midpoint", tol: float = 1e-12) -> QuantGrid:
    """Like :func:`tail_modified_grid` with the extremes at +/- ln(N)/lam."""
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"lambda must be a positive finite number, got {lam!r}")
    reach = math.log(n) / lam if n >= 1 else 0.0
    pts = _edge_modified(dist, n, rho, inner, reach, tol)
    return QuantGrid(pts, float(rho), "log_tail", lam=float(lam), inner=inner)


def make_grid(dist: Distribution, n: int, rho: float, method: str = "optimal",
              alpha: float | None = None, lam: float | None = None,
              inner: str = "midpoint", tol: float = 1e-12) -> QuantGrid:
    """Dispatch on a method tag."""
    if method == "optimal":
        return optimal_grid(dist, n, rho, tol)
    if method == "midpoint":
        return midpoint_grid(dist, n, rho)
    if method == "tail_modified":
        if alpha is None:
            raise ValueError("tail_modified needs alpha")
        return tail_modified_grid(dist, n, rho, alpha, inner, tol)
    if method == "log_tail":
        if lam is None:
            raise ValueError("log_tail needs lambda")
        return log_tail_grid(dist, n, rho, lam, inner, tol)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
