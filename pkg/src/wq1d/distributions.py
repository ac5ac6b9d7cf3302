"""One-dimensional probability measures seen through F, F^-1 and f.

A :class:`Distribution` bundles vectorized callables for the cumulative
distribution function, the left-continuous quantile function
``inf{x : F(x) >= u}``, its right limit ``inf{x : F(x) > u}``, and, when the
measure has one, the density of its absolutely continuous part. Tail-accurate
companions ``sf(x) = 1 - F(x)`` and ``isf(v) = F^-1(1 - v)`` are carried as
well: the error integrals live in the far tails, where forming ``1 - F`` or
``1 - v`` in floating point destroys every significant digit.
"""

from __future__ import annotations

import csv
import math
import shlex
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import special

__all__ = [
    "Distribution",
    "FamilySpec",
    "make_distribution",
    "parse_spec",
    "invert_cdf",
    "uniform",
    "beta_one",
    "exp_power",
    "pareto",
    "gaussian",
    "atoms",
    "mixture",
    "tabulated",
]

Fn = Callable[[np.ndarray], np.ndarray]


def _elementwise(fn: Fn) -> Fn:
    """Accept scalars or arrays; hand scalars back as Python floats."""

    def wrapped(x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(fn(arr), dtype=float)
        if out.ndim == 0:
            return float(out)
        return out

    wrapped.__name__ = getattr(fn, "__name__", "fn")
    wrapped.__doc__ = fn.__doc__
    return wrapped


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability measure on the real line.

    All callables are vectorized. ``quantile`` is defined on (0, 1),
    ``quantile_right`` on [0, 1) and ``isf(v)`` equals ``quantile(1 - v)``
    computed without cancellation. ``u_breaks`` lists levels at which the
    quantile function jumps, ``x_breaks`` the abscissae at which the CDF
    jumps or has a kink; integrators split there.
    """

    cdf: Fn
    quantile: Fn
    quantile_right: Fn
    sf: Fn
    isf: Fn
    support: tuple[float, float]
    moment_order: float = math.inf
    density: Fn | None = None
    cdf_left: Fn | None = None
    name: str = "distribution"
    u_breaks: np.ndarray = field(default_factory=lambda: np.empty(0))
    x_breaks: np.ndarray = field(default_factory=lambda: np.empty(0))
    atomic: bool = False

    def __repr__(self):
        return f"Distribution({self.name})"

    def has_moment(self, rho: float) -> bool:
        """True when the absolute moment of order ``rho`` is finite."""
        return math.isinf(self.moment_order) or rho < self.moment_order

    def left_cdf(self, x):
        """F(x-), the mass of the open half-line (-inf, x)."""
        if self.cdf_left is None:
            return self.cdf(x)
        return self.cdf_left(x)

    @property
    def median(self) -> float:
        return float(self.quantile(0.5))

    @property
    def scale(self) -> float:
        """Interquartile range, or a unit fallback for degenerate laws."""
        iqr = float(self.quantile(0.75) - self.quantile(0.25))
        if iqr > 0 and math.isfinite(iqr):
            return iqr
        return max(1.0, abs(self.median))

    def mass_above(self, y, a):
        """F(y) - a evaluated with ``sf`` in the upper half to keep precision.

        ``a`` is a level in [0, 1]; broadcasting applies.
        """
        y = np.asarray(y, dtype=float)
        a = np.asarray(a, dtype=float)
        F = np.asarray(self.cdf(y), dtype=float)
        upper = F > 0.5
        if not np.any(upper):
            return F - a
        S = np.asarray(self.sf(y), dtype=float)
        return np.where(upper, (1.0 - a) - S, F - a)

    def mass_below(self, y, b):
        """b - F(y), the mirror of :meth:`mass_above`."""
        y = np.asarray(y, dtype=float)
        b = np.asarray(b, dtype=float)
        F = np.asarray(self.cdf(y), dtype=float)
        upper = F > 0.5
        if not np.any(upper):
            return b - F
        S = np.asarray(self.sf(y), dtype=float)
        return np.where(upper, S - (1.0 - b), b - F)

    def affine(self, a: float, b: float = 0.0) -> "Distribution":
        """Law of ``a*X + b`` for ``a > 0``; quantiles map exactly."""
        if not a > 0:
            raise ValueError("affine pushforward needs a > 0")
        d = self
        dens = None
        if d.density is not None:
            dens = _elementwise(lambda x: np.asarray(d.density((x - b) / a)) / a)
        cdf_left = None
        if d.cdf_left is not None:
            cdf_left = _elementwise(lambda x: d.cdf_left((x - b) / a))
        lo, hi = d.support
        return replace(
            d,
            cdf=_elementwise(lambda x: d.cdf((x - b) / a)),
            sf=_elementwise(lambda x: d.sf((x - b) / a)),
            quantile=_elementwise(lambda u: a * np.asarray(d.quantile(u)) + b),
            quantile_right=_elementwise(
                lambda u: a * np.asarray(d.quantile_right(u)) + b),
            isf=_elementwise(lambda v: a * np.asarray(d.isf(v)) + b),
            density=dens,
            cdf_left=cdf_left,
            support=(a * lo + b, a * hi + b),
            x_breaks=a * d.x_breaks + b,
            name=f"{a!r}*{d.name}+{b!r}",
        )


# ---------------------------------------------------------------------------
# generic inversion


def _bisect_inverse(pred, targets, lo, hi, tol=0.0, max_iter=400):
    """Smallest x with ``pred(x, target)`` true, for a monotone predicate.

    ``pred`` must be false far left and true far right. ``lo``/``hi`` are
    starting guesses that get expanded geometrically until they bracket.
    """
    targets = np.asarray(targets, dtype=float)
    shape = targets.shape
    t = targets.ravel()
    lo = np.broadcast_to(np.asarray(lo, dtype=float), t.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), t.shape).copy()

    def _width():
        return np.maximum(hi - lo, 1e-6 * np.maximum(1.0, np.abs(lo)))

    width = _width()

    for _ in range(2100):
        bad = pred(lo, t)
        if not bad.any():
            break
        lo[bad] -= width[bad]
        width[bad] *= 2.0
        if not np.all(np.isfinite(lo)):
            raise ArithmeticError("cannot bracket the quantile from below")
    width = _width()
    for _ in range(2100):
        bad = ~pred(hi, t)
        if not bad.any():
            break
        hi[bad] += width[bad]
        width[bad] *= 2.0
        if not np.all(np.isfinite(hi)):
            raise ArithmeticError("cannot bracket the quantile from above")

    if tol > 0:
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            gap = hi - lo
            active = (gap > tol * np.maximum(1.0, np.abs(mid))) & (mid > lo) & (mid < hi)
            if not active.any():
                break
            ok = pred(mid, t)
            hi[active & ok] = mid[active & ok]
            lo[active & ~ok] = mid[active & ~ok]
        return hi.reshape(shape)

    # bisect on the ordered integer encoding of the doubles: at most 64 steps
    # down to adjacent floats, whatever the scale of the bracket
    lo_o, hi_o = _float_order(lo), _float_order(hi)
    for _ in range(70):
        mid_o = lo_o // 2 + hi_o // 2 + (lo_o % 2 + hi_o % 2) // 2
        active = (mid_o > lo_o) & (mid_o < hi_o)
        if not active.any():
            break
        ok = pred(_order_float(mid_o), t)
        hi_o = np.where(active & ok, mid_o, hi_o)
        lo_o = np.where(active & ~ok, mid_o, lo_o)
    return _order_float(hi_o).reshape(shape)


_SIGN = np.int64(-0x8000000000000000)


def _float_order(x):
    """Map doubles to int64 so that integer order matches float order."""
    bits = np.ascontiguousarray(x, dtype=np.float64).view(np.int64)
    return np.where(bits < 0, _SIGN - bits, bits)


def _order_float(k):
    k = np.asarray(k, dtype=np.int64)
    return np.where(k < 0, _SIGN - k, k).astype(np.int64).view(np.float64)


def invert_cdf(dist, u, tol: float = 0.0, right: bool = False, upper: bool = False):
    """Numerically invert a CDF by bracket expansion and bisection.

    Returns ``inf{x : F(x) >= u}`` (or ``inf{x : F(x) > u}`` with
    ``right=True``) to within ``tol * max(1, |x|)``; ``tol=0`` bisects down
    to adjacent floats. With ``upper=True`` the argument is read as an upper
    tail mass ``v`` and the result is ``F^-1(1 - v)``, located through the
    survival function so that tiny ``v`` keep full precision.

    ``dist`` is a :class:`Distribution` or any object exposing ``cdf`` (and
    ``sf`` when ``upper`` is set).
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr <= 0) | (u_arr >= 1)) and not right:
        raise ValueError("quantile level must lie in (0, 1)")
    support = getattr(dist, "support", (-math.inf, math.inf))
    lo0, hi0 = _start_bracket(support)
    if upper:
        sf = dist.sf
        pred = (lambda x, v: np.asarray(sf(x)) < v) if right else (
            lambda x, v: np.asarray(sf(x)) <= v)
    else:
        cdf = dist.cdf
        pred = (lambda x, t: np.asarray(cdf(x)) > t) if right else (
            lambda x, t: np.asarray(cdf(x)) >= t)
    x = _bisect_inverse(pred, u_arr, lo0, hi0, tol=tol)
    lo, hi = support
    x = np.clip(x, lo, hi)
    return float(x) if x.ndim == 0 else x


def _start_bracket(support):
    lo, hi = support
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    if math.isfinite(lo):
        return lo, lo + 1.0
    if math.isfinite(hi):
        return hi - 1.0, hi
    return -1.0, 1.0


# ---------------------------------------------------------------------------
# analytic families


def uniform(low: float = 0.0, high: float = 1.0) -> Distribution:
    if not high > low:
        raise ValueError("uniform needs high > low")
    w = high - low

    @_elementwise
    def cdf(x):
        return np.clip((x - low) / w, 0.0, 1.0)

    @_elementwise
    def sf(x):
        return np.clip((high - x) / w, 0.0, 1.0)

    @_elementwise
    def quantile(u):
        return low + w * u

    @_elementwise
    def isf(v):
        return high - w * v

    @_elementwise
    def density(x):
        return np.where((x >= low) & (x <= high), 1.0 / w, 0.0)

    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile,
                        sf=sf, isf=isf, density=density, support=(low, high),
                        name="uniform" if (low, high) == (0.0, 1.0)
                        else f"uniform({low},{high})",
                        x_breaks=np.array([low, high]))


def beta_one(beta: float) -> Distribution:
    """Beta(beta, 1): density ``beta x^(beta-1)`` on [0, 1]."""
    _check_positive(beta)

    @_elementwise
    def cdf(x):
        return np.clip(x, 0.0, 1.0) ** beta

    @_elementwise
    def sf(x):
        xc = np.clip(x, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            return -np.expm1(beta * np.log(xc))

    @_elementwise
    def quantile(u):
        return u ** (1.0 / beta)

    @_elementwise
    def isf(v):
        return np.exp(np.log1p(-v) / beta)

    @_elementwise
    def density(x):
        inside = (x > 0) & (x <= 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(inside, beta * np.where(inside, x, 1.0) ** (beta - 1), 0.0)

    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile,
                        sf=sf, isf=isf, density=density, support=(0.0, 1.0),
                        name=f"beta_one({beta:g})", x_breaks=np.array([0.0, 1.0]))


def exp_power(beta: float) -> Distribution:
    """Density ``beta x^(beta-1) exp(-x^beta)`` on (0, inf)."""
    _check_positive(beta)

    @_elementwise
    def cdf(x):
        xp = np.maximum(x, 0.0)
        return -np.expm1(-(xp ** beta))

    @_elementwise
    def sf(x):
        return np.exp(-(np.maximum(x, 0.0) ** beta))

    @_elementwise
    def quantile(u):
        return (-np.log1p(-u)) ** (1.0 / beta)

    @_elementwise
    def isf(v):
        return (-np.log(v)) ** (1.0 / beta)

    @_elementwise
    def density(x):
        pos = x > 0
        xp = np.where(pos, x, 1.0)
        return np.where(pos, beta * xp ** (beta - 1) * np.exp(-(xp ** beta)), 0.0)

    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile,
                        sf=sf, isf=isf, density=density,
                        support=(0.0, math.inf), name=f"exp_power({beta:g})",
                        x_breaks=np.array([0.0]))


def pareto(beta: float) -> Distribution:
    """Density ``beta x^-(beta+1)`` on [1, inf); moments exist below ``beta``."""
    _check_positive(beta)

    @_elementwise
    def cdf(x):
        xp = np.maximum(x, 1.0)
        return -np.expm1(-beta * np.log(xp))

    @_elementwise
    def sf(x):
        return np.maximum(x, 1.0) ** (-beta)

    @_elementwise
    def quantile(u):
        return np.exp(-np.log1p(-u) / beta)

    @_elementwise
    def isf(v):
        return v ** (-1.0 / beta)

    @_elementwise
    def density(x):
        ok = x >= 1
        return np.where(ok, beta * np.where(ok, x, 1.0) ** (-beta - 1), 0.0)

    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile,
                        sf=sf, isf=isf, density=density,
                        support=(1.0, math.inf), moment_order=float(beta),
                        name=f"pareto({beta:g})", x_breaks=np.array([1.0]))


def gaussian(mean: float = 0.0, sd: float = 1.0) -> Distribution:
    """Normal law; the quantile inverts ``ndtr`` numerically (Newton from ``ndtri``)."""
    _check_positive(sd, "sd")

    def std_quantile(u):
        # ndtri seeds the root of ndtr(x) = u and Newton steps polish it; used
        # on the lower half only, where ndtr keeps full relative precision
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0) | (u >= 1)):
            raise ValueError("quantile level must lie in (0, 1)")
        x = special.ndtri(u)
        for _ in range(2):
            dens = np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = (special.ndtr(x) - u) / dens
            x = np.where(np.isfinite(step) & (dens > 0), x - step, x)
        return x

    @_elementwise
    def cdf(x):
        return special.ndtr((x - mean) / sd)

    @_elementwise
    def sf(x):
        return special.ndtr((mean - x) / sd)

    @_elementwise
    def quantile(u):
        # lower half directly, upper half by symmetry so 1 - u never rounds
        u = np.asarray(u, dtype=float)
        z = np.where(u <= 0.5, u, 1.0 - u)
        q = std_quantile(np.clip(z, 1e-320, 0.5))
        q = np.where(z > 0, q, -np.inf)
        q = np.where(z == 0.5, 0.0, q)
        return mean + sd * np.where(u <= 0.5, q, -q)

    @_elementwise
    def isf(v):
        return mean - sd * std_quantile(v)

    @_elementwise
    def density(x):
        z = (x - mean) / sd
        return np.exp(-0.5 * z * z) / (sd * math.sqrt(2 * math.pi))

    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile,
                        sf=sf, isf=isf, density=density,
                        support=(-math.inf, math.inf),
                        name="gaussian" if (mean, sd) == (0.0, 1.0)
                        else f"gaussian({mean:g},{sd:g})")


def atoms(points: Sequence[float], weights: Sequence[float]) -> Distribution:
    """Finitely supported law ``sum_k w_k delta_{p_k}`` with exact step functions."""
    p = np.asarray(points, dtype=float).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if p.size == 0 or p.size != w.size:
        raise ValueError("atoms need as many weights as points (at least one)")
    if np.any(w < 0) or not np.all(np.isfinite(p)):
        raise ValueError("atom weights must be nonnegative and points finite")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"atom weights sum to {w.sum()!r}, not 1")
    order = np.argsort(p, kind="stable")
    p, w = p[order], w[order]
    keep = w > 0
    p, w = p[keep], w[keep]
    pu, inv = np.unique(p, return_inverse=True)
    wu = np.bincount(inv, weights=w)
    cum = np.cumsum(wu)
    cum[-1] = 1.0
    # upper masses S_k = sum_{j>k} w_j, computed from the right
    above = np.concatenate([np.cumsum(wu[::-1])[::-1][1:], [0.0]])
    last = pu.size - 1

    @_elementwise
    def cdf(x):
        k = np.searchsorted(pu, x, side="right") - 1
        return np.where(k >= 0, cum[np.maximum(k, 0)], 0.0)

    @_elementwise
    def cdf_left(x):
        k = np.searchsorted(pu, x, side="left") - 1
        return np.where(k >= 0, cum[np.maximum(k, 0)], 0.0)

    @_elementwise
    def sf(x):
        k = np.searchsorted(pu, x, side="right") - 1
        return np.where(k >= 0, above[np.maximum(k, 0)], 1.0)

    @_elementwise
    def quantile(u):
        return pu[np.minimum(np.searchsorted(cum, u, side="left"), last)]

    @_elementwise
    def quantile_right(u):
        return pu[np.minimum(np.searchsorted(cum, u, side="right"), last)]

    rev = above[::-1]

    @_elementwise
    def isf(v):
        # smallest k with above[k] <= v; ``above`` is nonincreasing
        k = last - (np.searchsorted(rev, v, side="right") - 1)
        return pu[np.clip(k, 0, last)]

    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile_right,
                        sf=sf, isf=isf, cdf_left=cdf_left,
                        support=(float(pu[0]), float(pu[-1])),
                        name=f"atoms({','.join(f'{x:g}' for x in pu)})",
                        u_breaks=cum[:-1].copy(), x_breaks=pu.copy(), atomic=True)


def tabulated(x: Sequence[float], F: Sequence[float], name: str = "tabulated") -> Distribution:
    """Piecewise-linear CDF through the knots ``(x_k, F_k)``.

    ``F_0 > 0`` places an atom at ``x_0``; a repeated abscissa encodes a jump.
    The quantile is the exact generalized inverse, flat spots included.
    """
    xs = np.asarray(x, dtype=float).ravel()
    Fs = np.asarray(F, dtype=float).ravel()
    if xs.size < 1 or xs.size != Fs.size:
        raise ValueError("tabulated CDF needs matching x and F columns")
    if np.any(np.diff(xs) < 0):
        raise ValueError("tabulated abscissae must be ascending")
    if np.any(np.diff(Fs) < 0):
        raise ValueError("tabulated CDF must be nondecreasing")
    if Fs[0] < 0 or abs(Fs[-1] - 1.0) > 1e-12:
        raise ValueError("tabulated CDF must start >= 0 and end at 1")
    Fs = Fs.copy()
    Fs[-1] = 1.0
    last = xs.size - 1

    @_elementwise
    def cdf(y):
        # right-continuous: at a repeated abscissa take the last knot
        k = np.searchsorted(xs, y, side="right") - 1
        kk = np.clip(k, 0, last)
        nxt = np.minimum(kk + 1, last)
        dx = xs[nxt] - xs[kk]
        frac = np.divide(y - xs[kk], dx, out=np.zeros_like(y), where=dx > 0)
        val = Fs[kk] + frac * (Fs[nxt] - Fs[kk])
        val = np.where(k >= last, 1.0, val)
        return np.where(k < 0, 0.0, val)

    @_elementwise
    def cdf_left(y):
        k = np.searchsorted(xs, y, side="left") - 1
        kk = np.clip(k, 0, last)
        nxt = np.minimum(kk + 1, last)
        dx = xs[nxt] - xs[kk]
        frac = np.divide(y - xs[kk], dx, out=np.zeros_like(y), where=dx > 0)
        val = Fs[kk] + frac * (Fs[nxt] - Fs[kk])
        val = np.where(k >= last, 1.0, val)
        return np.where(k < 0, 0.0, val)

    def _inverse(u, side):
        k = np.searchsorted(Fs, u, side=side)
        k = np.minimum(k, last)
        prev = np.maximum(k - 1, 0)
        dF = Fs[k] - Fs[prev]
        frac = np.divide(u - Fs[prev], dF, out=np.ones_like(u), where=dF > 0)
        val = xs[prev] + frac * (xs[k] - xs[prev])
        return np.where(k == 0, xs[0], val)

    @_elementwise
    def quantile(u):
        return _inverse(u, "left")

    @_elementwise
    def quantile_right(u):
        return _inverse(u, "right")

    @_elementwise
    def sf(y):
        return 1.0 - np.asarray(cdf(y))

    @_elementwise
    def isf(v):
        return _inverse(1.0 - v, "left")

    @_elementwise
    def density(y):
        k = np.searchsorted(xs, y, side="right") - 1
        kk = np.clip(k, 0, last)
        nxt = np.minimum(kk + 1, last)
        dx = xs[nxt] - xs[kk]
        slope = np.divide(Fs[nxt] - Fs[kk], dx, out=np.zeros_like(y), where=dx > 0)
        return np.where((k < 0) | (k >= last), 0.0, slope)

    inner = Fs[(Fs > 0) & (Fs < 1)]
    lo = float(quantile_right(0.0))
    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile_right,
                        sf=sf, isf=isf, density=density, cdf_left=cdf_left,
                        support=(lo, float(xs[-1])), name=name,
                        u_breaks=np.unique(inner), x_breaks=np.unique(xs),
                        atomic=bool(np.all(np.diff(xs) == 0) if xs.size > 1 else True))


def load_tabulated(path) -> Distribution:
    """Read a two-column ``x,F(x)`` CSV (optional header row)."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except ValueError:
                if rows:
                    raise
                continue  # header
    if not rows:
        raise ValueError(f"no data rows in {path}")
    arr = np.array(rows)
    return tabulated(arr[:, 0], arr[:, 1], name=f"tabulated({Path(path).name})")


def mixture(weights: Sequence[float], components: Sequence[Distribution]) -> Distribution:
    """Convex combination; quantiles come from bisection on the mixed CDF."""
    w = np.asarray(weights, dtype=float).ravel()
    comps = list(components)
    if w.size != len(comps) or w.size == 0:
        raise ValueError("mixture needs one weight per component")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("mixture weights must be nonnegative and sum to 1")

    def _mix(attr):
        fns = [getattr(c, attr) for c in comps]

        @_elementwise
        def fn(x):
            return sum(wk * np.asarray(f(x)) for wk, f in zip(w, fns))
        return fn

    cdf = _mix("cdf")
    sf = _mix("sf")

    @_elementwise
    def cdf_left(x):
        return sum(wk * np.asarray(c.left_cdf(x)) for wk, c in zip(w, comps))

    lo = min(c.support[0] for c in comps)
    hi = max(c.support[1] for c in comps)
    shell = _Shell(cdf, sf, (lo, hi))

    @_elementwise
    def quantile(u):
        return invert_cdf(shell, u)

    @_elementwise
    def quantile_right(u):
        u = np.asarray(u, dtype=float)
        return np.where(u <= 0, lo, invert_cdf(shell, np.where(u <= 0, 0.5, u), right=True))

    @_elementwise
    def isf(v):
        return invert_cdf(shell, v, upper=True)

    dens = None
    if any(c.density is not None for c in comps):
        @_elementwise
        def dens(x):
            return sum(wk * np.asarray(c.density(x)) for wk, c in zip(w, comps)
                       if c.density is not None)

    xb = np.unique(np.concatenate([c.x_breaks for c in comps]))
    xb = xb[np.isfinite(xb)]
    ub = np.concatenate([np.asarray(cdf(xb)).ravel(), np.asarray(cdf_left(xb)).ravel()]) \
        if xb.size else np.empty(0)
    ub = np.unique(ub[(ub > 0) & (ub < 1)])
    return Distribution(cdf=cdf, quantile=quantile, quantile_right=quantile_right,
                        sf=sf, isf=isf, density=dens, cdf_left=cdf_left,
                        support=(lo, hi),
                        moment_order=min(c.moment_order for c in comps),
                        name="mixture(" + ",".join(c.name for c in comps) + ")",
                        u_breaks=ub, x_breaks=xb,
                        atomic=all(c.atomic for c in comps))


@dataclass(frozen=True)
class _Shell:
    cdf: Fn
    sf: Fn
    support: tuple[float, float]


def _check_positive(value, label="beta"):
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{label} must be a positive finite number, got {value!r}")


# ---------------------------------------------------------------------------
# family specs


@dataclass(frozen=True)
class FamilySpec:
    """A family tag plus its parameters, e.g. ``FamilySpec("pareto", {"beta": 3.0})``."""

    family: str
    params: dict = field(default_factory=dict)

    def to_text(self) -> str:
        parts = [f"family={self.family}"]
        for k, v in self.params.items():
            if isinstance(v, (list, tuple)):
                v = ",".join(f"{x!r}" if isinstance(x, float) else str(x) for x in v)
            parts.append(f"{k}={v}")
        return " ".join(parts)


_FAMILIES = {
    "uniform": lambda p: uniform(float(p.get("low", 0.0)), float(p.get("high", 1.0))),
    "beta_one": lambda p: beta_one(float(p["beta"])),
    "exp_power": lambda p: exp_power(float(p["beta"])),
    "pareto": lambda p: pareto(float(p["beta"])),
    "gaussian": lambda p: gaussian(float(p.get("mean", 0.0)), float(p.get("sd", 1.0))),
    "atoms": lambda p: atoms(_floats(p["points"]), _floats(p["weights"])),
    "tabulated": lambda p: load_tabulated(p["path"]),
}


def _floats(v) -> list[float]:
    if isinstance(v, str):
        return [float(s) for s in v.split(",") if s.strip()]
    if np.ndim(v) == 0:
        return [float(v)]
    return [float(s) for s in v]


def make_distribution(spec: FamilySpec | str) -> Distribution:
    """Build a :class:`Distribution` from a spec object or its text form."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    fam = spec.family
    p = dict(spec.params)
    if fam == "mixture":
        comps = p["components"]
        if isinstance(comps, str):
            comps = [_component(c) for c in comps.split(";") if c.strip()]
        comps = [make_distribution(c) if isinstance(c, (str, FamilySpec)) else c
                 for c in comps]
        return mixture(_floats(p["weights"]), comps)
    if fam not in _FAMILIES:
        raise ValueError(f"unknown family {fam!r}; expected one of "
                         f"{sorted(list(_FAMILIES) + ['mixture'])}")
    try:
        return _FAMILIES[fam](p)
    except KeyError as exc:
        raise ValueError(f"family {fam!r} is missing parameter {exc.args[0]!r}") from None


def _component(text: str) -> FamilySpec:
    # "gaussian:mean=2:sd=0.5" inside a mixture's components list
    head, *rest = text.strip().split(":")
    params = dict(item.split("=", 1) for item in rest)
    return FamilySpec(head, params)


def parse_spec(text: str) -> FamilySpec:
    """Parse the key-value form ``family=pareto beta=3.0``."""
    params = {}
    for token in shlex.split(text):
        if "=" not in token:
            raise ValueError(f"malformed token {token!r} in distribution spec")
        key, value = token.split("=", 1)
        params[key.strip()] = value.strip()
    if "family" not in params:
        raise ValueError("distribution spec needs family=<name>")
    fam = params.pop("family")
    return FamilySpec(fam, params)
