"""Convergence orders, limiting constants and tail diagnostics.

Everything here runs the error machinery over a range of N and reads off
asymptotic behaviour: fitted orders, the constant ``N e_N`` tends to, the
tail functionals that decide which orders are reachable, and a random
empirical-measure baseline for comparison.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from ._integrals import T_MIN, quantile_integral
from .distributions import Distribution
from .quantizer import MomentError, _check_rho, make_grid, optimal_grid
from .wasserstein import error_cdf_form, error_quantile_form, format_number

__all__ = [
    "SweepReport",
    "sweep",
    "fit_order",
    "limit_constant",
    "TailProfile",
    "tail_profile",
    "Verdict",
    "classify_order",
    "explicit_bound_constant",
    "MCResult",
    "mc_baseline",
    "extremal_growth",
    "resolve_threads",
]

# log-log slope above which a tail functional is read as growing without bound
SLOPE_TOL = 0.02
# decay rate in t = ln u below which a log-mapped integrand counts as non-integrable
DECAY_TOL = 0.01


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else ``WQ1D_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get("WQ1D_THREADS", "").strip()
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("thread count must be at least 1")
    return int(threads)


# ---------------------------------------------------------------------------
# sweeps


def fit_order(n_values, errors):
    """Least-squares slope of ln e_N against ln N on the largest half of points.

    Returns ``(order, log_intercept, used_mask)``; ``order`` is ``None`` when
    fewer than four finite positive errors are available.
    """
    n = np.asarray(n_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    good = np.isfinite(e) & (e > 0)
    idx = np.flatnonzero(good)
    used = np.zeros(e.size, dtype=bool)
    if idx.size < 4:
        return None, None, used
    top = idx[idx.size // 2:]
    used[top] = True
    slope, intercept = np.polyfit(np.log(n[top]), np.log(e[top]), 1)
    return float(-slope), float(intercept), used


@dataclass
class SweepReport:
    """e_N over a range of N with the fitted order and the scaled errors."""

    n_values: list
    errors: np.ndarray
    rho: float
    method: str
    dist_name: str = ""
    fitted_order: float | None = None
    fitted_intercept: float | None = None
    fitted_log_exponent: float | None = None
    track_alpha: float | None = None
    constant_track: np.ndarray = field(default_factory=lambda: np.empty(0))
    fit_mask: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))

    def __post_init__(self):
        self.errors = np.asarray(self.errors, dtype=float)
        if np.any(self.errors < 0):
            raise ValueError("errors must be nonnegative")
        order, intercept, used = fit_order(self.n_values, self.errors)
        self.fitted_order = order
        self.fitted_intercept = intercept
        self.fit_mask = used
        alpha = self.track_alpha if self.track_alpha is not None else order
        n = np.asarray(self.n_values, dtype=float)
        if alpha is None:
            self.constant_track = np.full(n.size, np.nan)
        else:
            self.constant_track = n ** alpha * self.errors

    @property
    def alpha_used(self):
        return self.track_alpha if self.track_alpha is not None else self.fitted_order

    def fit_log_exponent(self, alpha: float | None = None) -> float | None:
        """Fit gamma in ``e_N ~ c N^-alpha (ln N)^gamma`` with alpha held fixed.

        Uses the same top-half points as the order fit; N = 1 is excluded
        because ln ln N is undefined there.
        """
        alpha = self.alpha_used if alpha is None else alpha
        if alpha is None:
            return None
        n = np.asarray(self.n_values, dtype=float)
        sel = self.fit_mask & (n > 1)
        if np.count_nonzero(sel) < 2:
            return None
        y = np.log(self.errors[sel]) + alpha * np.log(n[sel])
        gamma, _ = np.polyfit(np.log(np.log(n[sel])), y, 1)
        self.fitted_log_exponent = float(gamma)
        return self.fitted_log_exponent

    def rows(self):
        alpha = self.alpha_used
        for n, e, c in zip(self.n_values, self.errors, self.constant_track):
            yield n, e, c, alpha

    def to_csv(self, path=None) -> str:
        """Columns ``N,e_N,N_alpha_eN,fitted_order``; inf written as "inf"."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "e_N", "N_alpha_eN", "fitted_order"])
        order = "" if self.fitted_order is None else format_number(self.fitted_order)
        for n, e, c, _ in self.rows():
            w.writerow([n, format_number(e),
                        "" if not np.isfinite(c) and not np.isinf(e) else format_number(c),
                        order])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_dict(self) -> dict:
        opt = lambda v: None if v is None else format_number(v)  # noqa: E731
        return {
            "dist": self.dist_name,
            "rho": format_number(self.rho),
            "method": self.method,
            "n_values": [int(n) for n in self.n_values],
            "errors": [format_number(e) for e in self.errors],
            "fitted_order": opt(self.fitted_order),
            "fitted_log_exponent": opt(self.fitted_log_exponent),
            "track_alpha": opt(self.alpha_used),
            "constant_track": [None if np.isnan(c) else format_number(c)
                               for c in self.constant_track],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _one_error(dist, n, rho, method, tol, alpha, lam, inner, formula):
    if not dist.has_moment(rho):
        return math.inf
    try:
        grid = make_grid(dist, n, rho, method, alpha=alpha, lam=lam, inner=inner)
    except MomentError:
        return math.inf
    fn = error_cdf_form if formula == "cdf_form" else error_quantile_form
    return fn(dist, grid, rho, tol=tol).value


def sweep(dist: Distribution, rho: float, n_values: Sequence[int], method: str = "optimal",
          tol: float = 1e-11, alpha: float | None = None, lam: float | None = None,
          inner: str = "midpoint", formula: str = "quantile_form",
          track_alpha: float | None = None, log_exponent: bool = False,
          threads: int | None = None) -> SweepReport:
    """Evaluate e_N for every N and fit the decay order.

    ``alpha``/``lam``/``inner`` parametrize the tail-modified grids;
    ``track_alpha`` fixes the exponent used for ``constant_track`` (default:
    the fitted order). Entries run in parallel on ``threads`` workers and are
    assembled in N order, so the report does not depend on scheduling.
    """
    rho = _check_rho(rho)
    ns = [int(n) for n in n_values]
    if any(n < 1 for n in ns) or ns != sorted(ns):
        raise ValueError("n_values must be ascending positive integers")
    workers = resolve_threads(threads)

    def job(n):
        return _one_error(dist, n, rho, method, tol, alpha, lam, inner, formula)

    if workers == 1:
        errors = [job(n) for n in ns]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(job, ns))
    rep = SweepReport(ns, np.array(errors), rho, method, dist.name, track_alpha=track_alpha)
    if log_exponent:
        rep.fit_log_exponent()
    return rep


# ---------------------------------------------------------------------------
# limiting constant


def _log_mapped(dist, t, upper, fn):
    """Evaluate ``fn(F^-1(u)) * u`` at ``u = e^t`` (or ``1 - u = e^t``)."""
    u = np.exp(t)
    q = dist.isf(u) if upper else dist.quantile(u)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return np.asarray(fn(np.asarray(q)), dtype=float) * u, np.asarray(q)


def _usable_depth(dist, upper, fn):
    """Deepest t on a coarse grid where the mapped integrand is still resolvable.

    Past that point the quantile has collapsed onto the support edge in
    floating point and the integrand reads as 0 or inf for no real reason.
    """
    lo, hi = dist.support
    edge = hi if upper else lo
    ts = np.arange(math.log(0.5) - 1.0, T_MIN - 1, -10.0)
    vals, qs = _log_mapped(dist, ts, upper, fn)
    ok = np.isfinite(vals) & (vals > 0) & (qs != edge) & np.isfinite(qs)
    if not ok[0]:
        return None, None
    bad = np.flatnonzero(~ok)
    last = ts.size - 1 if bad.size == 0 else bad[0] - 1
    return float(ts[last]), float(ts[max(last - 5, 0)])


def limit_constant(dist: Distribution, rho: float, tol: float = 1e-10) -> float:
    """``(2 (rho+1)^(1/rho))^-1 (int_0^1 f(F^-1(u))^-rho du)^(1/rho)``.

    The level integral equals ``int 1{0<F<1} f^(1-rho) dx``. It is evaluated
    with log maps at both ends; divergence is declared when the mapped
    integrand stops decaying (rate below 0.01 per unit of ln u) at the deepest
    resolvable depth, and ``inf`` is returned.
    """
    rho = _check_rho(rho)
    if dist.density is None:
        raise ValueError(f"{dist.name} has no density; the limiting constant needs one")
    integral = _density_power_integral(dist, rho, tol)
    if math.isinf(integral):
        return math.inf
    return integral ** (1 / rho) / (2 * (rho + 1) ** (1 / rho))


def _density_power_integral(dist, rho, tol=1e-10):
    dens = dist.density

    def fn(q):
        f = np.asarray(dens(q), dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(f > 0, f ** (-rho), np.inf)

    total = 0.0
    for upper, (a, b) in ((False, (0.0, 0.5)), (True, (0.5, 1.0))):
        t_deep, t_ref = _usable_depth(dist, upper, fn)
        if t_deep is None:
            return math.inf
        v_deep = _log_mapped(dist, np.array([t_deep]), upper, fn)[0][0]
        v_ref = _log_mapped(dist, np.array([t_ref]), upper, fn)[0][0]
        rate = (math.log(v_ref) - math.log(v_deep)) / (t_ref - t_deep) if t_ref != t_deep else 0.0
        if rate <= DECAY_TOL:
            return math.inf
        res = quantile_integral(dist, [a], [b], lambda q, k: fn(q), rtol=tol,
                                t_min=t_deep, warn=False)
        if not np.all(np.isfinite(res.value)):
            return math.inf
        # geometric remainder below the truncation depth
        total += float(res.value[0]) + v_deep / rate
    return total


# ---------------------------------------------------------------------------
# tail functionals


@dataclass
class TailProfile:
    """Probe-grid estimates of the two tail functionals at exponent ``beta``.

    ``sup_x`` is over ``x^beta (F(-x) + 1 - F(x))``, ``sup_u`` over
    ``u^(1/beta) (F^-1(1-u) - F^-1(u))``. Sups over a grid never exceed the
    true sup. ``slope_x``/``slope_u`` are far-tail log-log growth rates, both
    in x-exponent units, and decide the ``finite_*`` verdicts.
    """

    beta: float
    sup_x: float
    sup_u: float
    limit_x: float
    sup_x_left: float
    sup_x_right: float
    slope_x: float
    slope_u: float
    finite_x: bool
    finite_u: bool
    x_grid: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    g_x: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    u_grid: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    g_u: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))

    def summary(self) -> dict:
        keys = ("beta", "sup_x", "sup_u", "limit_x", "sup_x_left", "sup_x_right",
                "slope_x", "slope_u")
        out = {k: format_number(getattr(self, k)) for k in keys}
        out["finite_x"] = bool(self.finite_x)
        out["finite_u"] = bool(self.finite_u)
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary())

    def to_csv(self, path=None) -> str:
        s = self.summary()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(s))
        w.writerow([str(v).lower() if isinstance(v, bool) else v for v in s.values()])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _refine_max(fn, s, vals):
    """Golden-section polish of a grid maximum of ``fn(exp(s))``."""
    j = int(np.argmax(vals))
    best = float(vals[j])
    if not math.isfinite(best) or j == 0 or j == s.size - 1:
        return best
    if not (vals[j] > vals[j - 1] and vals[j] > vals[j + 1]):
        return best
    try:
        smin = optimize.golden(lambda z: -float(fn(np.exp(z))),
                               brack=(s[j - 1], s[j], s[j + 1]), tol=1e-10)
        return max(best, float(fn(np.exp(smin))))
    except (ValueError, RuntimeError):
        return best


def _loglog_slope(x, g):
    """Slope of ln g against ln x over the samples with g > 0."""
    ok = np.isfinite(g) & (g > 0)
    if np.count_nonzero(ok) < 2:
        return -math.inf if np.all(g[np.isfinite(g)] == 0) else math.inf
    if np.any(np.isinf(g)):
        return math.inf
    return float(np.polyfit(np.log(x[ok]), np.log(g[ok]), 1)[0])


def _tail_slope(logx, g, per_decade):
    """Far-tail log-log slope, ``logx``/``g`` ordered towards the tail.

    Slopes are read on each of the last three decades. A functional that
    creeps up to a finite limit (``1 - c x^-d``) shows slopes shrinking by a
    constant ratio; those are extrapolated to their limit (Aitken).
    Otherwise the outermost decade's slope is returned.
    """
    k = per_decade
    s = [_loglog_slope(np.exp(logx[-(j + 1) * k - 1:g.size - j * k]),
                       g[-(j + 1) * k - 1:g.size - j * k]) for j in (2, 1, 0)]
    s1, s2, s3 = s
    if not all(math.isfinite(v) for v in s):
        return s3
    d1, d2 = s2 - s1, s3 - s2
    if d1 < 0 and d2 < 0 and s3 > 0:
        r = d2 / d1
        if 0 < r < 1:
            return max(s3 + d2 * r / (1 - r), 0.0)
    return s3


def tail_profile(dist: Distribution, beta: float, decades: int = 12,
                 per_decade: int = 512) -> TailProfile:
    """Evaluate both tail functionals on logarithmic probe grids.

    The x grid spans ``decades`` decades below
    ``x_hi = 10 max(1, |F^-1(1e-12)|, |F^-1(1 - 1e-12)|)``; the u grid runs
    from ``10^-decades`` to 1/2. ``limit_x`` is the largest value over the
    last decade of the x grid. Far-tail slopes are read over three decades:
    the last three of the x grid, and on the u side the three decades above
    the tail mass beyond ``x_hi`` (at least 1e-300).
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    depth = 10.0 ** -decades
    scale = max(1.0, abs(float(dist.quantile(depth))), abs(float(dist.isf(depth))))
    x_hi = 10.0 * scale
    npts = decades * per_decade + 1
    sx = np.linspace(math.log(x_hi) - decades * math.log(10), math.log(x_hi), npts)
    x = np.exp(sx)

    def left(x):
        return np.asarray(x, dtype=float) ** beta * np.asarray(dist.cdf(-np.asarray(x)))

    def right(x):
        return np.asarray(x, dtype=float) ** beta * np.asarray(dist.sf(x))

    def both(x):
        return left(x) + right(x)

    gl, gr = left(x), right(x)
    gx = gl + gr
    sup_x = _refine_max(both, sx, gx)
    sup_l = _refine_max(left, sx, gl)
    sup_r = _refine_max(right, sx, gr)
    last = sx >= sx[-1] - math.log(10) - 1e-12
    limit_x = float(np.max(gx[last]))
    slope_x = _tail_slope(sx, gx, per_decade)

    su = np.linspace(math.log(depth), math.log(0.5), npts)
    u = np.exp(su)

    def gfun(u):
        u = np.asarray(u, dtype=float)
        return u ** (1 / beta) * (np.asarray(dist.isf(u)) - np.asarray(dist.quantile(u)))

    gu = gfun(u)
    sup_u = _refine_max(gfun, su, gu)
    # growth as u -> 0 of u^(1/beta) * spread, read at the tail mass beyond
    # x_hi so both functionals are judged at the same depth, then converted
    # to x-exponent units
    mass_hi = float(dist.cdf(-x_hi)) + float(dist.sf(x_hi))
    u_tail = min(max(mass_hi, 1e-300), depth)
    st_ = np.linspace(math.log(u_tail) + 3 * math.log(10), math.log(u_tail),
                      3 * per_decade + 1)
    gt = gfun(np.exp(st_))
    sup_u = max(sup_u, float(np.max(gt)))
    grow = _tail_slope(-st_, gt, per_decade)
    inv = 1 / beta + grow
    slope_u = beta - 1 / inv if inv > 1e-9 else -math.inf

    return TailProfile(
        beta=float(beta), sup_x=sup_x, sup_u=sup_u, limit_x=limit_x,
        sup_x_left=sup_l, sup_x_right=sup_r, slope_x=slope_x, slope_u=slope_u,
        finite_x=bool(math.isfinite(sup_x) and slope_x <= SLOPE_TOL),
        finite_u=bool(math.isfinite(sup_u) and slope_u <= SLOPE_TOL),
        x_grid=x, g_x=gx, u_grid=u, g_u=gu)


# ---------------------------------------------------------------------------
# classification of reachable orders


@dataclass
class Check:
    name: str
    holds: bool | None
    role: str  # "necessary", "sufficient" or "necessary and sufficient"
    detail: str = ""


@dataclass
class Verdict:
    """Which conditions were checked for order ``alpha`` and what they imply.

    ``conclusion`` is ``"bounded"`` (sup_N N^alpha e_N < inf is guaranteed),
    ``"unbounded"`` (a necessary condition fails) or ``"undetermined"``.
    """

    rho: float
    alpha: float
    regime: str
    checks: list
    conclusion: str
    message: str

    def fired(self) -> Check | None:
        for c in self.checks:
            if c.holds is not None:
                if (self.conclusion == "bounded" and c.holds and "sufficient" in c.role) or \
                   (self.conclusion == "unbounded" and not c.holds and "necessary" in c.role):
                    return c
        return None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rho"] = format_number(self.rho)
        d["alpha"] = format_number(self.alpha)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _bounded_support(dist) -> bool:
    lo, hi = dist.support
    return math.isfinite(lo) and math.isfinite(hi)


def _quantile_jumps(dist) -> bool:
    lv = np.asarray(dist.u_breaks, dtype=float)
    lv = lv[(lv > 0) & (lv < 1)]
    if lv.size == 0:
        return False
    gap = np.asarray(dist.quantile_right(lv)) - np.asarray(dist.quantile(lv))
    return bool(np.any(gap > 0))


def _cdf_jumps(dist) -> bool:
    xb = np.asarray(dist.x_breaks, dtype=float)
    if dist.atomic:
        return True
    if dist.cdf_left is None or xb.size == 0:
        return False
    return bool(np.any(np.asarray(dist.cdf(xb)) > np.asarray(dist.left_cdf(xb))))


def exponential_tail_lambda(dist: Distribution, powers=range(-10, 5)) -> float | None:
    """Some ``lam = 2^k`` with ``F(-x) + 1 - F(x) <= e^(-lam x)/lam`` on the probe grid.

    The comparison is made in log space on x in ``[0, 800/lam]`` so that
    underflow on either side cannot fake a pass. Returns ``None`` if no
    candidate passes everywhere.
    """
    for k in powers:
        lam = 2.0 ** k
        x = np.concatenate([np.linspace(0.0, 800.0 / lam, 8001),
                            np.geomspace(1e-8, 800.0 / lam, 2001)])
        mass = np.asarray(dist.cdf(-x)) + np.asarray(dist.sf(x))
        with np.errstate(divide="ignore"):
            lhs = np.log(mass)
        rhs = -lam * x - math.log(lam)
        if np.all(lhs <= rhs + 1e-12):
            return lam
    return None


def _row_below(dist, rho, alpha):
    beta = rho / (1 - alpha * rho)
    tp = tail_profile(dist, beta)
    return [Check(f"sup_x x^{beta:g} (F(-x) + 1 - F(x)) finite", tp.finite_x,
                  "necessary and sufficient",
                  f"probe sup {tp.sup_x:.6g}, far-tail slope {tp.slope_x:.4g}")]


def _row_critical(dist):
    lam = exponential_tail_lambda(dist)
    return [
        Check("exponential tail F(-x) + 1 - F(x) <= exp(-lam x)/lam", lam is not None,
              "necessary", "no lam in 2^-10..2^4 passes" if lam is None else f"lam = {lam:g}"),
        Check("bounded support", _bounded_support(dist), "sufficient", str(dist.support)),
    ]


def _row_between(dist):
    return [
        Check("bounded support", _bounded_support(dist), "necessary", str(dist.support)),
        Check("F^-1 continuous", not _quantile_jumps(dist), "necessary"),
        Check("modulus of continuity of F^-1", None, "sufficient", "not checked"),
    ]


def _row_one(dist, rho):
    if dist.density is None:
        integral = 0.0 if dist.atomic else math.inf
    else:
        integral = _density_power_integral(dist, rho)
    finite = math.isfinite(integral)
    positive = (dist.density is not None and not _cdf_jumps(dist)
                and not _quantile_jumps(dist) and _density_positive(dist))
    return [
        Check("int 1{f>0} f^(1-rho) dx finite", finite, "necessary",
              f"integral {integral:.6g}"),
        Check("f > 0 a.e. on {0 < F < 1} and int 1{f>0} f^(1-rho) dx finite",
              positive and finite, "sufficient"),
    ]


def classify_order(dist: Distribution, rho: float, alpha: float) -> Verdict:
    """Check the conditions that decide whether ``sup_N N^alpha e_N`` is finite.

    Every row of the order table that applies to ``(rho, alpha)`` is
    evaluated (at rho = 1, alpha = 1 two rows coincide). The conclusion is
    ``"unbounded"`` if a necessary condition fails, ``"bounded"`` if a
    sufficient one holds, ``"undetermined"`` otherwise.
    """
    rho = _check_rho(rho)
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    crit = 1 / rho
    at_crit = math.isclose(alpha, crit, rel_tol=1e-12, abs_tol=1e-15)
    at_one = math.isclose(alpha, 1.0, rel_tol=0, abs_tol=1e-15)
    checks: list[Check] = []
    regimes = []
    if alpha < crit and not at_crit:
        regimes.append("alpha < 1/rho")
        checks += _row_below(dist, rho, alpha)
    if at_crit:
        regimes.append("alpha = 1/rho")
        checks += _row_critical(dist)
    if crit < alpha < 1 and not at_crit and not at_one:
        regimes.append("1/rho < alpha < 1")
        checks += _row_between(dist)
    if at_one:
        regimes.append("alpha = 1")
        checks += _row_one(dist, rho)

    failed = [c for c in checks if "necessary" in c.role and c.holds is False]
    passed = [c for c in checks if "sufficient" in c.role and c.holds]
    a = f"{alpha:g}"
    if failed:
        conclusion = "unbounded"
        msg = f"necessary condition violated, not [{failed[0].name}]: N^{a} e_N is unbounded"
    elif passed:
        conclusion = "bounded"
        msg = f"sufficient condition met, [{passed[0].name}]: sup_N N^{a} e_N < inf"
        if regimes == ["alpha < 1/rho"]:
            msg += " and N^alpha e_N -> 0"
    else:
        conclusion = "undetermined"
        msg = "necessary conditions hold but no checked sufficient condition does"
    return Verdict(rho, alpha, " and ".join(regimes), checks, conclusion, msg)


def _density_positive(dist, npts=4001) -> bool:
    u = (np.arange(npts) + 0.5) / npts
    q = np.where(u <= 0.5, dist.quantile(np.minimum(u, 0.5)),
                 dist.isf(np.minimum(1 - u, 0.5)))
    return bool(np.all(np.asarray(dist.density(q)) > 0))


# ---------------------------------------------------------------------------
# explicit ceiling


def explicit_bound_constant(dist: Distribution, rho: float, alpha: float,
                            profile: TailProfile | None = None) -> float:
    """Ceiling for ``sup_N N^(alpha rho) e_N^rho`` from the tail constant C.

    ``B = 2^rho C^(1-alpha rho) + (1-alpha rho)/(alpha rho) C + 1 + 2^(rho-1)
    + 2^(rho+alpha rho-2) |F^-1(1/2)|^rho`` with
    ``C = sup_x x^(rho/(1-alpha rho)) (F(-x) + 1 - F(x))`` taken from the
    probe grid; ``inf`` when that sup is infinite.
    """
    rho = _check_rho(rho)
    if not 0 < alpha < 1 / rho:
        raise ValueError("the explicit bound needs 0 < alpha < 1/rho")
    ar = alpha * rho
    tp = profile if profile is not None else tail_profile(dist, rho / (1 - ar))
    if not tp.finite_x:
        return math.inf
    C = tp.sup_x
    med = abs(dist.median)
    return (2 ** rho * C ** (1 - ar) + (1 - ar) / ar * C + 1 + 2 ** (rho - 1)
            + 2 ** (rho + ar - 2) * med ** rho)


# ---------------------------------------------------------------------------
# Monte Carlo baseline


@dataclass
class MCResult:
    mean: float
    std: float
    values: np.ndarray
    n: int
    reps: int
    seed: int
    rho: float

    def to_dict(self) -> dict:
        return {"mean": format_number(self.mean), "std": format_number(self.std),
                "n": self.n, "reps": self.reps, "seed": self.seed,
                "rho": format_number(self.rho)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _sample(dist, n, seed, rep):
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, rep], dtype=np.uint64)))
    # centres of 2^-53 bins: strictly inside (0, 1)
    k = rng.integers(0, 2 ** 53, size=n, dtype=np.int64)
    u = (k + 0.5) * 2.0 ** -53
    v = 1.0 - u
    x = np.where(u <= 0.5, dist.quantile(np.minimum(u, 0.5)), dist.isf(np.minimum(v, 0.5)))
    return np.sort(x)


def mc_baseline(dist: Distribution, rho: float, n: int, reps: int = 100, seed: int = 0,
                threads: int | None = None, tol: float = 1e-10) -> MCResult:
    """Mean W_rho error of the empirical measure of ``n`` i.i.d. draws.

    Draw ``rep`` uses a Philox stream keyed by ``(seed, rep)``, so results
    are reproducible and independent of the worker count.
    """
    rho = _check_rho(rho)
    if reps < 1 or n < 1:
        raise ValueError("need n >= 1 and reps >= 1")
    if not dist.has_moment(rho):
        return MCResult(math.inf, math.nan, np.full(reps, math.inf), n, reps, seed, rho)

    def job(rep):
        x = _sample(dist, n, seed, rep)
        return error_quantile_form(dist, x, rho, tol=tol).value

    workers = resolve_threads(threads)
    if workers == 1:
        vals = [job(r) for r in range(reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(job, range(reps)))
    vals = np.array(vals)
    return MCResult(float(math.fsum(vals) / reps), float(np.std(vals)), vals, n, reps, seed, rho)


# ---------------------------------------------------------------------------
# extremal points


def extremal_growth(dist: Distribution, rho: float, alpha: float,
                    n_values: Sequence[int], tol: float = 1e-12) -> np.ndarray:
    """``N^(alpha - 1/rho) max(x_N, -x_1)`` along optimal grids.

    When the tail sup at exponent ``1/(1/rho - alpha)`` is finite this stays
    bounded in N.
    """
    rho = _check_rho(rho)
    out = []
    for n in n_values:
        g = optimal_grid(dist, int(n), rho, tol)
        ext = max(g.points[-1], -g.points[0])
        out.append(n ** (alpha - 1 / rho) * ext)
    return np.array(out)
