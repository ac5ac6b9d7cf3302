"""Cellwise integrals in quantile space and in x space.

Both helpers take a batch of tasks and a vectorized integrand and return one
integral per task. They take care of the parts that make these integrals
awkward for a general-purpose integrator:

* levels close to 0 or 1 are mapped logarithmically (``u = e^t`` at the
  bottom, ``1 - u = e^t`` at the top, read through ``isf``), so the endpoint
  singularities of unbounded quantile functions become smooth decays;
* levels above one half are carried as upper masses ``v = 1 - u`` so that
  ``F^-1`` near 1 keeps its precision;
* pieces are split at the quantile jumps of the law and at a per-task kink;
* infinite x ranges are mapped by ``y = c +/- T (e^s - 1)``.
"""

from __future__ import annotations

import math

import numpy as np

from ._quad import BatchResult, integrate_batch

# e^-700 ~ 1e-304: anything below carries no mass for laws with the moments
# we integrate against.
T_MIN = -700.0
# x-space substitution reaches out to 1e100 scale units
S_MAX = math.log1p(1e100)

_PLAIN, _UPPER, _LOG_LO, _LOG_UP = 0, 1, 2, 3


def _segments(a, b, t_min=T_MIN):
    """Split level intervals [a_k, b_k] into coordinate-typed segments."""
    task, kind, lo, hi = [], [], [], []

    def add(mask, k, l, h):
        idx = np.flatnonzero(mask)
        if idx.size:
            task.append(idx)
            kind.append(np.full(idx.size, k))
            lo.append(np.broadcast_to(l, a.shape)[idx])
            hi.append(np.broadcast_to(h, a.shape)[idx])

    nonempty = b > a
    bot = nonempty & (a <= 0)
    top = nonempty & (b >= 1)
    low_half = b <= 0.5
    high_half = a >= 0.5
    with np.errstate(divide="ignore"):
        lnb = np.log(np.where(b > 0, b, 1.0))
        ln1a = np.log(np.where(a < 1, 1.0 - a, 1.0))
    ln_half = math.log(0.5)

    # cells touching 0
    add(bot & low_half, _LOG_LO, t_min, lnb)
    add(bot & ~low_half, _LOG_LO, t_min, ln_half)
    add(bot & ~low_half & ~top, _UPPER, 1.0 - b, 0.5)
    # cells touching 1
    add(top & high_half & ~bot, _LOG_UP, t_min, ln1a)
    add(top & ~high_half, _LOG_UP, t_min, ln_half)
    add(top & ~high_half & ~bot, _PLAIN, a, 0.5)
    # interior cells
    inner = nonempty & ~bot & ~top
    add(inner & ~high_half, _PLAIN, a, b)
    add(inner & high_half, _UPPER, 1.0 - b, 1.0 - a)
    if not task:
        e = np.empty(0)
        return e.astype(int), e.astype(int), e, e
    return (np.concatenate(task), np.concatenate(kind),
            np.concatenate(lo), np.concatenate(hi))


def _cut_levels(kind, lo, hi, levels_lo, levels_up):
    """Pairs (segment, cut) for every level strictly inside a segment.

    ``levels_lo`` are sorted lower levels u, ``levels_up`` the matching upper
    masses 1 - u in ascending order; each is mapped to the segment's coordinate.
    """
    segs, cuts = [], []
    tables = {
        _PLAIN: levels_lo,
        _UPPER: levels_up,
        _LOG_LO: np.log(levels_lo[levels_lo > 0]),
        _LOG_UP: np.log(levels_up[levels_up > 0]),
    }
    for k, table in tables.items():
        if table.size == 0:
            continue
        sel = np.flatnonzero(kind == k)
        if sel.size == 0:
            continue
        i0 = np.searchsorted(table, lo[sel], side="right")
        i1 = np.searchsorted(table, hi[sel], side="left")
        cnt = np.maximum(i1 - i0, 0)
        if cnt.sum() == 0:
            continue
        seg = np.repeat(sel, cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        segs.append(seg)
        cuts.append(table[np.repeat(i0, cnt) + offs])
    return segs, cuts


def _subdivide(lo, hi, segs, cuts):
    """Turn segments plus interior cut points into elementary intervals."""
    nseg = lo.size
    all_seg = np.concatenate([np.arange(nseg), np.arange(nseg)] + segs)
    all_pt = np.concatenate([lo, hi] + cuts)
    order = np.lexsort((all_pt, all_seg))
    s_seg, s_pt = all_seg[order], all_pt[order]
    same = s_seg[1:] == s_seg[:-1]
    left, right, owner = s_pt[:-1][same], s_pt[1:][same], s_seg[:-1][same]
    keep = right > left
    return left[keep], right[keep], owner[keep]


def quantile_integral(dist, a, b, g, kink_x=None, rtol=1e-11, atol=0.0,
                      warn=True, t_min=T_MIN) -> BatchResult:
    """Integrate ``g(F^-1(u), k)`` over ``u`` in ``[a_k, b_k]`` for each task.

    ``g`` receives quantile values and task indices as flat arrays. When
    ``kink_x`` is given, each task's interval is also split at the level
    where ``F^-1`` crosses ``kink_x[k]``. Levels within ``e^t_min`` of 0 or 1
    are dropped.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    m = a.size
    task, kind, lo, hi = _segments(a, b, t_min)

    levels = np.asarray(dist.u_breaks, dtype=float)
    levels = np.sort(levels[(levels > 0) & (levels < 1)])
    segs, cuts = _cut_levels(kind, lo, hi, levels, np.sort(1.0 - levels))

    if kink_x is not None:
        kx = np.broadcast_to(np.asarray(kink_x, dtype=float), (m,))[task]
        F = np.asarray(dist.cdf(kx), dtype=float)
        S = np.asarray(dist.sf(kx), dtype=float)
        with np.errstate(divide="ignore"):
            lvl = np.select(
                [kind == _PLAIN, kind == _UPPER, kind == _LOG_LO],
                [F, S, np.log(F)], np.log(S))
        inside = (lvl > lo) & (lvl < hi)
        segs.append(np.flatnonzero(inside))
        cuts.append(lvl[inside])

    left, right, owner = _subdivide(lo, hi, segs, cuts)
    p_kind = kind[owner]
    p_task = task[owner]

    def integrand(t, k):
        kd = p_kind[k]
        tk = p_task[k]
        q = np.empty_like(t)
        w = np.ones_like(t)
        for code, use_upper, use_log in ((_PLAIN, False, False), (_UPPER, True, False),
                                         (_LOG_LO, False, True), (_LOG_UP, True, True)):
            sel = kd == code
            if not sel.any():
                continue
            arg = np.exp(t[sel]) if use_log else t[sel]
            if use_log:
                w[sel] = arg
            q[sel] = dist.isf(arg) if use_upper else dist.quantile(arg)
        with np.errstate(invalid="ignore", over="ignore"):
            val = np.asarray(g(q, tk), dtype=float) * w
        return np.where(w == 0, 0.0, val)

    res = integrate_batch(integrand, left, right, rtol=rtol, atol=atol, group=p_task,
                          warn=warn)
    value = np.bincount(p_task, weights=res.value, minlength=m)
    abserr = np.bincount(p_task, weights=res.abserr, minlength=m)
    conv = np.ones(m, dtype=bool)
    conv[p_task[~res.converged]] = False
    return BatchResult(value, abserr, conv)


def x_integral(dist, lo, hi, h, cuts=None, rtol=1e-11, atol=0.0,
               warn=True) -> BatchResult:
    """Integrate ``h(y, k)`` over ``y`` in ``[lo_k, hi_k]`` for each task.

    Ranges may be infinite. Every range is split at the law's ``x_breaks``
    and at the optional per-task ``cuts`` (an ``(m, c)`` array; NaN entries
    are ignored). ``h`` must return 0 wherever the law puts no mass beyond
    ``y`` so the far end of an infinite range does not produce ``inf * 0``.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    lo, hi = np.broadcast_arrays(lo, hi)
    m = lo.size
    ok = hi > lo
    # fully infinite ranges get an interior anchor
    both = ok & np.isneginf(lo) & np.isposinf(hi)
    extra = np.full(m, np.nan)
    extra[both] = dist.median

    segs, pts = [], []
    xb = np.asarray(dist.x_breaks, dtype=float)
    xb = np.sort(xb[np.isfinite(xb)])
    if xb.size:
        sel = np.flatnonzero(ok)
        i0 = np.searchsorted(xb, lo[sel], side="right")
        i1 = np.searchsorted(xb, hi[sel], side="left")
        cnt = np.maximum(i1 - i0, 0)
        if cnt.sum():
            offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            segs.append(np.repeat(sel, cnt))
            pts.append(xb[np.repeat(i0, cnt) + offs])
    c_all = extra[:, None] if cuts is None else np.column_stack(
        [extra, np.asarray(cuts, dtype=float).reshape(m, -1)])
    rows, cols = np.nonzero(np.isfinite(c_all) & ok[:, None])
    val = c_all[rows, cols]
    inside = (val > lo[rows]) & (val < hi[rows])
    segs.append(rows[inside])
    pts.append(val[inside])

    idx = np.flatnonzero(ok)
    left, right, owner = _subdivide(lo[idx], hi[idx], [np.searchsorted(idx, s) for s in segs], pts)
    owner = idx[owner]

    # pieces with an infinite end are rewritten in the s variable
    scale = dist.scale
    down = np.isneginf(left)   # (-inf, right]: y = right - T(e^s - 1)
    up = np.isposinf(right)    # [left, inf):  y = left + T(e^s - 1)
    anchor = np.where(down, right, left)
    A = np.where(down | up, 0.0, left)
    B = np.where(down | up, S_MAX, right)
    sign = np.where(down, -1.0, 1.0)
    mapped = down | up

    def integrand(t, k):
        mp = mapped[k]
        y = t.copy()
        w = np.ones_like(t)
        if mp.any():
            grow = scale * np.expm1(t[mp])
            y[mp] = anchor[k][mp] + sign[k][mp] * grow
            w[mp] = scale * np.exp(t[mp])
        with np.errstate(invalid="ignore", over="ignore"):
            v = np.asarray(h(y, owner[k]), dtype=float)
            out = v * w
        return np.where(v == 0, 0.0, out)

    res = integrate_batch(integrand, A, B, rtol=rtol, atol=atol, group=owner, warn=warn)
    value = np.bincount(owner, weights=res.value, minlength=m)
    abserr = np.bincount(owner, weights=res.abserr, minlength=m)
    conv = np.ones(m, dtype=bool)
    conv[owner[~res.converged]] = False
    return BatchResult(value, abserr, conv)
