"""Command-line front end: ``wq1d <subcommand> [options]``.

Options may come from a JSON file given with ``--config``; flags on the
command line override it. Keys in the file use the long flag names with
underscores (``dist``, ``rho``, ``n``, ``n_values``, ``method``, ...).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .distributions import make_distribution
from .quantizer import METHODS, MomentError, make_grid
from .rates import classify_order, mc_baseline, resolve_threads, sweep, tail_profile
from .wasserstein import (ErrorResult, error_cdf_form, error_quantile_form, error_w1_closed,
                          format_number)

FORMULAS = ("quantile_form", "cdf_form", "w1_closed")

# defaults applied after merging config and flags
DEFAULTS = {
    "rho": 1.0,
    "method": "optimal",
    "inner": "midpoint",
    "tol": 1e-11,
    "formula": "quantile_form",
    "seed": 0,
    "reps": 100,
    "beta": None,
    "alpha": None,
    "lam": None,
    "threads": None,
    "output": None,
    "format": None,
}

DEFAULT_FORMAT = {"quantize": "csv", "error": "json", "sweep": "csv", "tails": "json",
                  "classify": "json", "baseline": "json", "verify": "text"}


class UsageError(ValueError):
    pass


def parse_n(text) -> list[int]:
    """``"16..1024"`` -> powers of two 16, 32, ..., 1024; ``"3,5,9"`` -> a list."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    if isinstance(text, int):
        return [text]
    text = str(text).strip()
    if ".." in text:
        a, b = (int(s) for s in text.split("..", 1))
        if a < 1 or b < a:
            raise UsageError(f"bad N range {text!r}")
        k = math.ceil(math.log2(a) - 1e-12)
        out = []
        while 2 ** k <= b:
            if 2 ** k >= a:
                out.append(2 ** k)
            k += 1
        if not out:
            raise UsageError(f"N range {text!r} contains no power of two")
        return out
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad N value {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default options")
    common.add_argument("--dist", help='distribution spec, e.g. "family=pareto beta=4"')
    common.add_argument("--rho", type=float, help="Wasserstein order (>= 1)")
    common.add_argument("--n", help="N, or N values: 'a..b' (powers of two) or 'a,b,c'")
    common.add_argument("--method", choices=METHODS)
    common.add_argument("--alpha", type=float, help="order for tail_modified grids / classify")
    common.add_argument("--lam", type=float, help="lambda for log_tail grids")
    common.add_argument("--inner", choices=("midpoint", "optimal"))
    common.add_argument("--tol", type=float, help="relative integration tolerance")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--threads", type=int, help="worker cap (default: $WQ1D_THREADS or 1)")

    p = argparse.ArgumentParser(prog="wq1d", description=(
        "Optimal equal-weight N-point approximation of 1-D laws in Wasserstein distance."))
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("quantize", parents=[common], help="emit a grid as CSV")
    e = sub.add_parser("error", parents=[common], help="approximation error of a grid")
    e.add_argument("--formula", choices=FORMULAS)
    e.add_argument("--cross-check", action="store_true", default=None,
                   help="evaluate by both the quantile and the CDF formula")
    e.add_argument("--per-cell", action="store_true", default=None)
    s = sub.add_parser("sweep", parents=[common], help="errors over a range of N")
    s.add_argument("--formula", choices=FORMULAS[:2])
    s.add_argument("--track-alpha", type=float, help="exponent for the N^alpha e_N column")
    s.add_argument("--log-exponent", action="store_true", default=None,
                   help="also fit the power of ln N at fixed order")
    t = sub.add_parser("tails", parents=[common], help="tail functionals at exponent beta")
    t.add_argument("--beta", type=float)
    sub.add_parser("classify", parents=[common], help="is order alpha reachable?")
    b = sub.add_parser("baseline", parents=[common], help="Monte Carlo empirical-measure error")
    b.add_argument("--reps", type=int)
    b.add_argument("--seed", type=int)
    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--quick", action="store_true", default=None,
                   help="thinned N ranges (about a minute)")
    return p


def _merge(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    if "n" in cfg and "n_values" in cfg:
        raise UsageError("config gives both n and n_values; use exactly one")
    if "n_values" in cfg:
        cfg["n"] = cfg.pop("n_values")
    merged = dict(DEFAULTS)
    merged.update(cfg)
    for k, v in vars(args).items():
        if v is not None and k != "config":
            merged[k] = v
    return merged


def _need(opts, key):
    if opts.get(key) is None:
        raise UsageError(f"--{key.replace('_', '-')} is required")
    return opts[key]


def _single_n(opts) -> int:
    ns = parse_n(_need(opts, "n"))
    if len(ns) != 1:
        raise UsageError("this command takes a single N")
    return ns[0]


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _dict_csv(d: dict) -> str:
    flat = {k: v for k, v in d.items() if not isinstance(v, (list, dict))}
    return _rows_csv([list(flat), [_cell(v) for v in flat.values()]])


def _cell(v):
    if isinstance(v, bool):
        return str(v).lower()
    return "" if v is None else v


def _grid(dist, n, opts):
    return make_grid(dist, n, opts["rho"], opts["method"], alpha=opts["alpha"],
                     lam=opts["lam"], inner=opts["inner"])


def cmd_quantize(opts, fmt):
    dist = make_distribution(_need(opts, "dist"))
    g = _grid(dist, _single_n(opts), opts)
    if fmt == "json":
        return json.dumps({"dist": dist.name, "rho": format_number(g.rho), "method": g.method,
                           "points": [format_number(x) for x in g.points]})
    return g.to_csv()


def _evaluate(dist, grid, rho, formula, tol, n):
    if formula == "w1_closed":
        if rho != 1:
            raise UsageError("w1_closed only applies at rho = 1")
        if grid is not None and grid.method != "optimal":
            raise UsageError("w1_closed evaluates the optimal grid only")
        return error_w1_closed(dist, n, tol)
    if grid is None:
        return ErrorResult.infinite(formula, rho, n)
    fn = error_cdf_form if formula == "cdf_form" else error_quantile_form
    return fn(dist, grid, rho, tol=tol)


def cmd_error(opts, fmt):
    dist = make_distribution(_need(opts, "dist"))
    n = _single_n(opts)
    rho = opts["rho"]
    try:
        grid = _grid(dist, n, opts)
    except MomentError:
        grid = None  # no moment of order rho: the error is +inf
    per_cell = bool(opts.get("per_cell"))
    if opts.get("cross_check"):
        q = _evaluate(dist, grid, rho, "quantile_form", opts["tol"], n)
        c = _evaluate(dist, grid, rho, "cdf_form", opts["tol"], n)
        if q.is_infinite or c.is_infinite:
            diff = 0.0 if q.is_infinite and c.is_infinite else math.inf
        else:
            diff = abs(q.value - c.value) / max(q.value, 1e-300) if q.value or c.value else 0.0
        doc = {"value": format_number(q.value), "quantile_form": q.to_dict(per_cell),
               "cdf_form": c.to_dict(per_cell), "rel_diff": format_number(diff)}
        if fmt == "csv":
            rows = [["formula", "value", "value_pow", "est_abs_error"]]
            rows += [[r.formula, format_number(r.value), format_number(r.value_pow),
                      format_number(r.est_abs_error)] for r in (q, c)]
            return _rows_csv(rows)
        return json.dumps(doc)
    res = _evaluate(dist, grid, rho, opts["formula"], opts["tol"], n)
    if fmt == "csv":
        if per_cell:
            return _rows_csv([["i", "cell_error_pow"]] + [
                [i + 1, format_number(v)] for i, v in enumerate(res.per_cell)])
        return _dict_csv(res.to_dict())
    return res.to_json(per_cell)


def cmd_sweep(opts, fmt):
    dist = make_distribution(_need(opts, "dist"))
    ns = parse_n(_need(opts, "n"))
    rep = sweep(dist, opts["rho"], ns, opts["method"], tol=opts["tol"], alpha=opts["alpha"],
                lam=opts["lam"], inner=opts["inner"], formula=opts["formula"],
                track_alpha=opts.get("track_alpha"),
                log_exponent=bool(opts.get("log_exponent")), threads=opts["threads"])
    return rep.to_json() if fmt == "json" else rep.to_csv()


def cmd_tails(opts, fmt):
    dist = make_distribution(_need(opts, "dist"))
    tp = tail_profile(dist, float(_need(opts, "beta")))
    return tp.to_csv() if fmt == "csv" else tp.to_json()


def cmd_classify(opts, fmt):
    dist = make_distribution(_need(opts, "dist"))
    v = classify_order(dist, opts["rho"], float(_need(opts, "alpha")))
    if fmt == "csv":
        rows = [["check", "role", "holds", "detail"]]
        rows += [[c.name, c.role, _cell(c.holds), c.detail] for c in v.checks]
        rows.append(["conclusion", "", v.conclusion, v.message])
        return _rows_csv(rows)
    return v.to_json()


def cmd_baseline(opts, fmt):
    dist = make_distribution(_need(opts, "dist"))
    r = mc_baseline(dist, opts["rho"], _single_n(opts), reps=int(opts["reps"]),
                    seed=int(opts["seed"]), threads=opts["threads"])
    return _dict_csv(r.to_dict()) if fmt == "csv" else r.to_json()


COMMANDS = {"quantize": cmd_quantize, "error": cmd_error, "sweep": cmd_sweep,
            "tails": cmd_tails, "classify": cmd_classify, "baseline": cmd_baseline}


def _emit(text, path):
    if not text.endswith("\n"):
        text += "\n"
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge(args)
        if opts["rho"] is not None and float(opts["rho"]) < 1:
            raise UsageError("rho must be >= 1")
        opts["rho"] = float(opts["rho"])
        if opts["threads"] is not None:
            opts["threads"] = resolve_threads(int(opts["threads"]))
        cmd = args.command
        if cmd == "verify":
            from . import verify
            if opts["output"]:
                with open(opts["output"], "w") as fh:
                    return verify.main(quick=bool(opts.get("quick")), stream=fh)
            return verify.main(quick=bool(opts.get("quick")))
        fmt = opts["format"] or DEFAULT_FORMAT[cmd]
        _emit(COMMANDS[cmd](opts, fmt), opts["output"])
    except ValueError as exc:
        parser.exit(2, f"wq1d {args.command}: error: {exc}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
